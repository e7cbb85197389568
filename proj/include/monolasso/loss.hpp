#pragma once

#include "monolasso/numeric.hpp"

namespace monolasso {

enum class LossKind { squared_error, logistic };

/// Convex per-observation loss l(y, eta) with its first two eta-derivatives.
///
/// squared_error: l = (y - eta)^2 / 2, u = eta - y, w = 1.
/// logistic:      l = log(1 + e^eta) - y eta (binomial deviance / 2 with y in {0,1}),
///                u = p - y, w = p (1 - p), with p = e^eta / (1 + e^eta).
class LossModel {
public:
    explicit constexpr LossModel(LossKind kind) : kind_(kind) {}

    LossKind kind() const { return kind_; }
    const char* name() const;

    double value(double y, double eta) const;
    double gradient(double y, double eta) const;
    double curvature(double y, double eta) const;

    /// Sum of value(y_i, eta_i).
    double total(const Vector& y, const Vector& eta) const;
    Vector gradients(const Vector& y, const Vector& eta) const;
    Vector curvatures(const Vector& y, const Vector& eta) const;

    /// Throws DataError when the response is outside the loss's domain.
    void validate_response(const Vector& y) const;

private:
    LossKind kind_;
};

LossModel squared_error_loss();
LossModel logistic_loss();

/// Numerically stable logistic function.
double sigmoid(double eta);
/// log(1 + e^eta) without overflow.
double softplus(double eta);

}  // namespace monolasso
