#include "monolasso/loss.hpp"

#include <cmath>
#include <string>

#include "monolasso/errors.hpp"

namespace monolasso {

double sigmoid(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

double softplus(double eta) {
    if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
    return std::log1p(std::exp(eta));
}

const char* LossModel::name() const {
    return kind_ == LossKind::squared_error ? "squared" : "logistic";
}

double LossModel::value(double y, double eta) const {
    if (kind_ == LossKind::squared_error) {
        const double r = y - eta;
        return 0.5 * r * r;
    }
    return y * softplus(-eta) + (1.0 - y) * softplus(eta);
}

double LossModel::gradient(double y, double eta) const {
    if (kind_ == LossKind::squared_error) return eta - y;
    return sigmoid(eta) - y;
}

double LossModel::curvature(double y, double eta) const {
    if (kind_ == LossKind::squared_error) return 1.0;
    (void)y;
    // p (1 - p) written through e^{-|eta|} to keep precision in both tails.
    const double e = std::exp(-std::abs(eta));
    return e / ((1.0 + e) * (1.0 + e));
}

double LossModel::total(const Vector& y, const Vector& eta) const {
    double sum = 0.0;
    for (Index i = 0; i < y.size(); ++i) sum += value(y[i], eta[i]);
    return sum;
}

Vector LossModel::gradients(const Vector& y, const Vector& eta) const {
    Vector u(y.size());
    for (Index i = 0; i < y.size(); ++i) u[i] = gradient(y[i], eta[i]);
    return u;
}

Vector LossModel::curvatures(const Vector& y, const Vector& eta) const {
    Vector w(y.size());
    for (Index i = 0; i < y.size(); ++i) w[i] = curvature(y[i], eta[i]);
    return w;
}

void LossModel::validate_response(const Vector& y) const {
    if (!y.allFinite()) throw DataError("response contains non-finite values");
    if (kind_ != LossKind::logistic) return;
    for (Index i = 0; i < y.size(); ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) {
            throw DataError("logistic loss needs a 0/1 response; row " + std::to_string(i) +
                            " has " + std::to_string(y[i]));
        }
    }
}

LossModel squared_error_loss() { return LossModel(LossKind::squared_error); }
LossModel logistic_loss() { return LossModel(LossKind::logistic); }

}  // namespace monolasso
