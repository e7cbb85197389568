#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "monolasso/numeric.hpp"

namespace monolasso {

/// Raw predictors (N x p) and response.
struct Dataset {
    Matrix x;
    Vector y;
    std::vector<std::string> feature_names;

    Index n() const { return x.rows(); }
    Index p() const { return x.cols(); }

    /// Throws DataError on shape mismatches, empty data or non-finite entries.
    void validate() const;
};

/// Column-centered predictors scaled to unit variance (denominator N), plus the
/// statistics needed to map coefficients back to the raw scale.
struct StandardizedDesign {
    Matrix x;
    Vector centers;
    Vector scales;
    Vector y_centered;
    double y_mean = 0.0;
    std::vector<std::string> feature_names;

    Index n() const { return x.rows(); }
    Index p() const { return x.cols(); }

    /// Raw response, y_centered + y_mean.
    Vector y() const;

    /// Coefficients (length p) on the raw predictor scale.
    Vector to_original_scale(const Vector& beta) const;
    /// Intercept matching standardized coefficients beta on the raw scale.
    double intercept(const Vector& beta) const;
    /// Predictions for raw predictor rows.
    Vector predict(const Matrix& raw_x, const Vector& beta) const;
};

StandardizedDesign standardize(const Dataset& data);

/// The 2p-column design [X : -X]. Column p + j is the negation of column j; negated
/// columns are never stored, only produced on access.
class ExpandedDesign {
public:
    explicit ExpandedDesign(std::shared_ptr<const StandardizedDesign> base);
    explicit ExpandedDesign(StandardizedDesign base);

    const StandardizedDesign& base() const { return *base_; }
    std::shared_ptr<const StandardizedDesign> shared_base() const { return base_; }

    Index n() const { return base_->n(); }
    Index p() const { return base_->p(); }
    Index size() const { return 2 * base_->p(); }

    Index base_index(Index j) const { return j < p() ? j : j - p(); }
    double sign(Index j) const { return j < p() ? 1.0 : -1.0; }
    Index partner(Index j) const { return j < p() ? j + p() : j - p(); }

    const Vector& response() const { return base_->y_centered; }

    Vector column(Index j) const;
    Matrix columns(std::span<const Index> indices) const;
    /// X~' v for every expanded column.
    Vector correlations(const Vector& v) const;
    /// X~ beta for a 2p coefficient vector.
    Vector fitted(const Vector& beta) const;
    Vector residual(const Vector& beta) const { return response() - fitted(beta); }
    double gram(Index i, Index j) const;
    Matrix gram(std::span<const Index> indices) const;

private:
    std::shared_ptr<const StandardizedDesign> base_;
};

/// Paired differences beta_j = beta_j^+ - beta_j^-.
Vector collapse(const Vector& beta_expanded);
/// Canonical split of signed coefficients into (positive part | negative part).
Vector expand(const Vector& beta);
double l1_norm(const Vector& beta);

enum class Parametrization { l1_norm, l1_arc_length };

/// Which quantity indexes a path when comparing it to others.
enum class IndexBy { native, norm, arc_length };

enum class EventKind {
    join,           ///< a variable reaches the maximal correlation
    zero_crossing,  ///< an active coefficient reaches zero and leaves (lasso)
    least_squares,  ///< residual matches the unrestricted least-squares fit
    stop_bound,     ///< a user-supplied norm or lambda bound was reached
    step,           ///< one incremental (epsilon) step
};

struct PathEvent {
    EventKind kind = EventKind::join;
    Index index = -1;
    double gamma = 0.0;
};

enum class Termination {
    complete,          ///< maximal correlation reached zero
    zero_residual,     ///< p >= N: exact interpolation reached
    stop_bound,
    step_budget,       ///< iteration or step cap hit; path is partial
    epsilon_resolution ///< an epsilon run started undoing its previous step
};

const char* to_string(Parametrization p);
const char* to_string(EventKind k);
const char* to_string(Termination t);

/// Continuous piecewise-linear coefficient path in 2p-space.
class PiecewiseLinearPath {
public:
    PiecewiseLinearPath() = default;
    /// A path of length zero sitting at the origin of a `dimension`-dimensional space.
    PiecewiseLinearPath(Index dimension, Parametrization parametrization);

    /// Extend the path to `vertex` at index `ell` (> last breakpoint). `active_set`
    /// describes the segment being closed.
    void append(double ell, Vector vertex, std::vector<Index> active_set = {},
                PathEvent event = {}, double lambda = -1.0);

    Index dimension() const { return dimension_; }
    Index p() const { return dimension_ / 2; }
    Parametrization parametrization() const { return parametrization_; }
    std::size_t segments() const { return breakpoints_.empty() ? 0 : breakpoints_.size() - 1; }
    double length() const { return breakpoints_.back(); }

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<Vector>& vertices() const { return vertices_; }
    const std::vector<std::vector<Index>>& segment_active_sets() const { return active_sets_; }
    const std::vector<PathEvent>& events() const { return events_; }
    /// Maximal correlation at each vertex; negative where unknown.
    const std::vector<double>& lambdas() const { return lambdas_; }

    void set_initial_lambda(double lambda) { lambdas_.front() = lambda; }

    Vector evaluate(double ell) const;
    double arc_length(double ell) const;

    Termination termination = Termination::complete;
    /// Set when the run stopped on a budget rather than a convergence criterion.
    bool truncated = false;

    /// Rebuild a path from stored parts (import); validates every invariant.
    static PiecewiseLinearPath from_parts(Parametrization parametrization,
                                          std::vector<double> breakpoints,
                                          std::vector<Vector> vertices,
                                          std::vector<std::vector<Index>> active_sets,
                                          std::vector<PathEvent> events,
                                          std::vector<double> lambdas);

private:
    std::size_t locate(double ell) const;

    Index dimension_ = 0;
    Parametrization parametrization_ = Parametrization::l1_norm;
    std::vector<double> breakpoints_;
    std::vector<Vector> vertices_;
    std::vector<std::vector<Index>> active_sets_;
    std::vector<PathEvent> events_;
    std::vector<double> lambdas_;
    // Caches kept in step with the vertices.
    std::vector<double> cumulative_arc_;
    std::vector<double> running_max_norm_;

    friend double index_extent(const PiecewiseLinearPath&, IndexBy);
    friend double first_passage(const PiecewiseLinearPath&, IndexBy, double);
};

Vector evaluate_path(const PiecewiseLinearPath& path, double ell);
double arc_length(const PiecewiseLinearPath& path, double ell);

/// Value of the chosen index at native position ell.
double index_value(const PiecewiseLinearPath& path, double ell, IndexBy by);
/// Largest value the index reaches along the path.
double index_extent(const PiecewiseLinearPath& path, IndexBy by);
/// Smallest native position at which the index first reaches `value`.
double first_passage(const PiecewiseLinearPath& path, IndexBy by, double value);

}  // namespace monolasso
