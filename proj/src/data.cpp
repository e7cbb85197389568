#include "monolasso/data.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "monolasso/errors.hpp"

namespace monolasso {

void Dataset::validate() const {
    if (x.rows() < 1 || x.cols() < 1) throw DataError("dataset needs at least one row and one column");
    if (y.size() != x.rows()) {
        throw DataError("response has " + std::to_string(y.size()) + " entries but predictors have " +
                        std::to_string(x.rows()) + " rows");
    }
    if (!x.allFinite() || !y.allFinite()) throw DataError("dataset contains non-finite values");
    if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != x.cols()) {
        throw DataError("feature_names length does not match the number of columns");
    }
}

Vector StandardizedDesign::y() const { return y_centered.array() + y_mean; }

Vector StandardizedDesign::to_original_scale(const Vector& beta) const {
    return beta.cwiseQuotient(scales);
}

double StandardizedDesign::intercept(const Vector& beta) const {
    return y_mean - centers.dot(to_original_scale(beta));
}

Vector StandardizedDesign::predict(const Matrix& raw_x, const Vector& beta) const {
    if (raw_x.cols() != p()) throw DataError("predict: column count mismatch");
    const Vector coef = to_original_scale(beta);
    return (raw_x * coef).array() + intercept(beta);
}

StandardizedDesign standardize(const Dataset& data) {
    data.validate();
    const Index n = data.n();
    const Index p = data.p();

    StandardizedDesign s;
    s.x.resize(n, p);
    s.centers.resize(p);
    s.scales.resize(p);
    s.feature_names = data.feature_names;
    for (Index j = 0; j < p; ++j) {
        const double mean = data.x.col(j).mean();
        Vector centered = data.x.col(j).array() - mean;
        const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(n));
        const double magnitude = std::max(1.0, data.x.col(j).cwiseAbs().maxCoeff());
        if (!(sd > 1e-12 * magnitude)) {
            const std::string name =
                data.feature_names.empty() ? std::to_string(j) : data.feature_names[j];
            throw ZeroVarianceError(j, "column " + name + " has zero variance");
        }
        s.centers[j] = mean;
        s.scales[j] = sd;
        s.x.col(j) = centered / sd;
    }
    s.y_mean = data.y.mean();
    s.y_centered = data.y.array() - s.y_mean;
    return s;
}

ExpandedDesign::ExpandedDesign(std::shared_ptr<const StandardizedDesign> base)
    : base_(std::move(base)) {
    if (!base_) throw ConfigError("ExpandedDesign: null base design");
}

ExpandedDesign::ExpandedDesign(StandardizedDesign base)
    : base_(std::make_shared<const StandardizedDesign>(std::move(base))) {}

Vector ExpandedDesign::column(Index j) const {
    if (j < 0 || j >= size()) throw RangeError("expanded column index out of range");
    return sign(j) * base_->x.col(base_index(j));
}

Matrix ExpandedDesign::columns(std::span<const Index> indices) const {
    Matrix out(n(), static_cast<Index>(indices.size()));
    for (std::size_t k = 0; k < indices.size(); ++k) out.col(static_cast<Index>(k)) = column(indices[k]);
    return out;
}

Vector ExpandedDesign::correlations(const Vector& v) const {
    const Vector half = base_->x.transpose() * v;
    Vector out(size());
    out.head(p()) = half;
    out.tail(p()) = -half;
    return out;
}

Vector ExpandedDesign::fitted(const Vector& beta) const {
    if (beta.size() != size()) throw ConfigError("fitted: coefficient vector must have length 2p");
    return base_->x * collapse(beta);
}

double ExpandedDesign::gram(Index i, Index j) const {
    return sign(i) * sign(j) * base_->x.col(base_index(i)).dot(base_->x.col(base_index(j)));
}

Matrix ExpandedDesign::gram(std::span<const Index> indices) const {
    const Matrix cols = columns(indices);
    return cols.transpose() * cols;
}

Vector collapse(const Vector& beta_expanded) {
    if (beta_expanded.size() % 2 != 0) throw ConfigError("collapse: length must be even");
    const Index p = beta_expanded.size() / 2;
    return beta_expanded.head(p) - beta_expanded.tail(p);
}

Vector expand(const Vector& beta) {
    Vector out(2 * beta.size());
    out.head(beta.size()) = beta.cwiseMax(0.0);
    out.tail(beta.size()) = (-beta).cwiseMax(0.0);
    return out;
}

double l1_norm(const Vector& beta) { return beta.lpNorm<1>(); }

const char* to_string(Parametrization p) {
    switch (p) {
        case Parametrization::l1_norm: return "l1-norm";
        case Parametrization::l1_arc_length: return "l1-arc-length";
    }
    return "?";
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::join: return "join";
        case EventKind::zero_crossing: return "zero-crossing";
        case EventKind::least_squares: return "least-squares";
        case EventKind::stop_bound: return "stop-bound";
        case EventKind::step: return "step";
    }
    return "?";
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::complete: return "complete";
        case Termination::zero_residual: return "zero-residual";
        case Termination::stop_bound: return "stop-bound";
        case Termination::step_budget: return "step-budget";
        case Termination::epsilon_resolution: return "epsilon-resolution";
    }
    return "?";
}

PiecewiseLinearPath::PiecewiseLinearPath(Index dimension, Parametrization parametrization)
    : dimension_(dimension), parametrization_(parametrization) {
    if (dimension < 2 || dimension % 2 != 0) {
        throw ConfigError("path dimension must be a positive even number (2p)");
    }
    breakpoints_.push_back(0.0);
    vertices_.push_back(Vector::Zero(dimension));
    lambdas_.push_back(-1.0);
    cumulative_arc_.push_back(0.0);
    running_max_norm_.push_back(0.0);
}

void PiecewiseLinearPath::append(double ell, Vector vertex, std::vector<Index> active_set,
                                 PathEvent event, double lambda) {
    if (breakpoints_.empty()) throw ConfigError("append on an uninitialized path");
    if (!(ell > breakpoints_.back()) || !std::isfinite(ell)) {
        throw ConfigError("path breakpoints must be strictly increasing");
    }
    if (vertex.size() != dimension_) throw ConfigError("path vertex has the wrong dimension");
    if (!vertex.allFinite()) throw ConfigError("path vertex is not finite");

    cumulative_arc_.push_back(cumulative_arc_.back() + (vertex - vertices_.back()).lpNorm<1>());
    running_max_norm_.push_back(std::max(running_max_norm_.back(), l1_norm(collapse(vertex))));
    breakpoints_.push_back(ell);
    vertices_.push_back(std::move(vertex));
    active_sets_.push_back(std::move(active_set));
    events_.push_back(event);
    lambdas_.push_back(lambda);
}

std::size_t PiecewiseLinearPath::locate(double ell) const {
    // Index k of the segment [l_k, l_{k+1}] containing ell.
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), ell);
    std::size_t k = static_cast<std::size_t>(it - breakpoints_.begin());
    k = k == 0 ? 0 : k - 1;
    return std::min(k, segments() == 0 ? 0 : segments() - 1);
}

namespace {

double clamp_to_range(double ell, double length) {
    const double slack = 1e-12 * std::max(1.0, length);
    if (!(ell >= -slack) || !(ell <= length + slack)) {
        throw RangeError("path position " + std::to_string(ell) + " outside [0, " +
                         std::to_string(length) + "]");
    }
    return std::clamp(ell, 0.0, length);
}

}  // namespace

Vector PiecewiseLinearPath::evaluate(double ell) const {
    ell = clamp_to_range(ell, length());
    if (segments() == 0) return vertices_.front();
    const std::size_t k = locate(ell);
    if (ell == breakpoints_[k]) return vertices_[k];
    if (ell == breakpoints_[k + 1]) return vertices_[k + 1];
    const double w = (ell - breakpoints_[k]) / (breakpoints_[k + 1] - breakpoints_[k]);
    return vertices_[k] + w * (vertices_[k + 1] - vertices_[k]);
}

double PiecewiseLinearPath::arc_length(double ell) const {
    ell = clamp_to_range(ell, length());
    if (segments() == 0) return 0.0;
    const std::size_t k = locate(ell);
    const double w = (ell - breakpoints_[k]) / (breakpoints_[k + 1] - breakpoints_[k]);
    return cumulative_arc_[k] + w * (cumulative_arc_[k + 1] - cumulative_arc_[k]);
}

PiecewiseLinearPath PiecewiseLinearPath::from_parts(
    Parametrization parametrization, std::vector<double> breakpoints, std::vector<Vector> vertices,
    std::vector<std::vector<Index>> active_sets, std::vector<PathEvent> events,
    std::vector<double> lambdas) {
    if (breakpoints.empty() || breakpoints.size() != vertices.size()) {
        throw DataError("path import: breakpoints and vertices disagree in count");
    }
    if (breakpoints.front() != 0.0) throw DataError("path import: first breakpoint must be 0");
    const std::size_t k = breakpoints.size() - 1;
    if (active_sets.size() != k) active_sets.resize(k);
    if (events.size() != k) events.resize(k);
    if (lambdas.size() != breakpoints.size()) lambdas.assign(breakpoints.size(), -1.0);

    PiecewiseLinearPath path(vertices.front().size(), parametrization);
    if (!vertices.front().isZero(0.0)) throw DataError("path import: path must start at the origin");
    path.lambdas_.front() = lambdas.front();
    try {
        for (std::size_t i = 1; i < breakpoints.size(); ++i) {
            path.append(breakpoints[i], std::move(vertices[i]), std::move(active_sets[i - 1]),
                        events[i - 1], lambdas[i]);
        }
    } catch (const ConfigError& e) {
        throw DataError(std::string("path import: ") + e.what());
    }
    return path;
}

Vector evaluate_path(const PiecewiseLinearPath& path, double ell) { return path.evaluate(ell); }

double arc_length(const PiecewiseLinearPath& path, double ell) { return path.arc_length(ell); }

double index_value(const PiecewiseLinearPath& path, double ell, IndexBy by) {
    switch (by) {
        case IndexBy::native: return ell;
        case IndexBy::arc_length: return path.arc_length(ell);
        case IndexBy::norm: return l1_norm(collapse(path.evaluate(ell)));
    }
    return ell;
}

double index_extent(const PiecewiseLinearPath& path, IndexBy by) {
    switch (by) {
        case IndexBy::native: return path.length();
        case IndexBy::arc_length: return path.cumulative_arc_.back();
        case IndexBy::norm: return path.running_max_norm_.back();
    }
    return path.length();
}

double first_passage(const PiecewiseLinearPath& path, IndexBy by, double value) {
    if (by == IndexBy::native) return clamp_to_range(value, path.length());
    const double extent = index_extent(path, by);
    value = clamp_to_range(value, extent);
    if (value <= 0.0 || path.segments() == 0) return 0.0;

    const auto& cumulative = by == IndexBy::arc_length ? path.cumulative_arc_ : path.running_max_norm_;
    // First vertex whose running index reaches value; passage lies on the segment before it.
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), value);
    const std::size_t end = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                                  path.segments());
    const std::size_t k = end - 1;
    const double l0 = path.breakpoints()[k];
    const double l1 = path.breakpoints()[k + 1];

    if (by == IndexBy::arc_length) {
        const double a0 = cumulative[k];
        const double a1 = cumulative[k + 1];
        if (a1 <= a0) return l1;
        return l0 + (value - a0) / (a1 - a0) * (l1 - l0);
    }

    // Collapsed norm is convex and piecewise linear along the segment, with kinks where a
    // coordinate changes sign; the first crossing is found piece by piece.
    const Vector c0 = collapse(path.vertices()[k]);
    const Vector c1 = collapse(path.vertices()[k + 1]);
    const Vector delta = c1 - c0;
    std::vector<double> knots{0.0, 1.0};
    for (Index j = 0; j < c0.size(); ++j) {
        if ((c0[j] < 0.0 && c1[j] > 0.0) || (c0[j] > 0.0 && c1[j] < 0.0)) {
            knots.push_back(-c0[j] / delta[j]);
        }
    }
    std::sort(knots.begin(), knots.end());
    auto norm_at = [&](double t) { return l1_norm(c0 + t * delta); };
    double t_prev = 0.0;
    double f_prev = norm_at(0.0);
    for (std::size_t i = 1; i < knots.size(); ++i) {
        const double t = knots[i];
        const double f = norm_at(t);
        if (f >= value) {
            const double t_hit = f > f_prev ? t_prev + (value - f_prev) / (f - f_prev) * (t - t_prev) : t;
            return l0 + std::clamp(t_hit, 0.0, 1.0) * (l1 - l0);
        }
        t_prev = t;
        f_prev = f;
    }
    return l1;
}

}  // namespace monolasso
