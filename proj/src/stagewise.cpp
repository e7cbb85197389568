#include "monolasso/stagewise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace monolasso {

namespace {

void validate(const StagewiseConfig& config) {
    if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) throw ConfigError("epsilon must be positive");
    if (config.record_stride < 1) throw ConfigError("record stride must be at least 1");
    if (config.max_iterations < 0) throw ConfigError("max iterations must be non-negative");
}

double stop_tolerance(const StagewiseConfig& config, const Vector& y) {
    return config.stop_correlation_tolerance.value_or(1e-8 * y.norm());
}

// Shared vertex bookkeeping for the epsilon algorithms: stride, first-time entries, and
// the final step are always kept.
class StepRecorder {
public:
    StepRecorder(Index dimension, double epsilon, int stride)
        : path_(dimension, Parametrization::l1_arc_length),
          epsilon_(epsilon),
          stride_(stride),
          seen_(static_cast<std::size_t>(dimension), false) {}

    void after_step(long m, Index chosen, const Vector& beta) {
        const bool entry = !seen_[static_cast<std::size_t>(chosen)];
        seen_[static_cast<std::size_t>(chosen)] = true;
        if (entry || m % stride_ == 0) record(m, chosen, beta);
        last_step_ = m;
        last_chosen_ = chosen;
    }

    StagewiseResult finish(const Vector& beta, std::vector<Index> selections, Termination why) {
        if (last_step_ > last_recorded_) record(last_step_, last_chosen_, beta);
        path_.termination = why;
        path_.truncated = why == Termination::step_budget;
        StagewiseResult out{std::move(path_), last_step_, std::move(selections)};
        return out;
    }

private:
    void record(long m, Index chosen, const Vector& beta) {
        path_.append(static_cast<double>(m) * epsilon_, beta, {chosen}, {EventKind::step, chosen, epsilon_});
        last_recorded_ = m;
    }

    PiecewiseLinearPath path_;
    double epsilon_;
    long stride_;
    std::vector<bool> seen_;
    long last_step_ = 0;
    long last_recorded_ = 0;
    Index last_chosen_ = -1;
};

// Largest entry of an expanded score vector; ties go to the lowest predictor, positive
// half first.
Index expanded_argmax(const Vector& score, Index p) {
    Index best = 0;
    double value = score[0];
    for (Index j = 0; j < p; ++j) {
        if (score[j] > value) {
            value = score[j];
            best = j;
        }
        if (score[j + p] > value) {
            value = score[j + p];
            best = j + p;
        }
    }
    return best;
}

}  // namespace

StagewiseResult fs_epsilon(const StandardizedDesign& design, const StagewiseConfig& config) {
    validate(config);
    const Index p = design.p();
    const double tol = stop_tolerance(config, design.y_centered);
    const Matrix& x = design.x;

    Vector r = design.y_centered;
    Vector increments = Vector::Zero(2 * p);
    StepRecorder recorder(2 * p, config.epsilon, config.record_stride);
    std::vector<Index> selections;
    Index previous = -1;

    for (long m = 1;; ++m) {
        if (m > config.max_iterations) return recorder.finish(increments, std::move(selections), Termination::step_budget);

        const Vector c = x.transpose() * r;
        Index j = 0;
        double best = std::abs(c[0]);
        for (Index k = 1; k < p; ++k) {
            if (std::abs(c[k]) > best) {
                best = std::abs(c[k]);
                j = k;
            }
        }
        if (best <= tol) return recorder.finish(increments, std::move(selections), Termination::complete);

        const double delta = c[j] > 0.0 ? config.epsilon : -config.epsilon;
        const Index chosen = delta > 0.0 ? j : j + p;
        if (previous >= 0 && chosen == (previous < p ? previous + p : previous - p)) {
            return recorder.finish(increments, std::move(selections), Termination::epsilon_resolution);
        }

        increments[chosen] += config.epsilon;
        r -= delta * x.col(j);
        selections.push_back(chosen);
        previous = chosen;
        recorder.after_step(m, chosen, increments);
    }
}

StagewiseResult monotone_incremental(const ExpandedDesign& design, const StagewiseConfig& config) {
    validate(config);
    const Index p = design.p();
    const double tol = stop_tolerance(config, design.response());

    Vector r = design.response();
    Vector beta = Vector::Zero(design.size());
    StepRecorder recorder(design.size(), config.epsilon, config.record_stride);
    std::vector<Index> selections;
    Index previous = -1;

    for (long m = 1;; ++m) {
        if (m > config.max_iterations) return recorder.finish(beta, std::move(selections), Termination::step_budget);

        const Vector c = design.correlations(r);
        const Index j = expanded_argmax(c, p);
        if (c[j] <= tol) return recorder.finish(beta, std::move(selections), Termination::complete);
        if (previous >= 0 && j == design.partner(previous)) {
            return recorder.finish(beta, std::move(selections), Termination::epsilon_resolution);
        }

        beta[j] += config.epsilon;
        r -= config.epsilon * design.column(j);
        selections.push_back(j);
        previous = j;
        recorder.after_step(m, j, beta);
    }
}

Vector default_response(const ExpandedDesign& design, const LossModel& loss) {
    return loss.kind() == LossKind::squared_error ? design.response() : design.base().y();
}

StagewiseResult generalized_monotone_incremental(const ExpandedDesign& design, const Vector& response,
                                                 const LossModel& loss, const StagewiseConfig& config) {
    validate(config);
    loss.validate_response(response);
    if (response.size() != design.n()) throw ConfigError("response length does not match the design");
    const Index p = design.p();

    Vector beta = Vector::Zero(design.size());
    Vector eta = Vector::Zero(design.n());
    const double tol = config.stop_correlation_tolerance.value_or(
        1e-8 * design.correlations(loss.gradients(response, eta)).lpNorm<Eigen::Infinity>());
    StepRecorder recorder(design.size(), config.epsilon, config.record_stride);
    std::vector<Index> selections;
    Index previous = -1;

    for (long m = 1;; ++m) {
        if (m > config.max_iterations) return recorder.finish(beta, std::move(selections), Termination::step_budget);

        const Vector negative_gradient = design.correlations(-loss.gradients(response, eta));
        const Index j = expanded_argmax(negative_gradient, p);
        if (negative_gradient[j] <= tol) return recorder.finish(beta, std::move(selections), Termination::complete);
        if (previous >= 0 && j == design.partner(previous)) {
            return recorder.finish(beta, std::move(selections), Termination::epsilon_resolution);
        }

        beta[j] += config.epsilon;
        eta += config.epsilon * design.column(j);
        selections.push_back(j);
        previous = j;
        recorder.after_step(m, j, beta);
    }
}

namespace {

struct WeightedStep {
    MoveDirection dir;
    double length = 0.0;  // L1 length of the weighted least-squares step
    Vector score;
};

// Columns with positive score within `band` of the leader enter the weighted fit.
WeightedStep weighted_step(const ExpandedDesign& design, const Vector& beta, const Vector& response,
                           const LossModel& loss, double band, bool relative) {
    const Vector eta = design.fitted(beta);
    const Vector u = loss.gradients(response, eta);
    const Vector w = loss.curvatures(response, eta);
    for (Index i = 0; i < w.size(); ++i) {
        if (!(w[i] > 1e-12)) {
            throw CurvatureError("loss curvature vanished at observation " + std::to_string(i) +
                                 "; reduce the step size or stop earlier on the path");
        }
    }

    const Vector score = design.correlations(-u);
    const double top = score.maxCoeff();
    const double floor = 1e-12 * std::max(1.0, std::sqrt(static_cast<double>(design.n())) * response.norm());
    WeightedStep out;
    out.score = score;
    out.dir.rho = Vector::Zero(design.size());
    if (top <= floor) return out;

    const double cut = top - (relative ? band * top : band);
    std::vector<Index> active;
    for (Index j = 0; j < score.size(); ++j)
        if (score[j] > 0.0 && score[j] >= cut) active.push_back(j);

    const Vector root_w = w.cwiseSqrt();
    Matrix weighted = design.columns(active);
    weighted = root_w.asDiagonal() * weighted;
    const Vector target = (-u).cwiseQuotient(root_w);
    Vector theta;
    try {
        theta = solve_nnls(weighted, target);
    } catch (const DegenerateDesignError& e) {
        const Index col = active[static_cast<std::size_t>(e.column)];
        throw DegenerateDesignError(design.base_index(col), "weighted active design is rank deficient");
    }

    const double total = theta.sum();
    if (!(total > 0.0)) throw ConsistencyError("loss-aware direction has no positive mass");
    out.length = total;
    for (std::size_t k = 0; k < active.size(); ++k) {
        const double v = theta[static_cast<Index>(k)];
        if (v > 0.0) {
            out.dir.rho[active[k]] = v / total;
            out.dir.support.push_back(active[k]);
        }
    }
    return out;
}

}  // namespace

MoveDirection glm_move_direction(const ExpandedDesign& design, const Vector& beta, const Vector& response,
                                 const LossModel& loss, double tie_tolerance) {
    if (response.size() != design.n()) throw ConfigError("response length does not match the design");
    return weighted_step(design, beta, response, loss, tie_tolerance, true).dir;
}

IntegrationResult integrate_monotone_path(const ExpandedDesign& design, const Vector& response,
                                          const LossModel& loss, const StepControl& control) {
    if (!(control.step > 0.0)) throw ConfigError("integration step must be positive");
    if (!(control.min_step > 0.0)) throw ConfigError("minimum step must be positive");
    if (control.record_stride < 1) throw ConfigError("record stride must be at least 1");
    if (response.size() != design.n()) throw ConfigError("response length does not match the design");
    loss.validate_response(response);

    IntegrationResult out;
    out.path = PiecewiseLinearPath(design.size(), Parametrization::l1_arc_length);
    Vector beta = Vector::Zero(design.size());
    double current = loss.total(response, design.fitted(beta));
    out.losses.push_back(current);

    double ell = 0.0;
    long since_record = 0;
    std::vector<Index> last_support;
    auto record = [&]() {
        out.path.append(ell, beta, last_support, {EventKind::step, -1, 0.0});
        out.losses.push_back(current);
        since_record = 0;
    };

    // Scores that moved by more than the gap to the leader in one step count as tied.
    double band = 1e-9;
    bool relative = true;
    double initial_gradient = -1.0;
    while (true) {
        if (ell >= control.arc_budget) {
            out.path.termination = Termination::stop_bound;
            break;
        }
        if (out.steps >= control.max_steps) {
            out.path.termination = Termination::step_budget;
            out.path.truncated = true;
            break;
        }
        const WeightedStep ws = weighted_step(design, beta, response, loss, band, relative);
        const double gradient = ws.score.maxCoeff();
        if (initial_gradient < 0.0) initial_gradient = gradient;
        if (ws.dir.is_zero() || gradient <= control.gradient_tolerance * initial_gradient) break;

        double h = std::min({control.step, control.arc_budget - ell, ws.length});
        while (true) {
            const Vector trial = beta + h * ws.dir.rho;
            const double value = loss.total(response, design.fitted(trial));
            if (value <= current + control.loss_slack * std::max(1.0, std::abs(current))) {
                beta = trial;
                current = value;
                break;
            }
            h *= 0.5;
            ++out.halvings;
            if (h < control.min_step) {
                throw StepSizeError("loss kept increasing after halving the step below " +
                                    std::to_string(control.min_step));
            }
        }
        ell += h;
        ++out.steps;
        ++since_record;
        last_support = ws.dir.support;
        const Vector moved = design.correlations(-loss.gradients(response, design.fitted(beta)));
        band = (moved - ws.score).lpNorm<Eigen::Infinity>();
        relative = false;
        if (since_record >= control.record_stride) record();
    }
    if (since_record > 0) record();
    return out;
}

}  // namespace monolasso
