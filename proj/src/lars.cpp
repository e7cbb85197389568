#include "monolasso/lars.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace monolasso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double correlation_floor(const ExpandedDesign& design) {
    return 1e-12 * std::max(1.0, std::sqrt(static_cast<double>(design.n())) * design.response().norm());
}

std::vector<Index> tied_set(const Vector& c, double c_max, double tie) {
    std::vector<Index> out;
    for (Index j = 0; j < c.size(); ++j)
        if (c[j] >= c_max - tie * c_max) out.push_back(j);
    return out;
}

[[noreturn]] void rethrow_degenerate(const DegenerateDesignError& e, const std::vector<Index>& cols,
                                     const ExpandedDesign& design) {
    const Index expanded = e.column >= 0 && e.column < static_cast<Index>(cols.size())
                               ? cols[static_cast<std::size_t>(e.column)]
                               : e.column;
    const Index base = expanded >= 0 ? design.base_index(expanded) : expanded;
    throw DegenerateDesignError(base, "active design is rank deficient at predictor " +
                                          std::to_string(base) + " (expanded column " +
                                          std::to_string(expanded) + ")");
}

struct EventSearch {
    PathEvent event;
    double kappa = 0.0;  // rate at which the active correlation decays per unit gamma
};

// Smallest positive step to the next breakpoint along beta + gamma * rho.
EventSearch search_event(const ExpandedDesign& design, const Vector& beta, const Vector& c,
                         double c_max, const MoveDirection& direction,
                         const std::vector<bool>& excluded, PathMode mode, double tie) {
    const Vector fitted_direction = design.base().x * collapse(direction.rho);
    const Vector decay = design.correlations(fitted_direction);
    double kappa = 0.0;
    for (Index j : direction.support) kappa += decay[j];
    kappa /= static_cast<double>(direction.support.size());
    if (!(kappa > 0.0)) {
        throw ConsistencyError("move direction does not decrease the maximal correlation");
    }

    EventSearch out;
    out.kappa = kappa;
    const double gamma_ls = c_max / kappa;
    out.event = {EventKind::least_squares, -1, gamma_ls};

    for (Index j = 0; j < design.size(); ++j) {
        if (excluded[static_cast<std::size_t>(j)]) continue;
        const double denom = kappa - decay[j];
        if (denom <= tie * kappa) continue;  // never catches up before the active set does
        const double gamma = std::max(0.0, c_max - c[j]) / denom;
        if (gamma < out.event.gamma && gamma < gamma_ls * (1.0 - 1e-10)) {
            out.event = {EventKind::join, j, gamma};
        }
    }

    if (mode == PathMode::lasso) {
        for (Index j : direction.support) {
            if (direction.rho[j] < 0.0) {
                const double gamma = -beta[j] / direction.rho[j];
                if (gamma < out.event.gamma) out.event = {EventKind::zero_crossing, j, gamma};
            }
        }
    } else if (mode == PathMode::fs0) {
        for (Index j : direction.support) {
            if (direction.rho[j] < 0.0) {
                throw ConsistencyError("monotone direction has a negative component");
            }
        }
    }
    return out;
}

MoveDirection normalized(Vector theta, const std::vector<Index>& cols, Index size) {
    MoveDirection dir;
    dir.rho = Vector::Zero(size);
    double total = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) total += theta[static_cast<Index>(k)];
    if (!(total > 0.0)) throw ConsistencyError("move direction coefficients do not sum to a positive value");
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const double v = theta[static_cast<Index>(k)];
        if (v != 0.0) {
            dir.rho[cols[k]] = v / total;
            dir.support.push_back(cols[k]);
        }
    }
    return dir;
}

}  // namespace

const char* to_string(PathMode mode) {
    switch (mode) {
        case PathMode::lar: return "lar";
        case PathMode::lasso: return "lasso";
        case PathMode::fs0: return "fs0";
    }
    return "?";
}

PathMode parse_path_mode(const std::string& name) {
    if (name == "lar") return PathMode::lar;
    if (name == "lasso") return PathMode::lasso;
    if (name == "fs0") return PathMode::fs0;
    throw ConfigError("unknown path method '" + name + "' (expected lar, lasso or fs0)");
}

MoveDirection lasso_move_direction(const ExpandedDesign& design, const Vector& beta, double tie_tolerance) {
    const Vector r = design.residual(beta);
    const Vector c = design.correlations(r);
    const double c_max = c.maxCoeff();
    if (c_max <= correlation_floor(design)) return {Vector::Zero(design.size()), {}};

    const std::vector<Index> active = tied_set(c, c_max, tie_tolerance);
    Vector theta;
    try {
        theta = solve_least_squares(design.columns(active), r);
    } catch (const DegenerateDesignError& e) {
        rethrow_degenerate(e, active, design);
    }
    return normalized(std::move(theta), active, design.size());
}

MoveDirection monotone_move_direction(const ExpandedDesign& design, const Vector& beta,
                                      double tie_tolerance) {
    const Vector r = design.residual(beta);
    const Vector c = design.correlations(r);
    const double c_max = c.maxCoeff();
    if (c_max <= correlation_floor(design)) return {Vector::Zero(design.size()), {}};

    const std::vector<Index> active = tied_set(c, c_max, tie_tolerance);
    Vector theta;
    try {
        theta = solve_nnls(design.columns(active), r);
    } catch (const DegenerateDesignError& e) {
        rethrow_degenerate(e, active, design);
    }
    return normalized(std::move(theta), active, design.size());
}

PathEvent next_event(const ExpandedDesign& design, const Vector& beta, const MoveDirection& direction,
                     PathMode mode, double tie_tolerance) {
    if (direction.is_zero()) throw ConfigError("next_event needs a nonzero direction");
    const Vector c = design.correlations(design.residual(beta));
    const double c_max = c.maxCoeff();
    std::vector<bool> excluded(static_cast<std::size_t>(design.size()), false);
    for (Index j : tied_set(c, c_max, tie_tolerance)) excluded[static_cast<std::size_t>(j)] = true;
    for (Index j : direction.support) {
        excluded[static_cast<std::size_t>(j)] = true;
        excluded[static_cast<std::size_t>(design.partner(j))] = true;
    }
    const EventSearch found = search_event(design, beta, c, c_max, direction, excluded, mode, tie_tolerance);
    if (!(found.event.gamma > 0.0) || !std::isfinite(found.event.gamma)) {
        throw ConsistencyError("no positive step length to the next event");
    }
    return found.event;
}

PiecewiseLinearPath solve_path(const ExpandedDesign& design, const SolverConfig& config) {
    if (!(config.tie_tolerance > 0.0)) throw ConfigError("tie tolerance must be positive");
    if (config.stop_l1_norm && !(*config.stop_l1_norm > 0.0)) throw ConfigError("stop norm must be positive");
    if (config.stop_lambda && !(*config.stop_lambda >= 0.0)) throw ConfigError("stop lambda must be non-negative");

    const PathMode mode = config.mode;
    const double tie = config.tie_tolerance;
    const Index dim = design.size();
    const Vector& y = design.response();
    const double y_norm = y.norm();
    const int max_steps = config.max_steps > 0 ? config.max_steps
                                                : static_cast<int>(50 * (dim + design.n()));

    PiecewiseLinearPath path(dim, mode == PathMode::fs0 ? Parametrization::l1_arc_length
                                                        : Parametrization::l1_norm);
    Vector beta = Vector::Zero(dim);
    Vector c = design.correlations(y);
    double c_max = c.maxCoeff();
    path.set_initial_lambda(c_max);
    if (c_max <= correlation_floor(design)) return path;
    if (config.stop_lambda && c_max <= *config.stop_lambda) {
        path.termination = Termination::stop_bound;
        return path;
    }

    std::vector<Index> active;
    std::vector<bool> in_active(static_cast<std::size_t>(dim), false);
    std::vector<bool> just_dropped(static_cast<std::size_t>(dim), false);
    CholeskyFactor factor;

    auto add_active = [&](Index j) {
        if (in_active[static_cast<std::size_t>(j)]) return;
        if (mode != PathMode::fs0) {
            Vector row(static_cast<Index>(active.size()) + 1);
            for (std::size_t k = 0; k < active.size(); ++k) row[static_cast<Index>(k)] = design.gram(active[k], j);
            row[static_cast<Index>(active.size())] = design.gram(j, j);
            try {
                factor.append(row);
            } catch (const DegenerateDesignError&) {
                throw DegenerateDesignError(design.base_index(j),
                                            "active design is rank deficient when predictor " +
                                                std::to_string(design.base_index(j)) + " joins");
            }
        }
        active.push_back(j);
        in_active[static_cast<std::size_t>(j)] = true;
    };
    auto remove_active = [&](Index j) {
        const auto it = std::find(active.begin(), active.end(), j);
        if (it == active.end()) return;
        if (mode != PathMode::fs0) factor.remove(static_cast<Index>(it - active.begin()));
        active.erase(it);
        in_active[static_cast<std::size_t>(j)] = false;
    };
    auto add_ties = [&]() {
        for (Index j : tied_set(c, c_max, tie)) {
            if (!in_active[static_cast<std::size_t>(j)] && !just_dropped[static_cast<std::size_t>(j)] &&
                !in_active[static_cast<std::size_t>(design.partner(j))]) {
                add_active(j);
            }
        }
    };
    add_ties();

    double ell = 0.0;
    int steps = 0;
    while (true) {
        if (steps >= max_steps) {
            path.termination = Termination::step_budget;
            path.truncated = true;
            throw StepBudgetError("path solver exceeded " + std::to_string(max_steps) + " steps", path);
        }

        MoveDirection direction;
        if (mode == PathMode::fs0) {
            Vector theta;
            try {
                theta = solve_nnls_gram(design.gram(active), Vector::Ones(static_cast<Index>(active.size())));
            } catch (const DegenerateDesignError& e) {
                rethrow_degenerate(e, active, design);
            }
            direction = normalized(theta, active, dim);
            for (std::size_t k = 0; k < active.size(); ++k) {
                if (theta[static_cast<Index>(k)] == 0.0) just_dropped[static_cast<std::size_t>(active[k])] = true;
            }
            for (Index j = 0; j < dim; ++j) {
                if (just_dropped[static_cast<std::size_t>(j)]) remove_active(j);
            }
        } else {
            const Vector w = factor.solve(Vector::Ones(static_cast<Index>(active.size())));
            if (mode == PathMode::lasso) {
                // A coefficient sitting at zero that would turn negative leaves at once.
                bool dropped = false;
                for (std::size_t k = 0; k < active.size(); ++k) {
                    const Index j = active[k];
                    if (beta[j] <= 0.0 && w[static_cast<Index>(k)] < 0.0) {
                        remove_active(j);
                        just_dropped[static_cast<std::size_t>(j)] = true;
                        dropped = true;
                        break;
                    }
                }
                if (dropped) {
                    if (active.empty()) throw ConsistencyError("lasso active set emptied at a vertex");
                    continue;
                }
            }
            direction = normalized(w, active, dim);
        }

        std::vector<bool> excluded = in_active;
        for (Index j = 0; j < dim; ++j) {
            if (just_dropped[static_cast<std::size_t>(j)]) excluded[static_cast<std::size_t>(j)] = true;
            // -c_j can only meet C > 0 at C = 0, the least-squares event.
            if (in_active[static_cast<std::size_t>(j)]) excluded[static_cast<std::size_t>(design.partner(j))] = true;
        }

        const EventSearch found = search_event(design, beta, c, c_max, direction, excluded, mode, tie);
        PathEvent event = found.event;
        if (config.stop_l1_norm) {
            const double remaining = *config.stop_l1_norm - ell;
            if (remaining <= event.gamma) event = {EventKind::stop_bound, -1, remaining};
        }
        if (config.stop_lambda) {
            const double gamma = (c_max - *config.stop_lambda) / found.kappa;
            if (gamma <= event.gamma) event = {EventKind::stop_bound, -1, gamma};
        }
        if (!(event.gamma > 0.0) || !std::isfinite(event.gamma)) {
            if (event.kind == EventKind::stop_bound) {
                path.termination = Termination::stop_bound;
                return path;
            }
            throw ConsistencyError("no positive step length to the next event at breakpoint " +
                                   std::to_string(path.segments()));
        }

        beta += event.gamma * direction.rho;
        if (event.kind == EventKind::zero_crossing) beta[event.index] = 0.0;
        ell += event.gamma;
        ++steps;

        const Vector r = y - design.base().x * collapse(beta);
        c = design.correlations(r);
        std::fill(just_dropped.begin(), just_dropped.end(), false);
        const bool interpolates = r.norm() <= 1e-10 * y_norm;

        if (!interpolates) switch (event.kind) {
            case EventKind::join:
                add_active(event.index);
                break;
            case EventKind::zero_crossing:
                remove_active(event.index);
                just_dropped[static_cast<std::size_t>(event.index)] = true;
                break;
            default:
                break;
        }

        if (event.kind == EventKind::least_squares) {
            c_max = 0.0;
        } else {
            c_max = 0.0;
            for (Index j : active) c_max += c[j];
            c_max = active.empty() ? c.maxCoeff() : c_max / static_cast<double>(active.size());
        }
        path.append(ell, beta, direction.support, event, c_max);

        if (event.kind == EventKind::least_squares) {
            path.termination = interpolates ? Termination::zero_residual : Termination::complete;
            break;
        }
        if (event.kind == EventKind::stop_bound) {
            path.termination = Termination::stop_bound;
            break;
        }
        if (interpolates) {
            path.termination = Termination::zero_residual;
            break;
        }
        if (event.kind == EventKind::join) add_ties();
    }
    return path;
}

KktReport kkt_certify(const ExpandedDesign& design, const Vector& beta, double lambda, double tolerance) {
    if (beta.size() != design.size()) throw ConfigError("kkt_certify: beta must have length 2p");
    if ((beta.array() < 0.0).any()) throw ConfigError("kkt_certify: beta must be non-negative");

    KktReport report;
    report.lambda = lambda;
    const double scale = std::max(1.0, design.correlations(design.response()).lpNorm<Eigen::Infinity>());
    report.tolerance = tolerance * scale;
    report.correlations = design.correlations(design.residual(beta));

    const Index dim = design.size();
    report.bound_violation = (report.correlations.array() - lambda).cwiseMax(0.0);
    report.support_violation = Vector::Zero(dim);
    for (Index j = 0; j < dim; ++j) {
        if (beta[j] > 0.0) report.support_violation[j] = std::abs(report.correlations[j] - lambda);
    }
    double worst = std::max(report.bound_violation.maxCoeff(), report.support_violation.maxCoeff());
    const Index p = design.p();
    for (Index j = 0; j < p; ++j) {
        if (lambda > 0.0 && beta[j] > 0.0 && beta[j + p] > 0.0) {
            report.pair_conflicts.push_back(j);
            worst = std::max(worst, std::min(beta[j], beta[j + p]));
        }
    }
    report.worst_violation = worst;
    report.pass = report.pair_conflicts.empty() && worst <= report.tolerance;
    return report;
}

}  // namespace monolasso
