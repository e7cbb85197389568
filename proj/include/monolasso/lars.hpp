#pragma once

#include <optional>
#include <vector>

#include "monolasso/data.hpp"
#include "monolasso/errors.hpp"

namespace monolasso {

enum class PathMode { lar, lasso, fs0 };

const char* to_string(PathMode mode);
PathMode parse_path_mode(const std::string& name);

struct SolverConfig {
    PathMode mode = PathMode::lasso;
    /// Correlations within this fraction of the maximum count as tied.
    double tie_tolerance = 1e-9;
    /// 0 picks a budget proportional to 2p + N.
    int max_steps = 0;
    std::optional<double> stop_l1_norm;
    std::optional<double> stop_lambda;
};

/// Unit-L1 direction of motion in 2p-space.
struct MoveDirection {
    Vector rho;
    /// Expanded indices carrying nonzero weight.
    std::vector<Index> support;

    bool is_zero() const { return support.empty(); }
};

/// Least-squares move of the residual on the maximally correlated expanded columns.
MoveDirection lasso_move_direction(const ExpandedDesign& design, const Vector& beta,
                                   double tie_tolerance = 1e-9);

/// Non-negative least-squares move on the same active set; columns whose NNLS
/// coefficient is zero drop out of the support.
MoveDirection monotone_move_direction(const ExpandedDesign& design, const Vector& beta,
                                      double tie_tolerance = 1e-9);

/// First breakpoint met when moving from beta along direction (beta + gamma * rho).
PathEvent next_event(const ExpandedDesign& design, const Vector& beta, const MoveDirection& direction,
                     PathMode mode, double tie_tolerance = 1e-9);

/// Raised when max_steps is exceeded; carries the path computed so far.
struct StepBudgetError : SolverError {
    StepBudgetError(const std::string& what, PiecewiseLinearPath partial)
        : SolverError(what), partial(std::move(partial)) {}
    PiecewiseLinearPath partial;
};

/// Exact piecewise-linear path. lar and lasso are indexed by sum(rho) (the L1 norm for
/// lasso), fs0 by L1 arc-length. Vertex lambdas hold the maximal correlation.
PiecewiseLinearPath solve_path(const ExpandedDesign& design, const SolverConfig& config = {});

struct KktReport {
    double lambda = 0.0;
    double tolerance = 0.0;       ///< absolute tolerance actually applied
    Vector correlations;          ///< X~' r
    Vector bound_violation;       ///< max(0, c_j - lambda)
    Vector support_violation;     ///< |c_j - lambda| where beta_j > 0, else 0
    std::vector<Index> pair_conflicts;  ///< base indices with both halves positive
    double worst_violation = 0.0;
    bool pass = false;
};

/// Lasso optimality conditions in expanded space at (beta, lambda). The tolerance is
/// relative to max(1, ||X~' y||_inf).
KktReport kkt_certify(const ExpandedDesign& design, const Vector& beta, double lambda,
                      double tolerance = 1e-8);

}  // namespace monolasso
