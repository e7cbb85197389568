#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "monolasso/data.hpp"
#include "monolasso/lars.hpp"
#include "monolasso/loss.hpp"

namespace monolasso {

struct StagewiseConfig {
    double epsilon = 0.01;
    long max_iterations = 1'000'000;
    /// Stop once the largest (absolute) correlation is at or below this value.
    /// Defaults to 1e-8 * ||y||.
    std::optional<double> stop_correlation_tolerance;
    /// Keep every k-th vertex; steps that bring in a new coordinate and the final
    /// step are always kept.
    int record_stride = 1;
};

struct StagewiseResult {
    PiecewiseLinearPath path;
    long iterations = 0;
    /// Expanded coordinate incremented at each step (j for +x_j, p + j for -x_j).
    std::vector<Index> selections;
};

/// Incremental forward stagewise on signed coefficients: bump the most correlated
/// predictor by epsilon * sign(correlation). Ties go to the lowest predictor index.
/// Vertices store the accumulated positive and negative increments in 2p-space.
///
/// The run also ends when the chosen move would exactly undo the previous one; past
/// that point the iteration only cycles at the epsilon resolution.
StagewiseResult fs_epsilon(const StandardizedDesign& design, const StagewiseConfig& config);

/// The same procedure posed on [X : -X] with non-negative increments only. Step for
/// step identical to fs_epsilon after collapsing.
StagewiseResult monotone_incremental(const ExpandedDesign& design, const StagewiseConfig& config);

/// Response that the loss is evaluated against: centered y for squared error, the raw
/// 0/1 response for logistic (fitted without intercept).
Vector default_response(const ExpandedDesign& design, const LossModel& loss);

/// Epsilon-stepping on the largest negative gradient element -dL/dbeta_j for any loss.
StagewiseResult generalized_monotone_incremental(const ExpandedDesign& design, const Vector& response,
                                                 const LossModel& loss, const StagewiseConfig& config);

/// Loss-aware monotone direction: weighted non-negative least squares of the active
/// columns on -u/W with weights W, normalized to unit sum.
MoveDirection glm_move_direction(const ExpandedDesign& design, const Vector& beta, const Vector& response,
                                 const LossModel& loss, double tie_tolerance = 1e-9);

struct StepControl {
    double step = 0.01;
    /// Halving stops (and the run fails) below this step length.
    double min_step = 1e-12;
    double arc_budget = std::numeric_limits<double>::infinity();
    long max_steps = 1'000'000;
    /// Converged once max(-X~'u) falls below this fraction of its starting value.
    double gradient_tolerance = 1e-7;
    /// Allowed loss increase per step, relative to max(1, |L|).
    double loss_slack = 1e-12;
    int record_stride = 1;
};

struct IntegrationResult {
    PiecewiseLinearPath path;
    long steps = 0;
    long halvings = 0;
    std::vector<double> losses;  ///< loss at each recorded vertex
};

/// Explicit Euler integration of d beta / d ell = glm_move_direction(beta) in arc-length.
IntegrationResult integrate_monotone_path(const ExpandedDesign& design, const Vector& response,
                                          const LossModel& loss, const StepControl& control);

}  // namespace monolasso
