#pragma once

#include <string>
#include <vector>

#include "mdpmat/surrogates.hpp"

namespace mdpmat {

/**
 * Penalized improvement objective for a candidate policy around a base
 * policy: surrogate 4 minus the theoretical penalty coefficient times the
 * maximum per-state KL(base || candidate). Maximizing it can never decrease
 * the true objective. Equals objective(base) when candidate == base; returns
 * -infinity when the KL is infinite.
 */
double majorization_value(const MdpInstance& mdp, const Policy& base,
                          const Policy& candidate);

struct ImproveConfig {
    /// Outer iterations; 0 just records the starting point.
    int max_iters = 500;
    /// Initial gradient-ascent step on the logits.
    double step_size = 1.0;
    /// Multiplier applied to the step while backtracking.
    double backtrack_factor = 0.5;
    int max_backtracks = 40;
    /// Step growth after a cleanly accepted iteration.
    double step_growth = 2.0;
    double max_step = 1e8;
    /// Stop when the objective gradient falls below this infinity norm.
    double grad_tol = 1e-9;
    /// Penalty-annealing multiplier applied between outer iterations, and the
    /// floor it decays toward. The exact majorization check on every accepted
    /// step keeps the improvement monotone regardless of the schedule.
    double penalty_anneal = 0.5;
    double penalty_floor = 1e-8;
};

struct ImprovementStep {
    int iteration = 0;
    double objective_value = 0.0;
    /// Maximum per-state KL from the previous policy.
    double kl_to_previous = 0.0;
    /// Penalized improvement objective of the accepted candidate.
    double majorization = 0.0;
    double step_size = 0.0;
};

struct ImprovementTrace {
    /// Entry 0 is the starting point; the objective column is nondecreasing.
    std::vector<ImprovementStep> steps;
    Policy final_policy;
    bool converged = false;
    std::string reason;
};

/**
 * Monotonic policy improvement over softmax logits: gradient ascent with a
 * backtracking line search that only accepts a candidate when the penalized
 * objective does not decrease AND the candidate's true objective is verified
 * to dominate the penalized value. The penalty starts at its theoretical
 * coefficient and is annealed toward a floor between iterations (the
 * theoretical value is far too conservative to make progress); the exact
 * per-step checks preserve the monotonicity guarantee under any schedule.
 */
ImprovementTrace improve(const MdpInstance& mdp, const Vector& initial_logits,
                         const ImproveConfig& config = {});

struct ValueIterationResult {
    Vector optimal_values;
    /// Greedy deterministic policy, ties broken toward the lowest action.
    Policy greedy_policy;
    int iterations = 0;
};

/**
 * Sup-norm value iteration to the fixed point of the optimality operator.
 * Iterates until the value change is at most tol*(1-gamma)/(2*gamma), which
 * brings the values within tol of optimal.
 */
ValueIterationResult value_iteration_oracle(const MdpInstance& mdp,
                                            double tol = 1e-10);

/**
 * Central finite differences of the objective through the softmax map,
 * coordinate by coordinate. Verification-only companion to the analytic
 * gradients.
 */
Vector finite_difference_gradient(const MdpInstance& mdp, const Vector& logits,
                                  double step);

} // namespace mdpmat
