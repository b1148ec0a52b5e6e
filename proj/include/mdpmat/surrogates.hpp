#pragma once

#include <array>

#include "mdpmat/evaluation.hpp"
#include "mdpmat/policy_parameterization.hpp"

namespace mdpmat {

/**
 * Exact gap between the objectives of two policies, computed by pushing the
 * base policy's advantages through the target policy's discounted occupancy:
 * objective(target) = objective(base) + advantage_flow(base, target).
 * Zero when the policies coincide.
 */
double advantage_flow(const MdpInstance& mdp, const Policy& base,
                      const Policy& target);

/**
 * The six local approximations of the target policy's objective around a
 * base policy. Each index freezes a different subset of the target-policy
 * occurrences in the exact gap identity:
 *
 *   1 - both the occupancy and the action mixture follow the target (exact);
 *   2 - the outer action mixture stays at the base;
 *   3 - the occupancy kernel stays at the base;
 *   4 - the visitation weights stay at the base (the classic trust-region
 *       surrogate, linear in the target policy);
 *   5 - the action mixture stays at the base inside the target occupancy,
 *       which annihilates the advantages: collapses to objective(base);
 *   6 - everything stays at the base: collapses to objective(base).
 *
 * Every variant is evaluated through its own linear solve; the collapses for
 * 1, 5 and 6 are consequences, not shortcuts taken by the code.
 */
double surrogate_value(int index, const MdpInstance& mdp, const Policy& base,
                       const Policy& target);

/**
 * Analytic gradient of surrogate 2, 3 or 4 with respect to the logits, taken
 * at the parameterized policy itself (target == base). The matrix-level
 * gradient is a rank-one outer product of the advantages with a
 * state-weighting vector; it is contracted with the softmax Jacobian block by
 * block. Gradients 2 and 3 sum to gradient 4, which equals the gradient of
 * the objective.
 */
Vector surrogate_gradient(int index, const MdpInstance& mdp,
                          const ParameterizedPolicy& pp);

/// Values, approximation errors and error-bound certificates for one policy
/// pair.
struct SurrogateReport {
    /// values[k-1] holds surrogate k.
    std::array<double, 6> values{};
    double eta_base = 0.0;
    double eta_target = 0.0;

    /// |eta_target - surrogate k| for k = 2, 3, 4.
    std::array<double, 3> approx_errors{};
    /// Certified right-hand sides for those errors, driven by the maximum
    /// per-state KL between the policies and the 1-norm of the advantages.
    std::array<double, 3> error_bounds{};
    /// Whether each measured error is within its bound (diagnostic for finite
    /// perturbations; the bounds are derived in the infinitesimal limit).
    std::array<bool, 3> bound_holds{};

    /// Penalized lower bound on eta_target: surrogate 4 minus
    /// penalty_coefficient times the maximum per-state KL. This one is a
    /// rigorous inequality.
    double trpo_bound_rhs = 0.0;
    bool trpo_holds = false;

    double tv_max = 0.0;
    /// Maximum per-state KL(base || target); infinite when the target lacks
    /// support somewhere the base has mass.
    double kl_max = 0.0;
    double advantage_l1 = 0.0;
    double advantage_max = 0.0;
    /// 4 * advantage_max * gamma / (1-gamma)^2.
    double penalty_coefficient = 0.0;
    /// True when kl_max is infinite and the KL-driven bounds say nothing.
    bool bounds_vacuous = false;
};

/// Slack used when flagging the rigorous penalized bound.
inline constexpr double kTrpoBoundSlack = 1e-9;

/**
 * Evaluates all six surrogates for the pair, measures the approximation
 * errors of 2..4 against the exact target objective, and checks them against
 * their certified bounds. Infinite divergences are flagged vacuous rather
 * than raised.
 */
SurrogateReport bound_report(const MdpInstance& mdp, const Policy& base,
                             const Policy& target);

} // namespace mdpmat
