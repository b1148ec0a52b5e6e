#pragma once

#include <optional>

#include "mdpmat/mdp.hpp"

namespace mdpmat {

/// Tolerances for the exact-evaluation solvers.
struct EvalOptions {
    /// Maximum allowed infinity-norm residual of a linear solve.
    double solve_residual_tol = 1e-9;
    /// Singular values of the shifted chain below this count as zero when
    /// deciding whether the stationary distribution is unique.
    double uniqueness_tol = 1e-8;
};

/// Everything exact evaluation produces for one (MDP, policy) pair.
struct EvaluationResult {
    /// State values, length num_states.
    Vector state_values;
    /// State-action values, same layout as the reward vector.
    Vector action_values;
    /// Advantages: action value minus the owning state's value.
    Vector advantages;
    /// Expected discounted return from the initial distribution.
    double objective_value = 0.0;
    /// Discounted state-visitation frequencies; entries sum to 1/(1-gamma).
    Vector visitation;
};

/**
 * Solves (I - gamma * kernel) x = rhs by dense LU with partial pivoting and
 * verifies the residual. The kernel must be square and row-stochastic (or a
 * product of such), which makes the system nonsingular for gamma < 1.
 * Throws SingularSystem when the solution is non-finite or the residual
 * exceeds the tolerance.
 */
Vector solve_discounted(const Matrix& kernel, double gamma, const Vector& rhs,
                        double residual_tol = 1e-9);

/// Same system with the operator transposed: solves (I - gamma*kernel)^T x = rhs.
Vector solve_discounted_transposed(const Matrix& kernel, double gamma,
                                   const Vector& rhs,
                                   double residual_tol = 1e-9);

/**
 * State values of the policy, from the matrix Bellman equation solved as one
 * dense linear system.
 */
Vector value_function(const MdpInstance& mdp, const Policy& policy,
                      const EvalOptions& options = {});

/// State-action values: immediate reward plus discounted successor values.
Vector q_function(const MdpInstance& mdp, const Policy& policy,
                  const EvalOptions& options = {});

/**
 * Advantages of every state-action pair. Averaging a state's advantages
 * under the policy gives zero.
 */
Vector advantage(const MdpInstance& mdp, const Policy& policy,
                 const EvalOptions& options = {});

/// Expected discounted return from the initial distribution.
double objective(const MdpInstance& mdp, const Policy& policy,
                 const EvalOptions& options = {});

/**
 * Discounted state-visitation frequencies under the policy, from the
 * transposed resolvent system. Entries are nonnegative and sum to
 * 1/(1-gamma).
 */
Vector visitation(const MdpInstance& mdp, const Policy& policy,
                  const EvalOptions& options = {});

/**
 * Stationary distribution of the induced state chain, when it is unique.
 * Computed as the null space of the shifted transposed chain via SVD;
 * returns nullopt when the eigenvalue-1 eigenspace has dimension greater
 * than one at the uniqueness tolerance (reducible chains).
 */
std::optional<Vector> stationary_distribution(const MdpInstance& mdp,
                                              const Policy& policy,
                                              const EvalOptions& options = {});

/// Bundles all of the above (except the stationary diagnostic) in one pass.
EvaluationResult evaluate(const MdpInstance& mdp, const Policy& policy,
                          const EvalOptions& options = {});

} // namespace mdpmat
