#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mdpmat/errors.hpp"

namespace mdpmat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default tolerance when validating that a probability block sums to one.
inline constexpr double kSimplexTol = 1e-9;

/// Deviation below which a probability block is stored as-is instead of being
/// renormalized. Keeps construction idempotent so that write/parse round
/// trips are bit-exact.
inline constexpr double kRenormThreshold = 1e-13;

/**
 * A finite discounted MDP with a rectangular action space, held as dense
 * matrices that do not depend on any policy.
 *
 * The transition matrix has one row per state-action pair, indexed
 * (s, a) -> s * num_actions + a, and one column per successor state. Rewards
 * use the same row layout. Instances are immutable after construction and
 * safe to share across threads.
 */
class MdpInstance {
public:
    /**
     * Validates and stores the model. Probability rows (transitions and the
     * initial distribution) must be nonnegative and sum to one within tol;
     * rows are renormalized on construction when they deviate by more than
     * rounding noise.
     *
     * Throws DimensionMismatch, SimplexViolation, NonFiniteInput or
     * ConfigError (gamma outside [0, 1)).
     */
    MdpInstance(int num_states, int num_actions, Matrix transitions,
                Vector rewards, double gamma, Vector initial_distribution,
                double tol = kSimplexTol);

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    int num_state_actions() const { return num_states_ * num_actions_; }

    /// Flat row index of a state-action pair.
    int row_index(int state, int action) const {
        return state * num_actions_ + action;
    }

    /// Dynamics matrix, num_state_actions x num_states.
    const Matrix& transitions() const { return transitions_; }
    /// Expected immediate rewards, one entry per state-action pair.
    const Vector& rewards() const { return rewards_; }
    double gamma() const { return gamma_; }
    /// Initial state distribution, length num_states.
    const Vector& initial_distribution() const { return initial_distribution_; }

private:
    int num_states_;
    int num_actions_;
    Matrix transitions_;
    Vector rewards_;
    double gamma_;
    Vector initial_distribution_;
};

/**
 * A stationary stochastic policy in both of its equivalent layouts: the flat
 * vector of per-state action probabilities (same row indexing as the MDP
 * rewards) and the block-diagonal matrix that maps state-action vectors to
 * state vectors. Off-block entries of the matrix form are exactly zero.
 */
class Policy {
public:
    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }

    /// Flat probabilities, length num_states * num_actions.
    const Vector& probabilities() const { return probabilities_; }
    /// Block-diagonal matrix form, num_states x (num_states * num_actions).
    const Matrix& matrix() const { return matrix_; }

    double prob(int state, int action) const {
        return probabilities_[state * num_actions_ + action];
    }

    /// One state's action distribution as a view into the flat vector.
    auto block(int state) const {
        return probabilities_.segment(state * num_actions_, num_actions_);
    }

private:
    friend Policy build_policy_matrix(const Vector&, int, int, double);

    Policy(Vector probabilities, Matrix matrix, int num_states, int num_actions)
        : num_states_(num_states), num_actions_(num_actions),
          probabilities_(std::move(probabilities)), matrix_(std::move(matrix)) {}

    int num_states_;
    int num_actions_;
    Vector probabilities_;
    Matrix matrix_;
};

/**
 * The block-diagonal 0/1 matrix that sums state-action vectors over the
 * actions of each state; its transpose replicates a state vector across that
 * state's actions. Each row holds exactly num_actions ones, confined to the
 * row's own block.
 */
class Marginalizer {
public:
    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    /// num_states x (num_states * num_actions).
    const Matrix& matrix() const { return matrix_; }

private:
    friend Marginalizer build_marginalizer(int, int);

    Marginalizer(Matrix matrix, int num_states, int num_actions)
        : num_states_(num_states), num_actions_(num_actions),
          matrix_(std::move(matrix)) {}

    int num_states_;
    int num_actions_;
    Matrix matrix_;
};

/**
 * Builds a Policy from the flat probability vector. Each state block must be
 * nonnegative and sum to one within tol; blocks are renormalized when they
 * deviate by more than rounding noise. Throws SimplexViolation otherwise.
 */
Policy build_policy_matrix(const Vector& probabilities, int num_states,
                           int num_actions, double tol = kSimplexTol);

Marginalizer build_marginalizer(int num_states, int num_actions);

/// The policy that picks uniformly among actions in every state.
Policy uniform_policy(int num_states, int num_actions);

/// The deterministic policy taking actions[s] in state s.
Policy deterministic_policy(const std::vector<int>& actions, int num_actions);

/**
 * State-to-state transition matrix of the chain induced by following the
 * policy, num_states x num_states. Every row sums to one.
 */
Matrix state_transition(const Policy& policy, const MdpInstance& mdp);

/**
 * State-action-to-state-action transition matrix of the induced chain,
 * num_state_actions square. Every row sums to one.
 */
Matrix state_action_transition(const MdpInstance& mdp, const Policy& policy);

} // namespace mdpmat
