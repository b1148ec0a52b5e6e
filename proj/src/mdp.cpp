#include "mdpmat/mdp.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace mdpmat {

namespace {

// Validates one probability block in-place: nonnegative within tol, sum 1
// within tol. Renormalizes unless the sum is already within rounding noise
// of 1, so that re-validating stored data leaves it untouched.
template <typename Block>
void validate_simplex_block(Block block, double tol, const std::string& what) {
    for (Eigen::Index i = 0; i < block.size(); ++i) {
        const double v = block[i];
        if (!std::isfinite(v))
            throw NonFiniteInput(what + " has a non-finite entry");
        if (v < -tol)
            throw SimplexViolation(what + " has negative entry " +
                                   std::to_string(v));
    }
    const double sum = block.sum();
    if (std::abs(sum - 1.0) > tol)
        throw SimplexViolation(what + " sums to " + std::to_string(sum) +
                               ", expected 1");
    if (std::abs(sum - 1.0) > kRenormThreshold) {
        for (Eigen::Index i = 0; i < block.size(); ++i)
            block[i] = std::max(block[i], 0.0);
        block /= block.sum();
    }
}

} // namespace

MdpInstance::MdpInstance(int num_states, int num_actions, Matrix transitions,
                         Vector rewards, double gamma,
                         Vector initial_distribution, double tol)
    : num_states_(num_states), num_actions_(num_actions),
      transitions_(std::move(transitions)), rewards_(std::move(rewards)),
      gamma_(gamma), initial_distribution_(std::move(initial_distribution)) {
    if (num_states_ <= 0 || num_actions_ <= 0)
        throw DimensionMismatch("state and action counts must be positive");
    const int rows = num_state_actions();
    if (transitions_.rows() != rows || transitions_.cols() != num_states_)
        throw DimensionMismatch(
            "transition matrix must be " + std::to_string(rows) + "x" +
            std::to_string(num_states_) + ", got " +
            std::to_string(transitions_.rows()) + "x" +
            std::to_string(transitions_.cols()));
    if (rewards_.size() != rows)
        throw DimensionMismatch("reward vector must have length " +
                                std::to_string(rows));
    if (!rewards_.allFinite())
        throw NonFiniteInput("reward vector has a non-finite entry");
    // gamma < 1 strictly keeps every discounted operator invertible.
    if (!(gamma_ >= 0.0 && gamma_ < 1.0))
        throw ConfigError("gamma must lie in [0, 1), got " +
                          std::to_string(gamma_));
    if (initial_distribution_.size() != num_states_)
        throw DimensionMismatch("initial distribution must have length " +
                                std::to_string(num_states_));

    for (int row = 0; row < rows; ++row) {
        const int state = row / num_actions_;
        const int action = row % num_actions_;
        validate_simplex_block(transitions_.row(row), tol,
                               "transition row " + std::to_string(row) +
                                   " (state " + std::to_string(state) +
                                   ", action " + std::to_string(action) + ")");
    }
    validate_simplex_block(initial_distribution_.head(num_states_), tol,
                           "initial distribution");
}

Policy build_policy_matrix(const Vector& probabilities, int num_states,
                           int num_actions, double tol) {
    if (num_states <= 0 || num_actions <= 0)
        throw DimensionMismatch("state and action counts must be positive");
    if (probabilities.size() !=
        static_cast<Eigen::Index>(num_states) * num_actions)
        throw DimensionMismatch(
            "policy vector must have length " +
            std::to_string(num_states * num_actions) + ", got " +
            std::to_string(probabilities.size()));

    Vector pi = probabilities;
    for (int s = 0; s < num_states; ++s)
        validate_simplex_block(pi.segment(s * num_actions, num_actions), tol,
                               "policy block for state " + std::to_string(s));

    Matrix block_diag = Matrix::Zero(num_states, pi.size());
    for (int s = 0; s < num_states; ++s)
        block_diag.row(s).segment(s * num_actions, num_actions) =
            pi.segment(s * num_actions, num_actions);

    return Policy(std::move(pi), std::move(block_diag), num_states,
                  num_actions);
}

Marginalizer build_marginalizer(int num_states, int num_actions) {
    if (num_states <= 0 || num_actions <= 0)
        throw DimensionMismatch("state and action counts must be positive");
    Matrix ones_blocks =
        Matrix::Zero(num_states, static_cast<Eigen::Index>(num_states) * num_actions);
    for (int s = 0; s < num_states; ++s)
        ones_blocks.row(s).segment(s * num_actions, num_actions).setOnes();
    return Marginalizer(std::move(ones_blocks), num_states, num_actions);
}

Policy uniform_policy(int num_states, int num_actions) {
    Vector pi = Vector::Constant(
        static_cast<Eigen::Index>(num_states) * num_actions, 1.0 / num_actions);
    return build_policy_matrix(pi, num_states, num_actions);
}

Policy deterministic_policy(const std::vector<int>& actions, int num_actions) {
    const int num_states = static_cast<int>(actions.size());
    if (num_states == 0)
        throw DimensionMismatch("need at least one state");
    Vector pi = Vector::Zero(static_cast<Eigen::Index>(num_states) * num_actions);
    for (int s = 0; s < num_states; ++s) {
        if (actions[s] < 0 || actions[s] >= num_actions)
            throw IndexOutOfRange("action " + std::to_string(actions[s]) +
                                  " out of range for state " +
                                  std::to_string(s));
        pi[s * num_actions + actions[s]] = 1.0;
    }
    return build_policy_matrix(pi, num_states, num_actions);
}

Matrix state_transition(const Policy& policy, const MdpInstance& mdp) {
    if (policy.num_states() != mdp.num_states() ||
        policy.num_actions() != mdp.num_actions())
        throw DimensionMismatch("policy and MDP dimensions disagree");
    return policy.matrix() * mdp.transitions();
}

Matrix state_action_transition(const MdpInstance& mdp, const Policy& policy) {
    if (policy.num_states() != mdp.num_states() ||
        policy.num_actions() != mdp.num_actions())
        throw DimensionMismatch("policy and MDP dimensions disagree");
    return mdp.transitions() * policy.matrix();
}

} // namespace mdpmat
