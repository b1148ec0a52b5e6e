#pragma once

#include <vector>

#include "mdpmat/mdp.hpp"

namespace mdpmat {

/**
 * Per-state softmax over unconstrained logits. Probabilities are strictly
 * positive, so every divergence between two parameterized policies stays
 * finite. Adding a constant to a state's block leaves the policy unchanged.
 * Throws NonFiniteInput on NaN/infinite logits.
 */
Policy softmax_policy(const Vector& logits, int num_states, int num_actions);

/**
 * An unconstrained parameterization of a policy: one logit per state-action
 * pair (same layout as the flat policy vector) with the softmax image cached.
 */
class ParameterizedPolicy {
public:
    ParameterizedPolicy(Vector logits, int num_states, int num_actions)
        : logits_(std::move(logits)),
          policy_(softmax_policy(logits_, num_states, num_actions)) {}

    const Vector& logits() const { return logits_; }
    const Policy& policy() const { return policy_; }
    int num_states() const { return policy_.num_states(); }
    int num_actions() const { return policy_.num_actions(); }

private:
    Vector logits_;
    Policy policy_;
};

/**
 * Derivative of the softmax policy with respect to its logits, one dense
 * block per state (the cross-state blocks are identically zero). Block s has
 * entry [a, a'] = d pi(a|s) / d logit(s,a') = pi(a|s) * (1[a==a'] - pi(a'|s)).
 * Every row and column of a block sums to zero, so all tangents conserve
 * probability mass.
 */
std::vector<Matrix> softmax_jacobian(const Vector& logits, int num_states,
                                     int num_actions);

inline std::vector<Matrix> softmax_jacobian(const ParameterizedPolicy& pp) {
    return softmax_jacobian(pp.logits(), pp.num_states(), pp.num_actions());
}

} // namespace mdpmat
