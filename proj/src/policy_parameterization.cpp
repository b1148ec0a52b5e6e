#include "mdpmat/policy_parameterization.hpp"

#include <cmath>

namespace mdpmat {

Policy softmax_policy(const Vector& logits, int num_states, int num_actions) {
    if (num_states <= 0 || num_actions <= 0)
        throw DimensionMismatch("state and action counts must be positive");
    if (logits.size() != static_cast<Eigen::Index>(num_states) * num_actions)
        throw DimensionMismatch("logit vector has wrong length");
    if (!logits.allFinite())
        throw NonFiniteInput("logits must be finite");

    Vector pi(logits.size());
    for (int s = 0; s < num_states; ++s) {
        auto block = logits.segment(s * num_actions, num_actions);
        const double shift = block.maxCoeff(); // keeps exp from overflowing
        Vector expd = (block.array() - shift).exp();
        pi.segment(s * num_actions, num_actions) = expd / expd.sum();
    }
    return build_policy_matrix(pi, num_states, num_actions);
}

std::vector<Matrix> softmax_jacobian(const Vector& logits, int num_states,
                                     int num_actions) {
    const Policy policy = softmax_policy(logits, num_states, num_actions);
    std::vector<Matrix> blocks;
    blocks.reserve(num_states);
    for (int s = 0; s < num_states; ++s) {
        const Vector p = policy.block(s);
        Matrix block = -(p * p.transpose());
        block.diagonal() += p;
        blocks.push_back(std::move(block));
    }
    return blocks;
}

} // namespace mdpmat
