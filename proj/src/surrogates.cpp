#include "mdpmat/surrogates.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mdpmat/distances.hpp"

namespace mdpmat {

namespace {

void check_pair(const MdpInstance& mdp, const Policy& base,
                const Policy& target) {
    if (base.num_states() != mdp.num_states() ||
        base.num_actions() != mdp.num_actions() ||
        target.num_states() != mdp.num_states() ||
        target.num_actions() != mdp.num_actions())
        throw DimensionMismatch("policy pair does not match the MDP");
}

// rho0^T (I - gamma * state_kernel(policy))^{-1}, the visitation row vector
// of the given policy.
Vector occupancy_weights(const MdpInstance& mdp, const Policy& policy) {
    return solve_discounted_transposed(state_transition(policy, mdp),
                                       mdp.gamma(), mdp.initial_distribution());
}

} // namespace

double advantage_flow(const MdpInstance& mdp, const Policy& base,
                      const Policy& target) {
    check_pair(mdp, base, target);
    const Vector adv = advantage(mdp, base);
    return occupancy_weights(mdp, target).dot(target.matrix() * adv);
}

double surrogate_value(int index, const MdpInstance& mdp, const Policy& base,
                       const Policy& target) {
    check_pair(mdp, base, target);
    const double eta_base = objective(mdp, base);
    const Vector adv = advantage(mdp, base);
    const double gamma = mdp.gamma();
    const Vector& rho0 = mdp.initial_distribution();

    switch (index) {
    case 1:
        return eta_base + occupancy_weights(mdp, target).dot(target.matrix() * adv);
    case 2: {
        const Vector flowed = solve_discounted(
            state_action_transition(mdp, target), gamma, adv);
        return eta_base + rho0.dot(base.matrix() * flowed);
    }
    case 3: {
        const Vector flowed = solve_discounted(
            state_action_transition(mdp, base), gamma, adv);
        return eta_base + rho0.dot(target.matrix() * flowed);
    }
    case 4:
        return eta_base + occupancy_weights(mdp, base).dot(target.matrix() * adv);
    case 5:
        return eta_base + occupancy_weights(mdp, target).dot(base.matrix() * adv);
    case 6: {
        const Vector flowed = solve_discounted(
            state_action_transition(mdp, base), gamma, adv);
        return eta_base + rho0.dot(base.matrix() * flowed);
    }
    default:
        throw ConfigError("surrogate index must be in 1..6, got " +
                          std::to_string(index));
    }
}

Vector surrogate_gradient(int index, const MdpInstance& mdp,
                          const ParameterizedPolicy& pp) {
    const Policy& base = pp.policy();
    check_pair(mdp, base, base);
    const Vector adv = advantage(mdp, base);
    const double gamma = mdp.gamma();
    const Vector& rho0 = mdp.initial_distribution();
    const Matrix kernel = state_transition(base, mdp);

    // State-weighting vector of the rank-one matrix-level gradient
    // (advantages outer weights). Variant 4 weights states by the base
    // visitation; 3 by the initial distribution only; 2 by the discounted
    // tail that separates them.
    Vector weights;
    switch (index) {
    case 2:
        weights = solve_discounted_transposed(kernel, gamma,
                                              gamma * (kernel.transpose() * rho0));
        break;
    case 3:
        weights = rho0;
        break;
    case 4:
        weights = solve_discounted_transposed(kernel, gamma, rho0);
        break;
    default:
        throw ConfigError("gradient is defined for surrogates 2..4, got " +
                          std::to_string(index));
    }

    const std::vector<Matrix> jac = softmax_jacobian(pp);
    const int num_actions = pp.num_actions();
    Vector grad(pp.logits().size());
    for (int s = 0; s < pp.num_states(); ++s) {
        const Vector adv_block = adv.segment(s * num_actions, num_actions);
        grad.segment(s * num_actions, num_actions) =
            jac[s].transpose() * (weights[s] * adv_block);
    }
    return grad;
}

SurrogateReport bound_report(const MdpInstance& mdp, const Policy& base,
                             const Policy& target) {
    check_pair(mdp, base, target);
    SurrogateReport report;
    for (int k = 1; k <= 6; ++k)
        report.values[k - 1] = surrogate_value(k, mdp, base, target);
    report.eta_base = objective(mdp, base);
    report.eta_target = objective(mdp, target);

    const Vector adv = advantage(mdp, base);
    report.advantage_l1 = adv.lpNorm<1>();
    report.advantage_max = adv.lpNorm<Eigen::Infinity>();

    const PolicyDivergenceReport div = max_divergences(base, target);
    report.tv_max = div.tv_max;
    report.kl_max = div.kl_max;
    report.bounds_vacuous = !std::isfinite(div.kl_max);

    const double gamma = mdp.gamma();
    const double horizon = 1.0 / (1.0 - gamma);
    const double kl_step = std::sqrt(2.0 * report.kl_max);
    report.error_bounds = {
        kl_step * horizon * report.advantage_l1,
        gamma * kl_step * horizon * report.advantage_l1,
        2.0 * gamma * report.kl_max * horizon * horizon * report.advantage_l1,
    };
    for (int i = 0; i < 3; ++i) {
        report.approx_errors[i] =
            std::abs(report.eta_target - report.values[i + 1]);
        report.bound_holds[i] =
            report.approx_errors[i] <= report.error_bounds[i] + 1e-12;
    }

    report.penalty_coefficient =
        4.0 * report.advantage_max * gamma * horizon * horizon;
    if (report.bounds_vacuous) {
        report.trpo_bound_rhs = -std::numeric_limits<double>::infinity();
        report.trpo_holds = true;
    } else {
        report.trpo_bound_rhs =
            report.values[3] - report.penalty_coefficient * report.kl_max;
        report.trpo_holds =
            report.eta_target >= report.trpo_bound_rhs - kTrpoBoundSlack;
    }
    return report;
}

} // namespace mdpmat
