#pragma once

// Brute-force oracles used by the tests only. Every discounted inverse in the
// library is cross-checked here against its truncated geometric series, and
// the optimizer against independently computed fixed points. Nothing in this
// header calls the library solvers.

#include <cmath>
#include <vector>

#include "mdpmat/mdp.hpp"

namespace oracles {

using mdpmat::Matrix;
using mdpmat::MdpInstance;
using mdpmat::Policy;
using mdpmat::Vector;

/// Number of series terms needed so the truncated tail is below tail_tol.
inline int series_terms(double gamma, double tail_tol = 1e-12) {
    if (gamma <= 0.0)
        return 1;
    return static_cast<int>(std::ceil(std::log(tail_tol) / std::log(gamma))) + 1;
}

/// Truncated geometric series: sum_{i=0..terms} gamma^i kernel^i rhs.
inline Vector geometric_series(const Matrix& kernel, double gamma,
                               const Vector& rhs, int terms) {
    Vector powered = rhs;
    Vector sum = rhs;
    double weight = 1.0;
    for (int i = 1; i <= terms; ++i) {
        powered = kernel * powered;
        weight *= gamma;
        sum += weight * powered;
    }
    return sum;
}

/// State values by series summation over the induced state chain.
inline Vector value_series(const MdpInstance& mdp, const Policy& policy,
                           double tail_tol = 1e-12) {
    const Matrix kernel = policy.matrix() * mdp.transitions();
    const Vector rewards = policy.matrix() * mdp.rewards();
    return geometric_series(kernel, mdp.gamma(), rewards,
                            series_terms(mdp.gamma(), tail_tol));
}

/// State-action values by series summation over the state-action chain.
inline Vector q_series(const MdpInstance& mdp, const Policy& policy,
                       double tail_tol = 1e-12) {
    const Matrix kernel = mdp.transitions() * policy.matrix();
    return geometric_series(kernel, mdp.gamma(), mdp.rewards(),
                            series_terms(mdp.gamma(), tail_tol));
}

/// Discounted visitation frequencies by series summation.
inline Vector visitation_series(const MdpInstance& mdp, const Policy& policy,
                                double tail_tol = 1e-12) {
    const Matrix kernel_t =
        (policy.matrix() * mdp.transitions()).transpose().eval();
    return geometric_series(kernel_t, mdp.gamma(), mdp.initial_distribution(),
                            series_terms(mdp.gamma(), tail_tol));
}

/// Left fixed vector of the state chain by repeated multiplication. Converges
/// for aperiodic chains; the caller picks instances accordingly.
inline Vector power_iteration_stationary(const Matrix& kernel, int iters = 20000) {
    Vector mu = Vector::Constant(kernel.rows(), 1.0 / kernel.rows());
    for (int i = 0; i < iters; ++i) {
        mu = kernel.transpose() * mu;
        mu /= mu.sum();
    }
    return mu;
}

/// Greedy policy iteration with series-based evaluation; exact optimum for
/// small instances, independent of the library's linear solver and of value
/// iteration.
inline std::pair<Vector, std::vector<int>> policy_iteration(
    const MdpInstance& mdp, double tail_tol = 1e-13) {
    const int num_states = mdp.num_states();
    const int num_actions = mdp.num_actions();
    std::vector<int> actions(num_states, 0);
    for (int round = 0; round < 1000; ++round) {
        const Policy policy = mdpmat::deterministic_policy(actions, num_actions);
        const Vector values = value_series(mdp, policy, tail_tol);
        const Vector backup =
            mdp.rewards() + mdp.gamma() * (mdp.transitions() * values);
        std::vector<int> next(num_states);
        for (int s = 0; s < num_states; ++s) {
            int best = 0;
            for (int a = 1; a < num_actions; ++a)
                if (backup[s * num_actions + a] >
                    backup[s * num_actions + best] + 1e-12)
                    best = a;
            next[s] = best;
        }
        if (next == actions)
            return {values, actions};
        actions = next;
    }
    return {value_series(mdp, mdpmat::deterministic_policy(actions, num_actions),
                         tail_tol),
            actions};
}

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(const std::vector<double>& x,
                            const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace oracles
