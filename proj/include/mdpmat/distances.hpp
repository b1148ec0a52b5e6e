#pragma once

#include "mdpmat/mdp.hpp"

namespace mdpmat {

/**
 * Total variation distance between two discrete distributions: half the
 * 1-norm of their difference. Always in [0, 1]. Throws DimensionMismatch or
 * SimplexViolation on invalid inputs.
 */
double tv_distance(const Vector& p, const Vector& q, double tol = kSimplexTol);

/**
 * Kullback-Leibler divergence KL(p || q) in nats, with 0*log(0/q) = 0.
 * Returns +infinity when q assigns zero mass where p does not, so sweeps
 * over degenerate pairs can skip instead of failing.
 */
double kl_divergence(const Vector& p, const Vector& q, double tol = kSimplexTol);

/// Per-state divergences between two policies plus their maxima over states.
struct PolicyDivergenceReport {
    Vector tv_per_state;
    /// KL(base(.|s) || other(.|s)) per state.
    Vector kl_per_state;
    /// KL(other(.|s) || base(.|s)) per state; KL is not symmetric, so both
    /// directions are reported.
    Vector kl_reverse_per_state;
    double tv_max = 0.0;
    double kl_max = 0.0;
    double kl_reverse_max = 0.0;
};

PolicyDivergenceReport max_divergences(const Policy& base, const Policy& other);

} // namespace mdpmat
