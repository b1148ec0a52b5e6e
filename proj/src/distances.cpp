#include "mdpmat/distances.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mdpmat {

namespace {

void check_distribution(const Vector& p, double tol, const char* name) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]))
            throw NonFiniteInput(std::string(name) + " has a non-finite entry");
        if (p[i] < -tol)
            throw SimplexViolation(std::string(name) + " has negative entry " +
                                   std::to_string(p[i]));
    }
    if (std::abs(p.sum() - 1.0) > tol)
        throw SimplexViolation(std::string(name) + " does not sum to 1");
}

} // namespace

double tv_distance(const Vector& p, const Vector& q, double tol) {
    if (p.size() != q.size())
        throw DimensionMismatch("distributions have different lengths");
    check_distribution(p, tol, "first distribution");
    check_distribution(q, tol, "second distribution");
    return 0.5 * (p - q).lpNorm<1>();
}

double kl_divergence(const Vector& p, const Vector& q, double tol) {
    if (p.size() != q.size())
        throw DimensionMismatch("distributions have different lengths");
    check_distribution(p, tol, "first distribution");
    check_distribution(q, tol, "second distribution");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0)
            continue;
        if (q[i] <= 0.0)
            return std::numeric_limits<double>::infinity();
        sum += p[i] * std::log(p[i] / q[i]);
    }
    return sum;
}

PolicyDivergenceReport max_divergences(const Policy& base, const Policy& other) {
    if (base.num_states() != other.num_states() ||
        base.num_actions() != other.num_actions())
        throw DimensionMismatch("policies have different dimensions");
    const int n = base.num_states();
    PolicyDivergenceReport report;
    report.tv_per_state.resize(n);
    report.kl_per_state.resize(n);
    report.kl_reverse_per_state.resize(n);
    for (int s = 0; s < n; ++s) {
        const Vector p = base.block(s);
        const Vector q = other.block(s);
        report.tv_per_state[s] = tv_distance(p, q);
        report.kl_per_state[s] = kl_divergence(p, q);
        report.kl_reverse_per_state[s] = kl_divergence(q, p);
    }
    report.tv_max = report.tv_per_state.maxCoeff();
    report.kl_max = report.kl_per_state.maxCoeff();
    report.kl_reverse_max = report.kl_reverse_per_state.maxCoeff();
    return report;
}

} // namespace mdpmat
