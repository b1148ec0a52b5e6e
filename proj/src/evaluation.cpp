#include "mdpmat/evaluation.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

namespace mdpmat {

namespace {

Vector solve_impl(const Matrix& system, const Vector& rhs, double residual_tol) {
    Eigen::PartialPivLU<Matrix> lu(system);
    Vector x = lu.solve(rhs);
    if (!x.allFinite())
        throw SingularSystem("discounted solve produced non-finite values");
    const double residual = (system * x - rhs).lpNorm<Eigen::Infinity>();
    const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
    if (residual > residual_tol * scale)
        throw SingularSystem("discounted solve residual " +
                             std::to_string(residual) + " exceeds tolerance");
    return x;
}

Matrix discounted_system(const Matrix& kernel, double gamma) {
    if (kernel.rows() != kernel.cols())
        throw DimensionMismatch("discounted kernel must be square");
    return Matrix::Identity(kernel.rows(), kernel.cols()) - gamma * kernel;
}

} // namespace

Vector solve_discounted(const Matrix& kernel, double gamma, const Vector& rhs,
                        double residual_tol) {
    return solve_impl(discounted_system(kernel, gamma), rhs, residual_tol);
}

Vector solve_discounted_transposed(const Matrix& kernel, double gamma,
                                   const Vector& rhs, double residual_tol) {
    return solve_impl(discounted_system(kernel, gamma).transpose().eval(), rhs,
                      residual_tol);
}

Vector value_function(const MdpInstance& mdp, const Policy& policy,
                      const EvalOptions& options) {
    const Matrix kernel = state_transition(policy, mdp);
    const Vector policy_rewards = policy.matrix() * mdp.rewards();
    return solve_discounted(kernel, mdp.gamma(), policy_rewards,
                            options.solve_residual_tol);
}

Vector q_function(const MdpInstance& mdp, const Policy& policy,
                  const EvalOptions& options) {
    const Vector values = value_function(mdp, policy, options);
    return mdp.rewards() + mdp.gamma() * (mdp.transitions() * values);
}

Vector advantage(const MdpInstance& mdp, const Policy& policy,
                 const EvalOptions& options) {
    const Vector values = value_function(mdp, policy, options);
    const Vector action_values =
        mdp.rewards() + mdp.gamma() * (mdp.transitions() * values);
    const Marginalizer marg =
        build_marginalizer(mdp.num_states(), mdp.num_actions());
    return action_values - marg.matrix().transpose() * values;
}

double objective(const MdpInstance& mdp, const Policy& policy,
                 const EvalOptions& options) {
    return mdp.initial_distribution().dot(value_function(mdp, policy, options));
}

Vector visitation(const MdpInstance& mdp, const Policy& policy,
                  const EvalOptions& options) {
    const Matrix kernel = state_transition(policy, mdp);
    Vector freq =
        solve_discounted_transposed(kernel, mdp.gamma(), mdp.initial_distribution(),
                                    options.solve_residual_tol);
    const double mass = freq.sum();
    const double expected = 1.0 / (1.0 - mdp.gamma());
    if (std::abs(mass - expected) > options.solve_residual_tol * expected)
        throw SingularSystem("visitation mass " + std::to_string(mass) +
                             " deviates from " + std::to_string(expected));
    for (Eigen::Index i = 0; i < freq.size(); ++i) {
        if (freq[i] < -1e-12)
            throw InternalError("visitation frequency " + std::to_string(i) +
                                " is negative: " + std::to_string(freq[i]));
        if (freq[i] < 0.0)
            freq[i] = 0.0;
    }
    return freq;
}

std::optional<Vector> stationary_distribution(const MdpInstance& mdp,
                                              const Policy& policy,
                                              const EvalOptions& options) {
    const Matrix kernel = state_transition(policy, mdp);
    const int n = mdp.num_states();
    const Matrix shifted = kernel.transpose() - Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
    const Vector& sigma = svd.singularValues();
    // A row-stochastic chain always has a fixed vector, so the smallest
    // singular value must be numerically zero.
    if (sigma[n - 1] > options.uniqueness_tol)
        throw InternalError("induced chain has no fixed distribution");
    if (n >= 2 && sigma[n - 2] <= options.uniqueness_tol)
        return std::nullopt; // fixed vector not unique
    Vector mu = svd.matrixV().col(n - 1);
    const double total = mu.sum();
    if (std::abs(total) <= options.uniqueness_tol)
        return std::nullopt;
    mu /= total;
    mu = mu.cwiseMax(0.0);
    mu /= mu.sum();
    return mu;
}

EvaluationResult evaluate(const MdpInstance& mdp, const Policy& policy,
                          const EvalOptions& options) {
    EvaluationResult result;
    result.state_values = value_function(mdp, policy, options);
    result.action_values =
        mdp.rewards() + mdp.gamma() * (mdp.transitions() * result.state_values);
    const Marginalizer marg =
        build_marginalizer(mdp.num_states(), mdp.num_actions());
    result.advantages =
        result.action_values - marg.matrix().transpose() * result.state_values;
    result.objective_value = mdp.initial_distribution().dot(result.state_values);
    result.visitation = visitation(mdp, policy, options);
    return result;
}

} // namespace mdpmat
