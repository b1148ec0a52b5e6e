#include "mdpmat/optimizer.hpp"

#include <cmath>
#include <limits>

#include "mdpmat/distances.hpp"

namespace mdpmat {

namespace {

double penalty_coefficient(double advantage_max, double gamma) {
    const double horizon = 1.0 / (1.0 - gamma);
    return 4.0 * advantage_max * gamma * horizon * horizon;
}

// Maximum per-state KL(base || candidate); both policies share dimensions.
double max_kl(const Policy& base, const Policy& candidate) {
    double worst = 0.0;
    for (int s = 0; s < base.num_states(); ++s)
        worst = std::max(worst, kl_divergence(base.block(s), candidate.block(s)));
    return worst;
}

} // namespace

double majorization_value(const MdpInstance& mdp, const Policy& base,
                          const Policy& candidate) {
    const double kl = max_kl(base, candidate);
    if (!std::isfinite(kl))
        return -std::numeric_limits<double>::infinity();
    const Vector adv = advantage(mdp, base);
    const double coeff =
        penalty_coefficient(adv.lpNorm<Eigen::Infinity>(), mdp.gamma());
    return surrogate_value(4, mdp, base, candidate) - coeff * kl;
}

ImprovementTrace improve(const MdpInstance& mdp, const Vector& initial_logits,
                         const ImproveConfig& config) {
    if (config.max_iters < 0)
        throw ConfigError("max_iters must be nonnegative");
    if (config.step_size <= 0.0 || config.backtrack_factor <= 0.0 ||
        config.backtrack_factor >= 1.0 || config.max_backtracks < 1 ||
        config.step_growth < 1.0 || config.grad_tol < 0.0 ||
        config.penalty_anneal <= 0.0 || config.penalty_anneal > 1.0 ||
        config.penalty_floor <= 0.0)
        throw ConfigError("improve configuration out of range");
    if (!initial_logits.allFinite())
        throw NonFiniteInput("initial logits must be finite");

    // Comparisons between exactly computed objectives; keeps the accepted
    // trace nondecreasing well inside the 1e-12 documented slack.
    constexpr double kAcceptSlack = 1e-13;

    Vector logits = initial_logits;
    ParameterizedPolicy current(logits, mdp.num_states(), mdp.num_actions());
    EvaluationResult eval = evaluate(mdp, current.policy());

    std::vector<ImprovementStep> steps;
    steps.push_back({0, eval.objective_value, 0.0, eval.objective_value, 0.0});

    double step = config.step_size;
    double penalty_scale = 1.0;
    bool converged = false;
    std::string reason = "max_iterations";
    int plateau_streak = 0;

    for (int iter = 1; iter <= config.max_iters; ++iter) {
        const Vector grad = surrogate_gradient(4, mdp, current);
        if (grad.lpNorm<Eigen::Infinity>() <= config.grad_tol) {
            converged = true;
            reason = "gradient_tolerance";
            break;
        }

        const double coeff = penalty_coefficient(
            eval.advantages.lpNorm<Eigen::Infinity>(), mdp.gamma());
        const double effective_penalty = coeff * penalty_scale;
        const double eta_base = eval.objective_value;

        bool accepted = false;
        bool accepted_majorizes = false;
        double trial = step;
        for (int bt = 0; bt < config.max_backtracks && !accepted; ++bt) {
            const Vector trial_logits = logits + trial * grad;
            ParameterizedPolicy candidate(trial_logits, mdp.num_states(),
                                          mdp.num_actions());
            const double kl = max_kl(current.policy(), candidate.policy());
            const double l4 = eta_base + eval.visitation.dot(
                                             candidate.policy().matrix() *
                                             eval.advantages);
            const double m_candidate = l4 - effective_penalty * kl;
            const double eta_candidate = objective(mdp, candidate.policy());

            // The penalized objective may not decrease, and the candidate's
            // exactly evaluated objective may not decrease either; the latter
            // keeps the trace monotone under any penalty schedule.
            const bool m_ok = m_candidate >= eta_base - kAcceptSlack;
            const bool eta_ok = eta_candidate >= eta_base - kAcceptSlack;
            if (m_ok && eta_ok) {
                accepted_majorizes = eta_candidate >= m_candidate - kAcceptSlack;
                logits = trial_logits;
                current = std::move(candidate);
                eval = evaluate(mdp, current.policy());
                steps.push_back(
                    {iter, eval.objective_value, kl, m_candidate, trial});
                if (bt == 0)
                    step = std::min(trial * config.step_growth, config.max_step);
                else
                    step = trial;
                accepted = true;
            } else {
                trial *= config.backtrack_factor;
            }
        }

        if (!accepted) {
            converged = false;
            reason = "step_stalled";
            break;
        }

        // Anneal only while the accepted step still satisfied the penalized
        // lower bound at the annealed coefficient; otherwise back off toward
        // the theoretical penalty.
        if (accepted_majorizes)
            penalty_scale = std::max(penalty_scale * config.penalty_anneal,
                                     config.penalty_floor);
        else
            penalty_scale = std::min(1.0, penalty_scale / config.penalty_anneal);

        const double gain = steps.back().objective_value -
                            steps[steps.size() - 2].objective_value;
        if (gain <= 1e-14 * (1.0 + std::abs(eta_base))) {
            if (++plateau_streak >= 5) {
                converged = true;
                reason = "objective_plateau";
                break;
            }
        } else {
            plateau_streak = 0;
        }
    }

    return ImprovementTrace{std::move(steps), current.policy(), converged,
                            std::move(reason)};
}

ValueIterationResult value_iteration_oracle(const MdpInstance& mdp,
                                            double tol) {
    if (tol <= 0.0)
        throw ConfigError("value-iteration tolerance must be positive");
    const double gamma = mdp.gamma();
    const int num_states = mdp.num_states();
    const int num_actions = mdp.num_actions();
    const double threshold =
        gamma > 0.0 ? tol * (1.0 - gamma) / (2.0 * gamma) : tol;

    Vector values = Vector::Zero(num_states);
    Vector next(num_states);
    int iterations = 0;
    while (true) {
        const Vector backup =
            mdp.rewards() + gamma * (mdp.transitions() * values);
        for (int s = 0; s < num_states; ++s)
            next[s] = backup.segment(s * num_actions, num_actions).maxCoeff();
        ++iterations;
        const double delta = (next - values).lpNorm<Eigen::Infinity>();
        values = next;
        if (delta <= threshold)
            break;
    }

    const Vector backup = mdp.rewards() + gamma * (mdp.transitions() * values);
    std::vector<int> greedy(num_states, 0);
    for (int s = 0; s < num_states; ++s) {
        int best = 0;
        for (int a = 1; a < num_actions; ++a)
            if (backup[s * num_actions + a] > backup[s * num_actions + best])
                best = a; // strict comparison keeps the lowest index on ties
        greedy[s] = best;
    }
    return ValueIterationResult{std::move(values),
                                deterministic_policy(greedy, num_actions),
                                iterations};
}

Vector finite_difference_gradient(const MdpInstance& mdp, const Vector& logits,
                                  double step) {
    if (step <= 0.0)
        throw ConfigError("finite-difference step must be positive");
    if (!logits.allFinite())
        throw NonFiniteInput("logits must be finite");
    const int num_states = mdp.num_states();
    const int num_actions = mdp.num_actions();
    Vector grad(logits.size());
    Vector probe = logits;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        probe[i] = logits[i] + step;
        const double up =
            objective(mdp, softmax_policy(probe, num_states, num_actions));
        probe[i] = logits[i] - step;
        const double down =
            objective(mdp, softmax_policy(probe, num_states, num_actions));
        probe[i] = logits[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

} // namespace mdpmat
