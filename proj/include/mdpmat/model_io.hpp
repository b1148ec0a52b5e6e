#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdpmat/mdp.hpp"

namespace mdpmat {

/**
 * Mixes a base seed with a stream index into an independent 64-bit seed
 * (splitmix64 finalizer, applied twice). All batch commands derive their
 * per-instance seeds this way, so a single seed pins an entire sweep.
 */
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/**
 * A random dense MDP: each transition row is drawn uniformly from the
 * probability simplex (symmetric Dirichlet(1), realized as normalized
 * exponentials), rewards uniformly from [reward_min, reward_max], and the
 * initial distribution is uniform over states. Deterministic for a fixed
 * seed; the generator is mt19937_64 with inverse-CDF sampling, so the
 * contract is stable across runs.
 */
MdpInstance generate_random_mdp(std::uint64_t seed, int num_states,
                                int num_actions, double gamma,
                                double reward_min = 0.0,
                                double reward_max = 1.0);

/// A random policy with each state's distribution uniform on the simplex.
Policy generate_random_policy(std::uint64_t seed, int num_states,
                              int num_actions);

/// Random logits, uniform in [-scale, scale] per entry.
Vector generate_random_logits(std::uint64_t seed, int num_states,
                              int num_actions, double scale = 1.0);

/**
 * The canonical two-state, two-action instance used throughout the tests:
 * action 0 always moves to state 0, action 1 to state 1; staying where the
 * reward is (state 0 via action 0, state 1 via action 1) pays 1; gamma 0.5;
 * all initial mass on state 0.
 */
MdpInstance builtin_m1();

/**
 * Parses an MDP document (JSON object with format_version, num_states,
 * num_actions, gamma, transitions, rewards, initial_distribution). Unknown
 * keys are rejected. Throws ParseError for malformed documents or missing
 * fields and ValidationError (naming the offending row) for shape or simplex
 * violations.
 */
MdpInstance parse_mdp(const std::string& text);

/// Serializes an instance so that parse_mdp(write_mdp(m)) == m bit-exactly.
std::string write_mdp(const MdpInstance& mdp);

/// Policy documents mirror the MDP grammar: format_version, num_states,
/// num_actions, probabilities (flat vector).
Policy parse_policy(const std::string& text);
std::string write_policy(const Policy& policy);

/// One observed environment step.
struct TransitionSample {
    int state = 0;
    int action = 0;
    int next_state = 0;
};

/// Sample documents: format_version, num_states, num_actions, samples
/// (array of [state, action, next_state] triples).
std::vector<TransitionSample> parse_samples(const std::string& text,
                                            int& num_states, int& num_actions);
std::string write_samples(const std::vector<TransitionSample>& samples,
                          int num_states, int num_actions);

/// Empirical dynamics with per-row visit bookkeeping.
struct TransitionEstimate {
    /// Estimated transition matrix, same layout as MdpInstance::transitions.
    Matrix transitions;
    /// Rows with no observations; they are filled uniform.
    std::vector<bool> unvisited;
};

/**
 * Additively smoothed empirical transition frequencies:
 * (count(s,a,s') + smoothing) / (count(s,a) + smoothing * num_states).
 * Unvisited (s,a) rows are flagged and filled uniform. Throws IndexOutOfRange
 * on samples outside the declared dimensions.
 */
TransitionEstimate estimate_transitions(
    const std::vector<TransitionSample>& samples, int num_states,
    int num_actions, double smoothing = 0.0);

/**
 * Draws samples_per_pair next states from every (state, action) row of the
 * instance's true dynamics. Row-major order, deterministic per seed.
 */
std::vector<TransitionSample> sample_transitions(const MdpInstance& mdp,
                                                 std::uint64_t seed,
                                                 int samples_per_pair);

} // namespace mdpmat
