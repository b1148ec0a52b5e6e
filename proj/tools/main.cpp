// Command-line front end: exact evaluation, surrogate comparisons, gradient
// checks, bound sweeps, monotonic improvement runs and dynamics estimation,
// all emitting machine-readable reports.
//
// Exit codes: 0 success, 1 invariant-check failure, 2 input error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mdpmat/distances.hpp"
#include "mdpmat/evaluation.hpp"
#include "mdpmat/model_io.hpp"
#include "mdpmat/optimizer.hpp"
#include "mdpmat/surrogates.hpp"

using json = nlohmann::json;
using namespace mdpmat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariantFailure = 1;
constexpr int kExitInputError = 2;

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out)
        throw ParseError("cannot open output file: " + output_path);
    out << text;
}

// FNV-1a, 64-bit; used only to fingerprint run inputs.
std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    char buffer[19];
    std::snprintf(buffer, sizeof buffer, "0x%016llx",
                  static_cast<unsigned long long>(value));
    return buffer;
}

// JSON has no infinities; encode non-finite values as strings.
json encode_double(double value) {
    if (std::isfinite(value))
        return value;
    if (std::isnan(value))
        return "nan";
    return value > 0 ? "inf" : "-inf";
}

json encode_vector(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        arr.push_back(encode_double(v[i]));
    return arr;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
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

// ---------------------------------------------------------------------------
// Shared option handling
// ---------------------------------------------------------------------------

struct CommonOptions {
    std::string output_path;
    std::string format = "json";
    double gamma_override = -1.0; // negative means "not set"
};

void add_common(CLI::App* cmd, CommonOptions& common) {
    cmd->add_option("--output", common.output_path,
                    "Write the report to this file instead of stdout");
    cmd->add_option("--format", common.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--gamma-override", common.gamma_override,
                    "Replace the instance's discount factor")
        ->check(CLI::Range(0.0, 0.9999999999));
}

MdpInstance load_mdp(const std::string& spec, const CommonOptions& common) {
    MdpInstance mdp = spec == "builtin:m1" ? builtin_m1()
                                           : parse_mdp(read_file(spec));
    if (common.gamma_override >= 0.0)
        return MdpInstance(mdp.num_states(), mdp.num_actions(),
                           mdp.transitions(), mdp.rewards(),
                           common.gamma_override, mdp.initial_distribution());
    return mdp;
}

// Policy specs: "uniform", "file:<path>" or "seed:<n>".
Policy load_policy(const std::string& spec, const MdpInstance& mdp) {
    if (spec == "uniform")
        return uniform_policy(mdp.num_states(), mdp.num_actions());
    if (spec.rfind("file:", 0) == 0) {
        const Policy policy = parse_policy(read_file(spec.substr(5)));
        if (policy.num_states() != mdp.num_states() ||
            policy.num_actions() != mdp.num_actions())
            throw ValidationError("policy dimensions do not match the MDP");
        return policy;
    }
    if (spec.rfind("seed:", 0) == 0) {
        const std::uint64_t seed = std::stoull(spec.substr(5));
        return generate_random_policy(seed, mdp.num_states(), mdp.num_actions());
    }
    throw ParseError("policy spec must be 'uniform', 'file:<path>' or "
                     "'seed:<n>', got '" +
                     spec + "'");
}

class ReportWriter {
public:
    ReportWriter(std::string command, const CommonOptions& common)
        : command_(std::move(command)), common_(common),
          start_(std::chrono::steady_clock::now()) {}

    void set_digest(const std::string& material) {
        digest_ = hex64(fnv1a(material));
    }
    json& config() { return config_; }

    void emit(const json& payload) const {
        json report;
        report["command"] = command_;
        report["input_digest"] = digest_;
        report["config"] = config_;
        report["payload"] = payload;
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        report["duration_ms"] =
            std::chrono::duration<double, std::milli>(elapsed).count();
        write_output(report.dump(2) + "\n", common_.output_path);
    }

    // Sweep tables can alternatively be emitted as CSV.
    void emit_csv(const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows) const {
        std::ostringstream out;
        for (std::size_t i = 0; i < header.size(); ++i)
            out << (i ? "," : "") << header[i];
        out << "\n";
        out << std::setprecision(17);
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << row[i];
            out << "\n";
        }
        write_output(out.str(), common_.output_path);
    }

private:
    std::string command_;
    const CommonOptions& common_;
    std::string digest_ = "0x0000000000000000";
    json config_;
    std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_evaluate(const std::string& mdp_spec, const std::string& policy_spec,
                 const CommonOptions& common) {
    if (common.format != "json")
        throw ParseError("evaluate only supports --format json");
    ReportWriter report("evaluate", common);
    const MdpInstance mdp = load_mdp(mdp_spec, common);
    const Policy policy = load_policy(policy_spec, mdp);
    report.set_digest(write_mdp(mdp) + "|" + policy_spec);
    report.config() = {{"mdp", mdp_spec}, {"policy", policy_spec},
                       {"gamma", mdp.gamma()}};

    const EvaluationResult result = evaluate(mdp, policy);

    // Invariant residuals alongside the values themselves.
    const Matrix kernel = state_transition(policy, mdp);
    const double bellman =
        (result.state_values - policy.matrix() * mdp.rewards() -
         mdp.gamma() * (kernel * result.state_values))
            .lpNorm<Eigen::Infinity>();
    const double weighted_advantage =
        (policy.matrix() * result.advantages).lpNorm<Eigen::Infinity>();
    const double mass = std::abs(result.visitation.sum() -
                                 1.0 / (1.0 - mdp.gamma()));

    json payload;
    payload["eta"] = encode_double(result.objective_value);
    payload["state_values"] = encode_vector(result.state_values);
    payload["action_values"] = encode_vector(result.action_values);
    payload["advantages"] = encode_vector(result.advantages);
    payload["visitation"] = encode_vector(result.visitation);
    payload["residuals"] = {{"bellman", encode_double(bellman)},
                            {"policy_weighted_advantage",
                             encode_double(weighted_advantage)},
                            {"visitation_mass", encode_double(mass)}};
    report.emit(payload);

    const bool ok = bellman <= 1e-9 && weighted_advantage <= 1e-9 &&
                    mass <= 1e-9 * (1.0 / (1.0 - mdp.gamma()));
    return ok ? kExitOk : kExitInvariantFailure;
}

json surrogate_report_to_json(const SurrogateReport& r) {
    json payload;
    payload["values"] = json::array();
    for (double v : r.values)
        payload["values"].push_back(encode_double(v));
    payload["eta_base"] = encode_double(r.eta_base);
    payload["eta_target"] = encode_double(r.eta_target);
    payload["approx_errors"] = {{"l2", encode_double(r.approx_errors[0])},
                                {"l3", encode_double(r.approx_errors[1])},
                                {"l4", encode_double(r.approx_errors[2])}};
    payload["error_bounds"] = {{"l2", encode_double(r.error_bounds[0])},
                               {"l3", encode_double(r.error_bounds[1])},
                               {"l4", encode_double(r.error_bounds[2])}};
    payload["bound_holds"] = {{"l2", r.bound_holds[0]},
                              {"l3", r.bound_holds[1]},
                              {"l4", r.bound_holds[2]}};
    payload["trpo_bound_rhs"] = encode_double(r.trpo_bound_rhs);
    payload["trpo_holds"] = r.trpo_holds;
    payload["tv_max"] = encode_double(r.tv_max);
    payload["kl_max"] = encode_double(r.kl_max);
    payload["advantage_l1"] = encode_double(r.advantage_l1);
    payload["advantage_max"] = encode_double(r.advantage_max);
    payload["penalty_coefficient"] = encode_double(r.penalty_coefficient);
    payload["bounds_vacuous"] = r.bounds_vacuous;
    return payload;
}

int cmd_surrogates(const std::string& mdp_spec, const std::string& base_spec,
                   const std::string& target_spec, const CommonOptions& common) {
    if (common.format != "json")
        throw ParseError("surrogates only supports --format json");
    ReportWriter report("surrogates", common);
    const MdpInstance mdp = load_mdp(mdp_spec, common);
    const Policy base = load_policy(base_spec, mdp);
    const Policy target = load_policy(target_spec, mdp);
    report.set_digest(write_mdp(mdp) + "|" + base_spec + "|" + target_spec);
    report.config() = {{"mdp", mdp_spec},
                       {"base", base_spec},
                       {"target", target_spec},
                       {"gamma", mdp.gamma()}};

    const SurrogateReport r = bound_report(mdp, base, target);
    report.emit(surrogate_report_to_json(r));
    return r.trpo_holds ? kExitOk : kExitInvariantFailure;
}

int cmd_gradcheck(const std::string& mdp_spec, std::uint64_t seed,
                  bool seed_given, double h, const CommonOptions& common) {
    if (common.format != "json")
        throw ParseError("gradcheck only supports --format json");
    ReportWriter report("gradcheck", common);
    const MdpInstance mdp = load_mdp(mdp_spec, common);
    report.set_digest(write_mdp(mdp) + "|" + std::to_string(seed_given ? seed : 0) +
                      "|" + std::to_string(h));
    report.config() = {{"mdp", mdp_spec},
                       {"seed", seed_given ? json(seed) : json(nullptr)},
                       {"h", h},
                       {"gamma", mdp.gamma()}};

    const Vector logits =
        seed_given
            ? generate_random_logits(seed, mdp.num_states(), mdp.num_actions())
            : Vector::Zero(mdp.num_state_actions());
    const ParameterizedPolicy pp(logits, mdp.num_states(), mdp.num_actions());

    const Vector g2 = surrogate_gradient(2, mdp, pp);
    const Vector g3 = surrogate_gradient(3, mdp, pp);
    const Vector g4 = surrogate_gradient(4, mdp, pp);
    const Vector fd = finite_difference_gradient(mdp, logits, h);

    const double decomposition = (g2 + g3 - g4).lpNorm<Eigen::Infinity>();
    const double fd_scale = std::max(1.0, fd.lpNorm<Eigen::Infinity>());
    const double l4_vs_fd = (g4 - fd).lpNorm<Eigen::Infinity>() / fd_scale;
    const double sum_vs_fd = (g2 + g3 - fd).lpNorm<Eigen::Infinity>() / fd_scale;

    json payload;
    payload["decomposition_residual"] = encode_double(decomposition);
    payload["grad_l4_vs_fd_rel_error"] = encode_double(l4_vs_fd);
    payload["grad_l2_plus_l3_vs_fd_rel_error"] = encode_double(sum_vs_fd);
    payload["grad_norms"] = {
        {"l2", encode_double(g2.lpNorm<Eigen::Infinity>())},
        {"l3", encode_double(g3.lpNorm<Eigen::Infinity>())},
        {"l4", encode_double(g4.lpNorm<Eigen::Infinity>())},
        {"finite_difference", encode_double(fd.lpNorm<Eigen::Infinity>())}};
    report.emit(payload);
    return kExitOk;
}

int cmd_boundsweep(std::uint64_t seed, int instances, int pairs,
                   std::vector<double> grid, int slope_instances,
                   const CommonOptions& common) {
    ReportWriter report("boundsweep", common);
    report.set_digest(std::to_string(seed) + "|" + std::to_string(instances) +
                      "|" + std::to_string(pairs));
    report.config() = {{"seed", seed},
                       {"instances", instances},
                       {"pairs", pairs},
                       {"grid", grid},
                       {"slope_instances", slope_instances}};
    if (grid.empty())
        grid = {1e-1, 1e-2, 1e-3, 1e-4};

    // Penalized-bound sweep over random finite-KL policy pairs.
    int violations = 0;
    int vacuous = 0;
    std::array<int, 3> holds = {0, 0, 0};
    int checked = 0;
    for (int i = 0; i < instances; ++i) {
        const std::uint64_t inst_seed = derive_seed(seed, 2 * i);
        const int num_states = 2 + static_cast<int>(inst_seed % 9);
        const int num_actions = 2 + static_cast<int>((inst_seed >> 8) % 3);
        const double gamma = i % 3 == 0 ? 0.5 : (i % 3 == 1 ? 0.9 : 0.99);
        const MdpInstance mdp = generate_random_mdp(inst_seed, num_states,
                                                    num_actions, gamma, -1.0,
                                                    1.0);
        for (int j = 0; j < pairs; ++j) {
            const Policy base = generate_random_policy(
                derive_seed(inst_seed, 100 + 2 * j), num_states, num_actions);
            const Policy target = generate_random_policy(
                derive_seed(inst_seed, 101 + 2 * j), num_states, num_actions);
            const SurrogateReport r = bound_report(mdp, base, target);
            ++checked;
            if (r.bounds_vacuous) {
                ++vacuous;
                continue;
            }
            if (r.eta_target < r.trpo_bound_rhs - kTrpoBoundSlack)
                ++violations;
            for (int k = 0; k < 3; ++k)
                holds[k] += r.bound_holds[k] ? 1 : 0;
        }
    }

    // Order-of-accuracy sweep along random directions.
    std::vector<std::vector<double>> slope_rows;
    json slope_table = json::array();
    for (int i = 0; i < slope_instances; ++i) {
        const std::uint64_t s = derive_seed(seed, 7000 + i);
        const int num_states = 2 + static_cast<int>(s % 5);
        const int num_actions = 2 + static_cast<int>((s >> 8) % 3);
        const double gamma = i % 2 == 0 ? 0.5 : 0.8;
        const MdpInstance mdp =
            generate_random_mdp(s, num_states, num_actions, gamma, -1.0, 1.0);
        const Vector logits = generate_random_logits(derive_seed(s, 1),
                                                     num_states, num_actions);
        Vector direction = generate_random_logits(derive_seed(s, 2), num_states,
                                                  num_actions);
        direction /= direction.norm();
        const ParameterizedPolicy pp(logits, num_states, num_actions);
        const Policy base = pp.policy();
        const double g2_dot = surrogate_gradient(2, mdp, pp).dot(direction);
        const double g3_dot = surrogate_gradient(3, mdp, pp).dot(direction);

        std::vector<double> err2, err3, err4;
        for (double t : grid) {
            const Policy target =
                softmax_policy(logits + t * direction, num_states, num_actions);
            const double eta = objective(mdp, target);
            err2.push_back(std::abs(eta - surrogate_value(2, mdp, base, target)));
            err3.push_back(std::abs(eta - surrogate_value(3, mdp, base, target)));
            err4.push_back(std::abs(eta - surrogate_value(4, mdp, base, target)));
        }
        const double slope2 = log_log_slope(grid, err2);
        const double slope3 = log_log_slope(grid, err3);
        const double slope4 = log_log_slope(grid, err4);
        slope_table.push_back({{"instance", i},
                               {"slope_l2", encode_double(slope2)},
                               {"slope_l3", encode_double(slope3)},
                               {"slope_l4", encode_double(slope4)},
                               {"first_order_coeff_l2", encode_double(g3_dot)},
                               {"first_order_coeff_l3", encode_double(g2_dot)}});
        slope_rows.push_back(
            {static_cast<double>(i), slope2, slope3, slope4, g3_dot, g2_dot});
    }

    // The bound right-hand sides for surrogates 3 and 4 carry an explicit
    // discount factor; report them on a gamma grid for a fixed pair.
    json gamma_trend;
    {
        const MdpInstance base_mdp =
            generate_random_mdp(derive_seed(seed, 9001), 4, 2, 0.5, -1.0, 1.0);
        const Policy base = generate_random_policy(derive_seed(seed, 9002), 4, 2);
        const Policy target = generate_random_policy(derive_seed(seed, 9003), 4, 2);
        json gammas = json::array();
        json l3_rhs = json::array();
        json l4_rhs = json::array();
        bool monotone = true;
        double prev3 = -1.0, prev4 = -1.0;
        for (double gamma : {0.05, 0.1, 0.2, 0.4, 0.6, 0.8}) {
            const MdpInstance mdp(base_mdp.num_states(), base_mdp.num_actions(),
                                  base_mdp.transitions(), base_mdp.rewards(),
                                  gamma, base_mdp.initial_distribution());
            const SurrogateReport r = bound_report(mdp, base, target);
            gammas.push_back(gamma);
            l3_rhs.push_back(encode_double(r.error_bounds[1]));
            l4_rhs.push_back(encode_double(r.error_bounds[2]));
            if (prev3 >= 0.0 &&
                (r.error_bounds[1] < prev3 || r.error_bounds[2] < prev4))
                monotone = false;
            prev3 = r.error_bounds[1];
            prev4 = r.error_bounds[2];
        }
        gamma_trend = {{"gammas", gammas},
                       {"l3_bound_rhs", l3_rhs},
                       {"l4_bound_rhs", l4_rhs},
                       {"monotone_increasing", monotone}};
    }

    if (common.format == "csv") {
        report.emit_csv({"instance", "slope_l2", "slope_l3", "slope_l4",
                         "first_order_coeff_l2", "first_order_coeff_l3"},
                        slope_rows);
    } else {
        json payload;
        payload["pairs_checked"] = checked;
        payload["trpo_violations"] = violations;
        payload["vacuous_pairs"] = vacuous;
        payload["bound_hold_counts"] = {{"l2", holds[0]},
                                        {"l3", holds[1]},
                                        {"l4", holds[2]}};
        payload["slope_table"] = slope_table;
        payload["gamma_trend"] = gamma_trend;
        report.emit(payload);
    }
    return violations == 0 ? kExitOk : kExitInvariantFailure;
}

int cmd_improve(const std::string& mdp_spec, std::uint64_t seed, bool seed_given,
                int max_iters, double step, double grad_tol,
                const CommonOptions& common) {
    ReportWriter report("improve", common);
    const MdpInstance mdp = load_mdp(mdp_spec, common);
    report.set_digest(write_mdp(mdp) + "|" +
                      std::to_string(seed_given ? seed : 0));
    report.config() = {{"mdp", mdp_spec},
                       {"seed", seed_given ? json(seed) : json(nullptr)},
                       {"max_iters", max_iters},
                       {"step", step},
                       {"grad_tol", grad_tol},
                       {"gamma", mdp.gamma()}};

    ImproveConfig config;
    config.max_iters = max_iters;
    config.step_size = step;
    config.grad_tol = grad_tol;
    const Vector logits =
        seed_given
            ? generate_random_logits(seed, mdp.num_states(), mdp.num_actions())
            : Vector::Zero(mdp.num_state_actions());

    const ImprovementTrace trace = improve(mdp, logits, config);
    const auto oracle = value_iteration_oracle(mdp);
    const double oracle_eta =
        mdp.initial_distribution().dot(oracle.optimal_values);
    const double final_eta = trace.steps.back().objective_value;

    bool monotone = true;
    json steps = json::array();
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const ImprovementStep& s = trace.steps[i];
        if (i > 0 &&
            s.objective_value < trace.steps[i - 1].objective_value - 1e-12)
            monotone = false;
        steps.push_back({{"iteration", s.iteration},
                         {"eta", encode_double(s.objective_value)},
                         {"kl_to_previous", encode_double(s.kl_to_previous)},
                         {"majorization", encode_double(s.majorization)},
                         {"step_size", encode_double(s.step_size)}});
        rows.push_back({static_cast<double>(s.iteration), s.objective_value,
                        s.kl_to_previous, s.majorization, s.step_size});
    }

    if (common.format == "csv") {
        report.emit_csv({"iteration", "eta", "kl_to_previous", "majorization",
                         "step_size"},
                        rows);
    } else {
        json payload;
        payload["trace"] = steps;
        payload["final_eta"] = encode_double(final_eta);
        payload["oracle_eta"] = encode_double(oracle_eta);
        payload["gap"] = encode_double(oracle_eta - final_eta);
        payload["converged"] = trace.converged;
        payload["reason"] = trace.reason;
        payload["monotone"] = monotone;
        report.emit(payload);
    }
    return monotone ? kExitOk : kExitInvariantFailure;
}

int cmd_estimate(const std::string& mdp_spec, const std::string& samples_path,
                 int samples_per_pair, std::uint64_t seed, double smoothing,
                 std::vector<int> n_grid, int trend_seeds,
                 const std::string& policy_spec, const CommonOptions& common) {
    ReportWriter report("estimate", common);
    const MdpInstance mdp = load_mdp(mdp_spec, common);
    report.set_digest(write_mdp(mdp) + "|" + samples_path + "|" +
                      std::to_string(samples_per_pair) + "|" +
                      std::to_string(seed));
    report.config() = {{"mdp", mdp_spec},
                       {"samples", samples_path},
                       {"samples_per_pair", samples_per_pair},
                       {"seed", seed},
                       {"smoothing", smoothing},
                       {"n_grid", n_grid},
                       {"trend_seeds", trend_seeds},
                       {"policy", policy_spec}};
    const Policy policy = load_policy(policy_spec, mdp);

    // Trend mode: median downstream value error across seeds per sample size.
    if (!n_grid.empty()) {
        json ns = json::array();
        json medians = json::array();
        std::vector<std::vector<double>> rows;
        bool decreasing = true;
        double previous = -1.0;
        for (int n : n_grid) {
            std::vector<double> errors;
            for (int rep = 0; rep < trend_seeds; ++rep) {
                const auto samples = sample_transitions(
                    mdp, derive_seed(seed, 1000 * n + rep), n);
                const TransitionEstimate est = estimate_transitions(
                    samples, mdp.num_states(), mdp.num_actions(), smoothing);
                const MdpInstance estimated(mdp.num_states(), mdp.num_actions(),
                                            est.transitions, mdp.rewards(),
                                            mdp.gamma(),
                                            mdp.initial_distribution());
                errors.push_back((value_function(mdp, policy) -
                                  value_function(estimated, policy))
                                     .lpNorm<Eigen::Infinity>());
            }
            std::sort(errors.begin(), errors.end());
            const std::size_t mid = errors.size() / 2;
            const double median =
                errors.size() % 2 == 1
                    ? errors[mid]
                    : 0.5 * (errors[mid - 1] + errors[mid]);
            if (previous >= 0.0 && median >= previous)
                decreasing = false;
            previous = median;
            ns.push_back(n);
            medians.push_back(encode_double(median));
            rows.push_back({static_cast<double>(n), median});
        }
        if (common.format == "csv") {
            report.emit_csv({"samples_per_pair", "median_value_error"}, rows);
        } else {
            json payload;
            payload["mode"] = "trend";
            payload["n_grid"] = ns;
            payload["median_value_error"] = medians;
            payload["monotone_decreasing"] = decreasing;
            report.emit(payload);
        }
        return kExitOk;
    }

    if (common.format != "json")
        throw ParseError("estimate supports --format csv only in trend mode");

    // Single-shot mode: estimate from a samples file or by simulating the
    // instance's own dynamics.
    std::vector<TransitionSample> samples;
    if (!samples_path.empty()) {
        int ns = 0, na = 0;
        samples = parse_samples(read_file(samples_path), ns, na);
        if (ns != mdp.num_states() || na != mdp.num_actions())
            throw ValidationError("sample dimensions do not match the MDP");
    } else {
        samples = sample_transitions(mdp, seed, samples_per_pair);
    }
    const TransitionEstimate est = estimate_transitions(
        samples, mdp.num_states(), mdp.num_actions(), smoothing);

    json unvisited = json::array();
    for (int row = 0; row < mdp.num_state_actions(); ++row)
        if (est.unvisited[row])
            unvisited.push_back(row);

    json payload;
    payload["mode"] = "single";
    payload["num_samples"] = samples.size();
    payload["transition_error_max"] = encode_double(
        (est.transitions - mdp.transitions()).lpNorm<Eigen::Infinity>());
    payload["unvisited_rows"] = unvisited;
    json estimate_rows = json::array();
    for (int row = 0; row < mdp.num_state_actions(); ++row)
        estimate_rows.push_back(
            encode_vector(est.transitions.row(row).transpose()));
    payload["transitions_estimate"] = estimate_rows;

    const MdpInstance estimated(mdp.num_states(), mdp.num_actions(),
                                est.transitions, mdp.rewards(), mdp.gamma(),
                                mdp.initial_distribution());
    payload["value_error_max"] = encode_double(
        (value_function(mdp, policy) - value_function(estimated, policy))
            .lpNorm<Eigen::Infinity>());
    report.emit(payload);
    return kExitOk;
}

int cmd_generate(std::uint64_t seed, int states, int actions, double gamma,
                 double reward_min, double reward_max,
                 const CommonOptions& common) {
    const MdpInstance mdp = generate_random_mdp(seed, states, actions, gamma,
                                                reward_min, reward_max);
    write_output(write_mdp(mdp), common.output_path);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact tabular MDP toolkit: matrix-form evaluation, surrogate "
                 "objectives with certified bounds, and monotonic policy "
                 "improvement"};
    app.require_subcommand(1);

    // evaluate
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "Exact policy evaluation");
    std::string eval_mdp, eval_policy = "uniform";
    CommonOptions eval_common;
    evaluate_cmd->add_option("--mdp", eval_mdp, "MDP file or builtin:m1")
        ->required();
    evaluate_cmd->add_option("--policy", eval_policy,
                             "uniform | file:<path> | seed:<n>");
    add_common(evaluate_cmd, eval_common);

    // surrogates
    auto* surrogates_cmd = app.add_subcommand(
        "surrogates", "Surrogate values, errors and bound certificates");
    std::string surr_mdp, surr_base = "uniform", surr_target = "uniform";
    CommonOptions surr_common;
    surrogates_cmd->add_option("--mdp", surr_mdp, "MDP file or builtin:m1")
        ->required();
    surrogates_cmd->add_option("--base", surr_base, "Base policy spec");
    surrogates_cmd->add_option("--target", surr_target, "Target policy spec");
    add_common(surrogates_cmd, surr_common);

    // gradcheck
    auto* gradcheck_cmd = app.add_subcommand(
        "gradcheck", "Analytic gradients versus finite differences");
    std::string grad_mdp;
    std::uint64_t grad_seed = 0;
    double grad_h = 1e-6;
    CommonOptions grad_common;
    gradcheck_cmd->add_option("--mdp", grad_mdp, "MDP file or builtin:m1")
        ->required();
    auto* grad_seed_opt = gradcheck_cmd->add_option(
        "--seed", grad_seed, "Randomize the logits from this seed");
    gradcheck_cmd->add_option("--fd-step", grad_h, "Finite-difference step")
        ->check(CLI::PositiveNumber);
    add_common(gradcheck_cmd, grad_common);

    // boundsweep
    auto* boundsweep_cmd = app.add_subcommand(
        "boundsweep", "Bound violations and error-scaling slopes over random "
                      "instances");
    std::uint64_t sweep_seed = 0;
    int sweep_instances = 100, sweep_pairs = 10, sweep_slope_instances = 20;
    std::vector<double> sweep_grid;
    CommonOptions sweep_common;
    boundsweep_cmd->add_option("--seed", sweep_seed, "Sweep seed");
    boundsweep_cmd->add_option("--instances", sweep_instances, "Random MDPs")
        ->check(CLI::PositiveNumber);
    boundsweep_cmd->add_option("--pairs", sweep_pairs, "Policy pairs per MDP")
        ->check(CLI::PositiveNumber);
    boundsweep_cmd->add_option("--grid", sweep_grid,
                               "Perturbation sizes for the slope fit");
    boundsweep_cmd->add_option("--slope-instances", sweep_slope_instances,
                               "Instances in the slope sweep")
        ->check(CLI::NonNegativeNumber);
    add_common(boundsweep_cmd, sweep_common);

    // improve
    auto* improve_cmd =
        app.add_subcommand("improve", "Monotonic policy improvement");
    std::string improve_mdp;
    std::uint64_t improve_seed = 0;
    int improve_max_iters = 500;
    double improve_step = 1.0, improve_grad_tol = 1e-9;
    CommonOptions improve_common;
    improve_cmd->add_option("--mdp", improve_mdp, "MDP file or builtin:m1")
        ->required();
    auto* improve_seed_opt = improve_cmd->add_option(
        "--seed", improve_seed, "Randomize the initial logits from this seed");
    improve_cmd->add_option("--max-iters", improve_max_iters, "Iteration budget")
        ->check(CLI::NonNegativeNumber);
    improve_cmd->add_option("--step", improve_step, "Initial ascent step")
        ->check(CLI::PositiveNumber);
    improve_cmd->add_option("--grad-tol", improve_grad_tol,
                            "Gradient stopping tolerance")
        ->check(CLI::PositiveNumber);
    add_common(improve_cmd, improve_common);

    // estimate
    auto* estimate_cmd = app.add_subcommand(
        "estimate", "Empirical dynamics estimation and its downstream error");
    std::string est_mdp, est_samples, est_policy = "uniform";
    int est_samples_per_pair = 1000, est_trend_seeds = 10;
    std::uint64_t est_seed = 0;
    double est_smoothing = 0.0;
    std::vector<int> est_n_grid;
    CommonOptions est_common;
    estimate_cmd->add_option("--mdp", est_mdp, "MDP file or builtin:m1")
        ->required();
    estimate_cmd->add_option("--samples", est_samples,
                             "Read transitions from this samples file");
    estimate_cmd->add_option("--samples-per-pair", est_samples_per_pair,
                             "Simulated draws per state-action pair")
        ->check(CLI::NonNegativeNumber);
    estimate_cmd->add_option("--seed", est_seed, "Sampling seed");
    estimate_cmd->add_option("--smoothing", est_smoothing, "Additive smoothing")
        ->check(CLI::NonNegativeNumber);
    estimate_cmd->add_option("--n-grid", est_n_grid,
                             "Trend mode: sample sizes to compare");
    estimate_cmd->add_option("--trend-seeds", est_trend_seeds,
                             "Trend mode: seeds per sample size")
        ->check(CLI::PositiveNumber);
    estimate_cmd->add_option("--policy", est_policy,
                             "Policy for the downstream value comparison");
    add_common(estimate_cmd, est_common);

    // generate
    auto* generate_cmd =
        app.add_subcommand("generate", "Write a random MDP document");
    std::uint64_t gen_seed = 0;
    int gen_states = 5, gen_actions = 3;
    double gen_gamma = 0.9, gen_reward_min = 0.0, gen_reward_max = 1.0;
    CommonOptions gen_common;
    generate_cmd->add_option("--seed", gen_seed, "Generator seed");
    generate_cmd->add_option("--states", gen_states, "Number of states")
        ->check(CLI::PositiveNumber);
    generate_cmd->add_option("--actions", gen_actions, "Number of actions")
        ->check(CLI::PositiveNumber);
    generate_cmd->add_option("--gamma", gen_gamma, "Discount factor")
        ->check(CLI::Range(0.0, 0.9999999999));
    generate_cmd->add_option("--reward-min", gen_reward_min, "Reward lower bound");
    generate_cmd->add_option("--reward-max", gen_reward_max, "Reward upper bound");
    add_common(generate_cmd, gen_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        if (evaluate_cmd->parsed())
            return cmd_evaluate(eval_mdp, eval_policy, eval_common);
        if (surrogates_cmd->parsed())
            return cmd_surrogates(surr_mdp, surr_base, surr_target, surr_common);
        if (gradcheck_cmd->parsed())
            return cmd_gradcheck(grad_mdp, grad_seed, grad_seed_opt->count() > 0,
                                 grad_h, grad_common);
        if (boundsweep_cmd->parsed())
            return cmd_boundsweep(sweep_seed, sweep_instances, sweep_pairs,
                                  sweep_grid, sweep_slope_instances,
                                  sweep_common);
        if (improve_cmd->parsed())
            return cmd_improve(improve_mdp, improve_seed,
                               improve_seed_opt->count() > 0, improve_max_iters,
                               improve_step, improve_grad_tol, improve_common);
        if (estimate_cmd->parsed())
            return cmd_estimate(est_mdp, est_samples, est_samples_per_pair,
                                est_seed, est_smoothing, est_n_grid,
                                est_trend_seeds, est_policy, est_common);
        if (generate_cmd->parsed())
            return cmd_generate(gen_seed, gen_states, gen_actions, gen_gamma,
                                gen_reward_min, gen_reward_max, gen_common);
    } catch (const ValidationError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ConfigError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariantFailure;
    }
    return kExitInputError;
}
