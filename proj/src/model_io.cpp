#include "mdpmat/model_io.hpp"

#include <cmath>
#include <random>
#include <set>

#include "json.hpp"

namespace mdpmat {

namespace {

using json = nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform double in (0, 1): 52-bit mantissa offset by half a step. Strictly
// inside the interval so logs and divisions stay finite.
double uniform_open(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 12) + 0.5) * 0x1.0p-52;
}

double uniform_range(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform_open(gen);
}

// Standard exponential by inverse CDF; strictly positive.
double exponential(std::mt19937_64& gen) { return -std::log(uniform_open(gen)); }

// A point uniform on the probability simplex: normalized exponentials.
Vector dirichlet_uniform(std::mt19937_64& gen, int size) {
    Vector v(size);
    for (int i = 0; i < size; ++i)
        v[i] = exponential(gen);
    return v / v.sum();
}

// Inverse-CDF draw from a row of transition probabilities.
int sample_categorical(std::mt19937_64& gen, const Eigen::RowVectorXd& row) {
    const double u = uniform_open(gen);
    double cumulative = 0.0;
    for (Eigen::Index i = 0; i < row.size(); ++i) {
        cumulative += row[i];
        if (u < cumulative)
            return static_cast<int>(i);
    }
    return static_cast<int>(row.size() - 1);
}

json parse_document(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed document: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("top-level value must be an object");
    return doc;
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& allowed) {
    for (const auto& item : doc.items())
        if (!allowed.contains(item.key()))
            throw ParseError("unknown key: " + item.key());
}

void check_format_version(const json& doc) {
    if (!doc.contains("format_version"))
        throw ParseError("missing field: format_version");
    if (!doc["format_version"].is_number_integer() ||
        doc["format_version"].get<int>() != 1)
        throw ParseError("unsupported format_version");
}

int get_positive_int(const json& doc, const char* key) {
    if (!doc.contains(key))
        throw ParseError(std::string("missing field: ") + key);
    if (!doc[key].is_number_integer())
        throw ParseError(std::string(key) + " must be an integer");
    const int value = doc[key].get<int>();
    if (value <= 0)
        throw ParseError(std::string(key) + " must be positive");
    return value;
}

double get_number(const json& doc, const char* key) {
    if (!doc.contains(key))
        throw ParseError(std::string("missing field: ") + key);
    if (!doc[key].is_number())
        throw ParseError(std::string(key) + " must be a number");
    return doc[key].get<double>();
}

Vector get_vector(const json& doc, const char* key, Eigen::Index expected) {
    if (!doc.contains(key))
        throw ParseError(std::string("missing field: ") + key);
    const json& arr = doc[key];
    if (!arr.is_array())
        throw ParseError(std::string(key) + " must be an array");
    if (static_cast<Eigen::Index>(arr.size()) != expected)
        throw ValidationError(std::string(key) + " must have length " +
                              std::to_string(expected) + ", got " +
                              std::to_string(arr.size()));
    Vector v(expected);
    for (Eigen::Index i = 0; i < expected; ++i) {
        if (!arr[i].is_number())
            throw ParseError(std::string(key) + " entries must be numbers");
        v[i] = arr[i].get<double>();
    }
    return v;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        arr.push_back(v[i]);
    return arr;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

MdpInstance generate_random_mdp(std::uint64_t seed, int num_states,
                                int num_actions, double gamma,
                                double reward_min, double reward_max) {
    if (num_states <= 0 || num_actions <= 0)
        throw ConfigError("state and action counts must be positive");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw ConfigError("gamma must lie in [0, 1)");
    if (!std::isfinite(reward_min) || !std::isfinite(reward_max) ||
        reward_min > reward_max)
        throw ConfigError("reward range must be finite with min <= max");

    std::mt19937_64 gen(seed);
    const int rows = num_states * num_actions;
    Matrix transitions(rows, num_states);
    for (int row = 0; row < rows; ++row)
        transitions.row(row) = dirichlet_uniform(gen, num_states).transpose();
    Vector rewards(rows);
    for (int row = 0; row < rows; ++row)
        rewards[row] = uniform_range(gen, reward_min, reward_max);
    const Vector rho0 = Vector::Constant(num_states, 1.0 / num_states);
    return MdpInstance(num_states, num_actions, std::move(transitions),
                       std::move(rewards), gamma, rho0);
}

Policy generate_random_policy(std::uint64_t seed, int num_states,
                              int num_actions) {
    if (num_states <= 0 || num_actions <= 0)
        throw ConfigError("state and action counts must be positive");
    std::mt19937_64 gen(seed);
    Vector pi(static_cast<Eigen::Index>(num_states) * num_actions);
    for (int s = 0; s < num_states; ++s)
        pi.segment(s * num_actions, num_actions) =
            dirichlet_uniform(gen, num_actions);
    return build_policy_matrix(pi, num_states, num_actions);
}

Vector generate_random_logits(std::uint64_t seed, int num_states,
                              int num_actions, double scale) {
    if (num_states <= 0 || num_actions <= 0)
        throw ConfigError("state and action counts must be positive");
    if (!std::isfinite(scale) || scale < 0.0)
        throw ConfigError("logit scale must be finite and nonnegative");
    std::mt19937_64 gen(seed);
    Vector logits(static_cast<Eigen::Index>(num_states) * num_actions);
    for (Eigen::Index i = 0; i < logits.size(); ++i)
        logits[i] = uniform_range(gen, -scale, scale);
    return logits;
}

MdpInstance builtin_m1() {
    Matrix transitions(4, 2);
    transitions << 1, 0, // state 0, action 0
        0, 1,            // state 0, action 1
        1, 0,            // state 1, action 0
        0, 1;            // state 1, action 1
    Vector rewards(4);
    rewards << 1, 0, 0, 1;
    Vector rho0(2);
    rho0 << 1, 0;
    return MdpInstance(2, 2, std::move(transitions), std::move(rewards), 0.5,
                       std::move(rho0));
}

MdpInstance parse_mdp(const std::string& text) {
    const json doc = parse_document(text);
    reject_unknown_keys(doc, {"format_version", "num_states", "num_actions",
                              "gamma", "transitions", "rewards",
                              "initial_distribution"});
    check_format_version(doc);
    const int num_states = get_positive_int(doc, "num_states");
    const int num_actions = get_positive_int(doc, "num_actions");
    const double gamma = get_number(doc, "gamma");
    const int rows = num_states * num_actions;

    if (!doc.contains("transitions"))
        throw ParseError("missing field: transitions");
    const json& trans = doc["transitions"];
    if (!trans.is_array())
        throw ParseError("transitions must be an array of rows");
    if (static_cast<int>(trans.size()) != rows)
        throw ValidationError("transitions must have " + std::to_string(rows) +
                              " rows, got " + std::to_string(trans.size()));
    Matrix transitions(rows, num_states);
    for (int row = 0; row < rows; ++row) {
        const json& entry = trans[row];
        if (!entry.is_array())
            throw ParseError("transitions rows must be arrays");
        if (static_cast<int>(entry.size()) != num_states)
            throw ValidationError("transition row " + std::to_string(row) +
                                  " must have " + std::to_string(num_states) +
                                  " entries");
        for (int col = 0; col < num_states; ++col) {
            if (!entry[col].is_number())
                throw ParseError("transition entries must be numbers");
            transitions(row, col) = entry[col].get<double>();
        }
    }

    const Vector rewards = get_vector(doc, "rewards", rows);
    const Vector rho0 = get_vector(doc, "initial_distribution", num_states);

    if (!(gamma >= 0.0 && gamma < 1.0))
        throw ValidationError("gamma must lie in [0, 1), got " +
                              std::to_string(gamma));
    return MdpInstance(num_states, num_actions, std::move(transitions), rewards,
                       gamma, rho0);
}

std::string write_mdp(const MdpInstance& mdp) {
    json doc;
    doc["format_version"] = 1;
    doc["num_states"] = mdp.num_states();
    doc["num_actions"] = mdp.num_actions();
    doc["gamma"] = mdp.gamma();
    json rows = json::array();
    for (int row = 0; row < mdp.num_state_actions(); ++row)
        rows.push_back(vector_to_json(mdp.transitions().row(row).transpose()));
    doc["transitions"] = std::move(rows);
    doc["rewards"] = vector_to_json(mdp.rewards());
    doc["initial_distribution"] = vector_to_json(mdp.initial_distribution());
    return doc.dump(2) + "\n";
}

Policy parse_policy(const std::string& text) {
    const json doc = parse_document(text);
    reject_unknown_keys(
        doc, {"format_version", "num_states", "num_actions", "probabilities"});
    check_format_version(doc);
    const int num_states = get_positive_int(doc, "num_states");
    const int num_actions = get_positive_int(doc, "num_actions");
    const Vector pi = get_vector(doc, "probabilities",
                                 static_cast<Eigen::Index>(num_states) *
                                     num_actions);
    return build_policy_matrix(pi, num_states, num_actions);
}

std::string write_policy(const Policy& policy) {
    json doc;
    doc["format_version"] = 1;
    doc["num_states"] = policy.num_states();
    doc["num_actions"] = policy.num_actions();
    doc["probabilities"] = vector_to_json(policy.probabilities());
    return doc.dump(2) + "\n";
}

std::vector<TransitionSample> parse_samples(const std::string& text,
                                            int& num_states,
                                            int& num_actions) {
    const json doc = parse_document(text);
    reject_unknown_keys(doc,
                        {"format_version", "num_states", "num_actions", "samples"});
    check_format_version(doc);
    num_states = get_positive_int(doc, "num_states");
    num_actions = get_positive_int(doc, "num_actions");
    if (!doc.contains("samples"))
        throw ParseError("missing field: samples");
    const json& arr = doc["samples"];
    if (!arr.is_array())
        throw ParseError("samples must be an array of triples");
    std::vector<TransitionSample> samples;
    samples.reserve(arr.size());
    for (const json& entry : arr) {
        if (!entry.is_array() || entry.size() != 3 ||
            !entry[0].is_number_integer() || !entry[1].is_number_integer() ||
            !entry[2].is_number_integer())
            throw ParseError("each sample must be [state, action, next_state]");
        samples.push_back(TransitionSample{entry[0].get<int>(),
                                           entry[1].get<int>(),
                                           entry[2].get<int>()});
    }
    return samples;
}

std::string write_samples(const std::vector<TransitionSample>& samples,
                          int num_states, int num_actions) {
    json doc;
    doc["format_version"] = 1;
    doc["num_states"] = num_states;
    doc["num_actions"] = num_actions;
    json arr = json::array();
    for (const TransitionSample& s : samples)
        arr.push_back(json::array({s.state, s.action, s.next_state}));
    doc["samples"] = std::move(arr);
    return doc.dump(2) + "\n";
}

TransitionEstimate estimate_transitions(
    const std::vector<TransitionSample>& samples, int num_states,
    int num_actions, double smoothing) {
    if (num_states <= 0 || num_actions <= 0)
        throw ConfigError("state and action counts must be positive");
    if (!(smoothing >= 0.0) || !std::isfinite(smoothing))
        throw ConfigError("smoothing must be finite and nonnegative");

    const int rows = num_states * num_actions;
    Matrix counts = Matrix::Zero(rows, num_states);
    for (const TransitionSample& s : samples) {
        if (s.state < 0 || s.state >= num_states || s.action < 0 ||
            s.action >= num_actions || s.next_state < 0 ||
            s.next_state >= num_states)
            throw IndexOutOfRange("sample (" + std::to_string(s.state) + ", " +
                                  std::to_string(s.action) + ", " +
                                  std::to_string(s.next_state) +
                                  ") outside declared dimensions");
        counts(s.state * num_actions + s.action, s.next_state) += 1.0;
    }

    TransitionEstimate estimate;
    estimate.transitions.resize(rows, num_states);
    estimate.unvisited.assign(rows, false);
    for (int row = 0; row < rows; ++row) {
        const double total = counts.row(row).sum();
        estimate.unvisited[row] = total == 0.0;
        const double denom = total + smoothing * num_states;
        if (denom == 0.0) {
            estimate.transitions.row(row).setConstant(1.0 / num_states);
        } else {
            estimate.transitions.row(row) =
                (counts.row(row).array() + smoothing) / denom;
        }
    }
    return estimate;
}

std::vector<TransitionSample> sample_transitions(const MdpInstance& mdp,
                                                 std::uint64_t seed,
                                                 int samples_per_pair) {
    if (samples_per_pair < 0)
        throw ConfigError("samples_per_pair must be nonnegative");
    std::mt19937_64 gen(seed);
    std::vector<TransitionSample> samples;
    samples.reserve(static_cast<std::size_t>(mdp.num_state_actions()) *
                    samples_per_pair);
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < mdp.num_actions(); ++a) {
            const auto row = mdp.transitions().row(mdp.row_index(s, a));
            for (int i = 0; i < samples_per_pair; ++i)
                samples.push_back(
                    TransitionSample{s, a, sample_categorical(gen, row)});
        }
    return samples;
}

} // namespace mdpmat
