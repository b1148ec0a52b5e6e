#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "json.hpp"

#include "cli_runner.hpp"
#include "mdpmat/model_io.hpp"
#include "mdpmat/optimizer.hpp"

using json = nlohmann::json;
using namespace mdpmat;

namespace {

json payload_of(const std::string& output) {
    return json::parse(output).at("payload");
}

// The report minus its wall-clock field, as a canonical string.
std::string deterministic_part(const std::string& output) {
    json report = json::parse(output);
    report.erase("duration_ms");
    return report.dump();
}

} // namespace

TEST_CASE("cli evaluate: builtin instance with the uniform policy") {
    const auto result = cli::run("evaluate --mdp builtin:m1 --policy uniform");
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    CHECK(payload.at("eta").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(payload.at("state_values")[0].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(payload.at("visitation")[0].get<double>() ==
          doctest::Approx(1.5).epsilon(1e-12));
    CHECK(payload.at("residuals").at("bellman").get<double>() <= 1e-9);
    CHECK(payload.at("residuals").at("policy_weighted_advantage").get<double>() <=
          1e-10);
}

TEST_CASE("cli evaluate: gamma override to zero gives immediate rewards") {
    const auto result = cli::run(
        "evaluate --mdp builtin:m1 --policy uniform --gamma-override 0");
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    CHECK(payload.at("state_values")[0].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(payload.at("state_values")[1].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("cli evaluate: missing file exits with the input-error code") {
    const auto result =
        cli::run("evaluate --mdp /no/such/file.json", /*capture_stderr=*/true);
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("input error") != std::string::npos);
}

TEST_CASE("cli evaluate: malformed policy spec is an input error") {
    const auto result =
        cli::run("evaluate --mdp builtin:m1 --policy bogus", true);
    CHECK(result.exit_code == 2);
}

TEST_CASE("cli surrogates: builtin pair values") {
    const std::string det_path = cli::write_fixture(
        "det_policy.json", write_policy(deterministic_policy({0, 1}, 2)));
    const auto result = cli::run(
        "surrogates --mdp builtin:m1 --base uniform --target file:" + det_path);
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    const std::array<double, 6> expected = {2.0, 1.5, 1.5, 2.0, 1.0, 1.0};
    for (int k = 0; k < 6; ++k)
        CHECK(payload.at("values")[k].get<double>() ==
              doctest::Approx(expected[k]).epsilon(1e-9));
    // Deterministic target: the KL-driven bounds say nothing, but the exact
    // values are still emitted.
    CHECK(payload.at("bounds_vacuous").get<bool>());
    CHECK(payload.at("kl_max").get<std::string>() == "inf");
}

TEST_CASE("cli surrogates: identical policies collapse to the base objective") {
    const auto result =
        cli::run("surrogates --mdp builtin:m1 --base uniform --target uniform");
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    for (int k = 0; k < 6; ++k)
        CHECK(payload.at("values")[k].get<double>() ==
              doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(payload.at("bounds_vacuous").get<bool>());
    CHECK(payload.at("trpo_holds").get<bool>());
}

TEST_CASE("cli gradcheck: zero logits on the builtin instance") {
    const auto result = cli::run("gradcheck --mdp builtin:m1 --fd-step 1e-6");
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    CHECK(payload.at("decomposition_residual").get<double>() <= 1e-9);
    CHECK(payload.at("grad_l4_vs_fd_rel_error").get<double>() <= 1e-5);
    CHECK(payload.at("grad_l2_plus_l3_vs_fd_rel_error").get<double>() <= 1e-5);
}

TEST_CASE("cli gradcheck: at gamma zero the surrogate-2 gradient is exactly 0") {
    const auto result = cli::run(
        "gradcheck --mdp builtin:m1 --seed 4 --gamma-override 0");
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    CHECK(payload.at("grad_norms").at("l2").get<double>() == 0.0);
}

TEST_CASE("cli gradcheck: random seeded instance") {
    const std::string mdp_path = cli::write_fixture(
        "grad_mdp.json", write_mdp(generate_random_mdp(17, 6, 3, 0.9)));
    const auto result =
        cli::run("gradcheck --mdp " + mdp_path + " --seed 21 --fd-step 1e-6");
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    CHECK(payload.at("decomposition_residual").get<double>() <= 1e-9);
    CHECK(payload.at("grad_l4_vs_fd_rel_error").get<double>() <= 1e-5);
}

TEST_CASE("cli boundsweep: no violations, slopes in band") {
    const auto result = cli::run(
        "boundsweep --seed 3 --instances 10 --pairs 5 --slope-instances 5");
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    CHECK(payload.at("trpo_violations").get<int>() == 0);
    CHECK(payload.at("pairs_checked").get<int>() == 50);
    CHECK(payload.at("gamma_trend").at("monotone_increasing").get<bool>());
    for (const json& row : payload.at("slope_table")) {
        CHECK(row.at("slope_l4").get<double>() >= 1.9);
        CHECK(row.at("slope_l2").get<double>() >= 0.9);
        CHECK(row.at("slope_l2").get<double>() <= 1.1);
        CHECK(row.at("slope_l3").get<double>() >= 0.9);
        CHECK(row.at("slope_l3").get<double>() <= 1.1);
    }
}

TEST_CASE("cli improve: builtin instance closes the oracle gap") {
    const auto result = cli::run("improve --mdp builtin:m1");
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    CHECK(payload.at("gap").get<double>() <= 1e-6);
    CHECK(payload.at("monotone").get<bool>());
    CHECK(payload.at("oracle_eta").get<double>() ==
          doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("cli improve: zero iterations records only the starting point") {
    const auto result = cli::run("improve --mdp builtin:m1 --max-iters 0");
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    CHECK(payload.at("trace").size() == 1);
    CHECK(payload.at("gap").get<double>() ==
          doctest::Approx(1.0).epsilon(1e-9)); // initial gap: 2 - 1
}

TEST_CASE("cli estimate: deterministic dynamics are recovered exactly") {
    const auto result =
        cli::run("estimate --mdp builtin:m1 --samples-per-pair 1000 --seed 5");
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    CHECK(payload.at("transition_error_max").get<double>() == 0.0);
    CHECK(payload.at("value_error_max").get<double>() == 0.0);
    CHECK(payload.at("unvisited_rows").empty());
}

TEST_CASE("cli estimate: no samples with zero smoothing flags every row") {
    const auto result =
        cli::run("estimate --mdp builtin:m1 --samples-per-pair 0 --seed 5");
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    CHECK(payload.at("unvisited_rows").size() == 4);
}

TEST_CASE("cli estimate: samples file mode") {
    const MdpInstance m1 = builtin_m1();
    const auto samples = sample_transitions(m1, 9, 200);
    const std::string samples_path =
        cli::write_fixture("samples.json", write_samples(samples, 2, 2));
    const auto result = cli::run("estimate --mdp builtin:m1 --samples " +
                                 samples_path);
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    CHECK(payload.at("num_samples").get<int>() == 800);
    CHECK(payload.at("transition_error_max").get<double>() == 0.0);
}

TEST_CASE("cli estimate: trend mode medians decrease") {
    const std::string mdp_path = cli::write_fixture(
        "trend_mdp.json", write_mdp(generate_random_mdp(23, 5, 2, 0.9)));
    const auto result = cli::run("estimate --mdp " + mdp_path +
                                 " --n-grid 100 1000 10000 --seed 2");
    REQUIRE(result.exit_code == 0);
    const json payload = payload_of(result.output);
    CHECK(payload.at("monotone_decreasing").get<bool>());
}

TEST_CASE("cli generate: output is a valid, reproducible instance") {
    const auto a = cli::run("generate --seed 31 --states 4 --actions 2 "
                            "--gamma 0.8");
    const auto b = cli::run("generate --seed 31 --states 4 --actions 2 "
                            "--gamma 0.8");
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output); // byte-identical documents
    const MdpInstance parsed = parse_mdp(a.output);
    CHECK(parsed.num_states() == 4);
    CHECK(parsed.gamma() == 0.8);

    const auto c = cli::run("generate --seed 32 --states 4 --actions 2 "
                            "--gamma 0.8");
    CHECK(a.output != c.output);
}

TEST_CASE("cli determinism: identical seeds give byte-identical payloads") {
    const std::string mdp_path = cli::write_fixture(
        "det_mdp.json", write_mdp(generate_random_mdp(41, 5, 3, 0.9)));

    for (const std::string args :
         {std::string("evaluate --mdp ") + mdp_path + " --policy seed:7",
          std::string("surrogates --mdp ") + mdp_path +
              " --base seed:1 --target seed:2",
          std::string("boundsweep --seed 11 --instances 5 --pairs 3 "
                      "--slope-instances 2"),
          std::string("improve --mdp ") + mdp_path + " --seed 3 --max-iters 40",
          std::string("estimate --mdp ") + mdp_path +
              " --samples-per-pair 100 --seed 13"}) {
        CAPTURE(args);
        const auto first = cli::run(args);
        const auto second = cli::run(args);
        REQUIRE(first.exit_code == 0);
        REQUIRE(second.exit_code == 0);
        CHECK(deterministic_part(first.output) ==
              deterministic_part(second.output));
    }
}

TEST_CASE("cli csv output carries the sweep table") {
    const auto result = cli::run(
        "boundsweep --seed 3 --instances 2 --pairs 2 --slope-instances 2 "
        "--format csv");
    REQUIRE(result.exit_code == 0);
    CHECK(result.output.rfind("instance,slope_l2,slope_l3,slope_l4", 0) == 0);

    // Formats without a table reject csv as an input error.
    const auto rejected =
        cli::run("evaluate --mdp builtin:m1 --format csv", true);
    CHECK(rejected.exit_code == 2);
}
