#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qupass/commands.hpp"
#include "qupass/scenario.hpp"

using namespace qupass;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct EnvGuard {
    EnvGuard() { unsetenv("QUPASS_SEED"); }
    ~EnvGuard() { unsetenv("QUPASS_SEED"); }
};

}  // namespace

TEST_CASE("scenario files parse into validated configs") {
    const std::string text =
        "# example scenario\n"
        "[password]\n"
        "n_qubits = 3\n"
        "[attack]\n"
        "strategy = uqcm_asymmetric\n"
        "asymmetry = 0.25\n"
        "strike_point = in_transit\n"
        "metric = operational\n"
        "[channel]\n"
        "noise_kind = dephasing\n"
        "noise_strength = 0.05\n"
        "loss_probability = 0.01\n"
        "[policy]\n"
        "mode = threshold\n"
        "threshold_fraction = 0.8\n"
        "[run]\n"
        "trials = 500\n"
        "seed = 99\n";
    const ScenarioConfig config = parse_scenario(text);
    REQUIRE(config.scenario.n_qubits == 3);
    REQUIRE(config.scenario.strategy == Strategy::uqcm_asymmetric);
    REQUIRE(config.scenario.asymmetry == 0.25);
    REQUIRE(config.scenario.strike_point == StrikePoint::in_transit);
    REQUIRE(config.scenario.metric == SuccessMetric::operational);
    REQUIRE(config.scenario.channel.noise_kind == NoiseKind::dephasing);
    REQUIRE(config.scenario.channel.noise_strength == 0.05);
    REQUIRE(config.scenario.policy.mode == PolicyMode::threshold);
    REQUIRE(config.scenario.trials == 500);
    REQUIRE(config.seed.has_value());
    REQUIRE(*config.seed == 99);
    config.scenario.validate();
}

TEST_CASE("scenario parsing names the offending key and line") {
    try {
        parse_scenario("[password]\nn_qubits = 2\nwidth = 7\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(std::string(e.what()).find("line 3") != std::string::npos);
        REQUIRE(std::string(e.what()).find("width") != std::string::npos);
    }

    REQUIRE_THROWS_AS(parse_scenario("[engine]\nx = 1\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_scenario("n_qubits = 2\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_scenario("[password]\nn_qubits: 2\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_scenario("[password]\nn_qubits = two\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_scenario("[run]\nseed = -4\n"), ConfigError);
}

TEST_CASE("seed resolution precedence") {
    EnvGuard guard;
    REQUIRE(resolve_seed(std::nullopt) == kDefaultSeed);
    REQUIRE(resolve_seed(7, 9) == 7);
    REQUIRE(resolve_seed(std::nullopt, 9) == 9);

    setenv("QUPASS_SEED", "4242", 1);
    REQUIRE(resolve_seed(std::nullopt) == 4242);
    REQUIRE(resolve_seed(std::nullopt, 9) == 9);
    REQUIRE(resolve_seed(7) == 7);

    setenv("QUPASS_SEED", "not-a-number", 1);
    REQUIRE_THROWS_AS(resolve_seed(std::nullopt), ConfigError);
}

TEST_CASE("demo command walks the honest path") {
    DemoOptions options;
    options.qubits = 13;
    options.rounds = 5;
    options.seed = 11;
    std::ostringstream out, err;
    REQUIRE(cmd_demo(options, out, err) == kExitOk);
    const std::string report = out.str();
    REQUIRE(report.find("round 5: accept") != std::string::npos);
    REQUIRE(report.find("(p_accept = 1)") != std::string::npos);
    REQUIRE(report.find("(unchanged)") != std::string::npos);

    options.qubits = 0;
    std::ostringstream out2, err2;
    REQUIRE(cmd_demo(options, out2, err2) == kExitUsage);
    REQUIRE(!err2.str().empty());
}

TEST_CASE("demo command is deterministic under a fixed seed") {
    DemoOptions options;
    options.seed = 321;
    std::ostringstream a, b, err;
    REQUIRE(cmd_demo(options, a, err) == kExitOk);
    REQUIRE(cmd_demo(options, b, err) == kExitOk);
    REQUIRE(a.str() == b.str());
}

TEST_CASE("attack command reports the headline numbers") {
    AttackOptions options;
    options.qubits = 1;
    options.trials = 20000;
    options.metric = "fidelity";
    options.seed = 5;
    std::ostringstream out, err;
    REQUIRE(cmd_attack(options, out, err) == kExitOk);
    const std::string report = out.str();
    REQUIRE(report.find("analytic bound (5/6)^2N: 0.694444") != std::string::npos);
    REQUIRE(report.find("success rate: 0.69") != std::string::npos);
}

TEST_CASE("attack command applies flag overrides on top of the file") {
    const char* path = "scenario_cli_test.ini";
    {
        std::ofstream f(path);
        f << "[password]\nn_qubits = 2\n[run]\ntrials = 300\nseed = 17\n";
    }
    AttackOptions options;
    options.config_path = path;
    options.qubits = 4;  // overrides the file
    std::ostringstream out, err;
    REQUIRE(cmd_attack(options, out, err) == kExitOk);
    REQUIRE(out.str().find("qubits: 4, trials: 300, seed: 17") != std::string::npos);
    std::remove(path);
}

TEST_CASE("attack command rejects invalid scenarios before running") {
    AttackOptions options;
    options.strategy = "random_guess";
    options.metric = "fidelity";
    std::ostringstream out, err;
    REQUIRE(cmd_attack(options, out, err) == kExitUsage);
    REQUIRE(out.str().empty());
    REQUIRE(!err.str().empty());

    AttackOptions missing;
    missing.config_path = "does_not_exist.ini";
    std::ostringstream out2, err2;
    REQUIRE(cmd_attack(missing, out2, err2) == kExitUsage);
}

TEST_CASE("attack command writes a summary CSV") {
    AttackOptions options;
    options.trials = 2000;
    options.seed = 3;
    options.csv_out = "attack_summary_test.csv";
    std::ostringstream out, err;
    REQUIRE(cmd_attack(options, out, err) == kExitOk);
    const std::string csv = slurp(*options.csv_out);
    REQUIRE(csv.find("strategy,strike_point,metric,n_qubits,trials,successes,estimate,ci_low,ci_high") == 0);
    REQUIRE(csv.find("uqcm_symmetric,alice_station,fidelity,1,2000,") != std::string::npos);
    std::remove(options.csv_out->c_str());

    options.csv_out = "missing_dir/attack.csv";
    std::ostringstream out2, err2;
    REQUIRE(cmd_attack(options, out2, err2) == kExitRuntime);
}

TEST_CASE("sweep command emits a deterministic CSV and the detection note") {
    SweepOptions options;
    options.n_min = 1;
    options.n_max = 3;
    options.trials = 2000;
    options.seed = 12;
    std::ostringstream out1, err1, out2, err2;
    REQUIRE(cmd_sweep(options, out1, err1) == kExitOk);
    REQUIRE(cmd_sweep(options, out2, err2) == kExitOk);
    REQUIRE(out1.str() == out2.str());
    REQUIRE(err1.str() == err2.str());

    const SweepTable parsed = sweep_table_from_csv(out1.str());
    REQUIRE(parsed.rows.size() == 3);
    REQUIRE(parsed.rows[0].n_qubits == 1);

    const std::string note = err1.str();
    REQUIRE(note.find("99% detection (fidelity accounting): 13") != std::string::npos);
    REQUIRE(note.find("99.9% detection (fidelity accounting): 19") != std::string::npos);
    REQUIRE(note.find("99.9% first holds at 19") != std::string::npos);

    options.n_min = 9;
    options.n_max = 3;
    std::ostringstream out3, err3;
    REQUIRE(cmd_sweep(options, out3, err3) == kExitUsage);
}

TEST_CASE("sweep command writes the CSV file") {
    SweepOptions options;
    options.n_min = 2;
    options.n_max = 2;
    options.trials = 1000;
    options.seed = 9;
    options.out_path = "sweep_cli_test.csv";
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(options, out, err) == kExitOk);
    REQUIRE(out.str().empty());
    const std::string csv = slurp(*options.out_path);
    REQUIRE(sweep_table_from_csv(csv).rows.size() == 1);
    std::remove(options.out_path->c_str());

    options.out_path = "no_such_dir/sweep.csv";
    std::ostringstream out2, err2;
    REQUIRE(cmd_sweep(options, out2, err2) == kExitRuntime);
}

TEST_CASE("noise command emits the grid") {
    NoiseOptions options;
    options.levels = {0.0, 0.1};
    options.thresholds = {1.0};
    options.qubits = 2;
    options.trials = 300;
    options.seed = 21;
    std::ostringstream out1, err1, out2, err2;
    REQUIRE(cmd_noise(options, out1, err1) == kExitOk);
    REQUIRE(cmd_noise(options, out2, err2) == kExitOk);
    REQUIRE(out1.str() == out2.str());

    const auto rows = noise_rows_from_csv(out1.str());
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].honest_accept_rate == 1.0);

    options.kind = "thermal";
    std::ostringstream out3, err3;
    REQUIRE(cmd_noise(options, out3, err3) == kExitUsage);

    options.kind = "depolarizing";
    options.levels = {2.0};
    std::ostringstream out4, err4;
    REQUIRE(cmd_noise(options, out4, err4) == kExitUsage);
}
