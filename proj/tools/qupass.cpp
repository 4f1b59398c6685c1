#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qupass/commands.hpp"

namespace {

constexpr const char* kStrategies = "uqcm_symmetric,uqcm_asymmetric,random_guess,intercept_resend";
constexpr const char* kStrikePoints = "alice_station,in_transit,bob_server";
constexpr const char* kMetrics = "fidelity,operational";
constexpr const char* kNoiseKinds = "ideal,depolarizing,dephasing,amplitude_damping";

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) items.push_back(item);
    return items;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum password protocol simulator"};
    app.require_subcommand(1);

    qupass::DemoOptions demo;
    CLI::App* demo_cmd = app.add_subcommand("demo", "honest setup / use / verification walkthrough");
    demo_cmd->add_option("--qubits", demo.qubits, "password length");
    demo_cmd->add_option("--rounds", demo.rounds, "number of honest verification rounds");
    demo_cmd->add_option("--seed", demo.seed, "rng seed (default: QUPASS_SEED or built-in)");

    qupass::AttackOptions attack;
    CLI::App* attack_cmd = app.add_subcommand("attack", "run an eavesdropping scenario");
    attack_cmd->add_option("scenario-file", attack.config_path, "scenario file (INI sections)");
    attack_cmd->add_option("--config", attack.config_path, "scenario file (INI sections)")
        ->excludes("scenario-file");
    attack_cmd->add_option("--strategy", attack.strategy, kStrategies);
    attack_cmd->add_option("--asymmetry", attack.asymmetry, "asymmetric cloner parameter in [0,1]");
    attack_cmd->add_option("--strike", attack.strike_point, kStrikePoints);
    attack_cmd->add_option("--metric", attack.metric, kMetrics);
    attack_cmd->add_option("--qubits", attack.qubits, "password length");
    attack_cmd->add_option("--trials", attack.trials, "Monte Carlo trials");
    attack_cmd->add_option("--noise-kind", attack.noise_kind, kNoiseKinds);
    attack_cmd->add_option("--noise", attack.noise_strength, "noise strength in [0,1]");
    attack_cmd->add_option("--loss", attack.loss_probability, "loss probability in [0,1]");
    attack_cmd->add_option("--policy", attack.policy_mode, "strict,threshold");
    attack_cmd->add_option("--threshold", attack.threshold_fraction, "required fraction of passing qubits");
    attack_cmd->add_option("--seed", attack.seed, "rng seed");
    attack_cmd->add_option("--out", attack.csv_out, "write a one-row summary CSV here");

    qupass::SweepOptions sweep;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "attack success against password length");
    sweep_cmd->add_option("--min", sweep.n_min, "smallest password length");
    sweep_cmd->add_option("--max", sweep.n_max, "largest password length");
    sweep_cmd->add_option("--trials", sweep.trials, "trials per length");
    sweep_cmd->add_option("--metric", sweep.metric, kMetrics);
    sweep_cmd->add_option("--seed", sweep.seed, "rng seed");
    sweep_cmd->add_option("--out", sweep.out_path, "CSV output path (default: stdout)");

    qupass::NoiseOptions noise;
    std::string levels_arg, thresholds_arg;
    CLI::App* noise_cmd = app.add_subcommand("noise", "noise/threshold security-usability grid");
    noise_cmd->add_option("--kind", noise.kind, kNoiseKinds);
    noise_cmd->add_option("--levels", levels_arg, "comma-separated noise strengths");
    noise_cmd->add_option("--thresholds", thresholds_arg, "comma-separated acceptance fractions");
    noise_cmd->add_option("--qubits", noise.qubits, "password length");
    noise_cmd->add_option("--trials", noise.trials, "trials per grid cell");
    noise_cmd->add_option("--seed", noise.seed, "rng seed");
    noise_cmd->add_option("--out", noise.out_path, "CSV output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return qupass::kExitUsage;
    }

    try {
        if (*demo_cmd) return qupass::cmd_demo(demo, std::cout, std::cerr);
        if (*attack_cmd) return qupass::cmd_attack(attack, std::cout, std::cerr);
        if (*sweep_cmd) return qupass::cmd_sweep(sweep, std::cout, std::cerr);
        if (*noise_cmd) {
            if (!levels_arg.empty()) {
                noise.levels.clear();
                for (const auto& item : split_list(levels_arg)) noise.levels.push_back(std::stod(item));
            }
            if (!thresholds_arg.empty()) {
                noise.thresholds.clear();
                for (const auto& item : split_list(thresholds_arg))
                    noise.thresholds.push_back(std::stod(item));
            }
            return qupass::cmd_noise(noise, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return qupass::kExitUsage;
    }
    return qupass::kExitUsage;
}
