#pragma once

#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qupass/experiments.hpp"
#include "qupass/scenario.hpp"

namespace qupass {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline bool write_text_file(const std::string& path, const std::string& content, std::ostream& err) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err << "error: cannot write '" << path << "'\n";
        return false;
    }
    out << content;
    out.flush();
    if (!out) {
        err << "error: short write to '" << path << "'\n";
        return false;
    }
    return true;
}

inline void print_detection_note(std::ostream& out) {
    const std::size_t n99 = min_length_for_detection(0.99, SuccessMetric::fidelity);
    const std::size_t n999 = min_length_for_detection(0.999, SuccessMetric::fidelity);
    const double at13 = 1.0 - uqcm_success_bound(13);
    out << "minimum qubits for 99% detection (fidelity accounting): " << n99 << "\n"
        << "minimum qubits for 99.9% detection (fidelity accounting): " << n999 << "\n"
        << "note: a 13-qubit password is sometimes credited with 99.9% detection; under the\n"
        << "(5/6)^2N accounting 13 qubits give " << format_probability(at13)
        << " and 99.9% first holds at " << n999 << " qubits.\n";
}

}  // namespace detail

struct DemoOptions {
    std::size_t qubits = 4;
    std::size_t rounds = 3;
    std::optional<std::uint64_t> seed;
};

// Runs the three protocol stages honestly: account setup, repeated password
// use over an ideal channel, verification, and a final check that the
// password is still the issued one.
inline int cmd_demo(const DemoOptions& options, std::ostream& out, std::ostream& err) {
    if (options.qubits < 1) {
        err << "error: --qubits must be >= 1\n";
        return kExitUsage;
    }
    if (options.rounds < 1) {
        err << "error: --rounds must be >= 1\n";
        return kExitUsage;
    }
    std::uint64_t seed = 0;
    try {
        seed = resolve_seed(options.seed);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    Rng rng(seed);
    out << "quantum password demo: " << options.qubits << " qubits, " << options.rounds
        << " rounds, seed " << seed << "\n";
    auto issued = setup_account(options.qubits, rng);
    out << "account " << issued.record.account_id << " issued\n";

    bool all_accepted = true;
    for (std::size_t round = 1; round <= options.rounds; ++round) {
        const auto result = verify(issued.record, issued.password, AcceptancePolicy::strict(), rng);
        out << "round " << round << ": " << (result.accepted ? "accept" : "REJECT")
            << " (p_accept = " << detail::format_probability(result.p_accept_analytic) << ")\n";
        all_accepted = all_accepted && result.accepted;
        issued.record = result.post_bob;
        issued.password = result.post_alice;
    }

    double min_f = 1.0;
    for (std::size_t i = 0; i < issued.password.length(); ++i)
        min_f = std::min(min_f, fidelity(issued.record.descriptions[i].state(), issued.password.qubits[i]));
    out << "final password fidelity to the issued state: min "
        << detail::format_probability(min_f)
        << (min_f >= 1.0 - kAlgebraicTol ? " (unchanged)" : " (disturbed)") << "\n";
    out << (all_accepted ? "all rounds accepted\n" : "verification failed\n");
    return all_accepted ? kExitOk : kExitRuntime;
}

struct AttackOptions {
    std::optional<std::string> config_path;
    std::optional<std::string> strategy;
    std::optional<double> asymmetry;
    std::optional<std::string> strike_point;
    std::optional<std::string> metric;
    std::optional<std::size_t> qubits;
    std::optional<std::size_t> trials;
    std::optional<std::string> noise_kind;
    std::optional<double> noise_strength;
    std::optional<double> loss_probability;
    std::optional<std::string> policy_mode;
    std::optional<double> threshold_fraction;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> csv_out;
};

// Runs one attack scenario from a file and/or flags and reports Eve's
// success statistics.
inline int cmd_attack(const AttackOptions& options, std::ostream& out, std::ostream& err) {
    ScenarioConfig config;
    try {
        if (options.config_path) config = load_scenario_file(*options.config_path);

        AttackScenario& sc = config.scenario;
        if (options.strategy) {
            const auto s = strategy_from_string(*options.strategy);
            if (!s) throw ConfigError("unknown strategy '" + *options.strategy + "'");
            sc.strategy = *s;
        }
        if (options.asymmetry) sc.asymmetry = *options.asymmetry;
        if (options.strike_point) {
            const auto s = strike_point_from_string(*options.strike_point);
            if (!s) throw ConfigError("unknown strike_point '" + *options.strike_point + "'");
            sc.strike_point = *s;
        }
        if (options.metric) {
            const auto m = metric_from_string(*options.metric);
            if (!m) throw ConfigError("unknown metric '" + *options.metric + "'");
            sc.metric = *m;
        }
        if (options.qubits) sc.n_qubits = *options.qubits;
        if (options.trials) sc.trials = *options.trials;
        if (options.noise_kind) {
            const auto k = noise_kind_from_string(*options.noise_kind);
            if (!k) throw ConfigError("unknown noise_kind '" + *options.noise_kind + "'");
            sc.channel.noise_kind = *k;
        }
        if (options.noise_strength) sc.channel.noise_strength = *options.noise_strength;
        if (options.loss_probability) sc.channel.loss_probability = *options.loss_probability;
        if (options.policy_mode) {
            if (*options.policy_mode == "strict")
                sc.policy.mode = PolicyMode::strict;
            else if (*options.policy_mode == "threshold")
                sc.policy.mode = PolicyMode::threshold;
            else
                throw ConfigError("unknown policy mode '" + *options.policy_mode + "'");
        }
        if (options.threshold_fraction) sc.policy.threshold_fraction = *options.threshold_fraction;

        const std::uint64_t seed = resolve_seed(options.seed, config.seed);
        sc.validate();

        Rng rng(seed);
        const auto results = run_attack(sc, rng);
        std::size_t wins = 0, accepted = 0, survived = 0, detected = 0;
        for (const auto& r : results) {
            wins += r.clone_accepted && r.alice_survives;
            accepted += r.clone_accepted;
            survived += r.alice_survives;
            detected += r.eve_detected;
        }
        const ConfidenceInterval ci = estimate_with_ci(wins, sc.trials);
        const double n_trials = static_cast<double>(sc.trials);

        out << "attack: " << to_string(sc.strategy) << " at " << to_string(sc.strike_point) << " ("
            << to_string(sc.metric) << " metric)\n";
        if (sc.strategy == Strategy::uqcm_asymmetric)
            out << "asymmetry: " << detail::format_probability(sc.asymmetry) << "\n";
        out << "qubits: " << sc.n_qubits << ", trials: " << sc.trials << ", seed: " << seed << "\n";
        out << "channel: " << to_string(sc.channel.noise_kind) << " (strength "
            << detail::format_probability(sc.channel.noise_strength) << ", loss "
            << detail::format_probability(sc.channel.loss_probability) << "), policy: "
            << (sc.policy.mode == PolicyMode::strict ? "strict" : "threshold") << " ("
            << detail::format_probability(sc.policy.threshold_fraction) << ")\n";
        out << "clone accepted: " << detail::format_probability(static_cast<double>(accepted) / n_trials)
            << ", alice survives: "
            << detail::format_probability(static_cast<double>(survived) / n_trials) << "\n";
        out << "success rate: " << detail::format_probability(ci.estimate) << " (95% CI ["
            << detail::format_probability(ci.low) << ", " << detail::format_probability(ci.high)
            << "], " << wins << "/" << sc.trials << ")\n";
        if (sc.is_cloning())
            out << "analytic bound (5/6)^2N: "
                << detail::format_probability(uqcm_success_bound(sc.n_qubits)) << "\n";
        out << "detection rate: "
            << detail::format_probability(static_cast<double>(detected) / n_trials) << "\n";
        if (sc.strike_point == StrikePoint::bob_server)
            out << "integrity check: covered by detection rate above (offline comparison)\n";

        if (options.csv_out) {
            std::ostringstream csv;
            csv << "strategy,strike_point,metric,n_qubits,trials,successes,estimate,ci_low,ci_high\n"
                << to_string(sc.strategy) << ',' << to_string(sc.strike_point) << ','
                << to_string(sc.metric) << ',' << sc.n_qubits << ',' << sc.trials << ',' << wins
                << ',' << detail::format_probability(ci.estimate) << ','
                << detail::format_probability(ci.low) << ',' << detail::format_probability(ci.high)
                << '\n';
            if (!detail::write_text_file(*options.csv_out, csv.str(), err)) return kExitRuntime;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

struct SweepOptions {
    std::size_t n_min = 1;
    std::size_t n_max = 15;
    std::size_t trials = 100000;
    std::string metric = "fidelity";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path;
};

// Attack success against password length; CSV goes to --out (or stdout), the
// human-readable summary and the detection-threshold note to stderr.
inline int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const auto metric = metric_from_string(options.metric);
        if (!metric) throw ConfigError("unknown metric '" + options.metric + "'");
        const std::uint64_t seed = resolve_seed(options.seed);

        const SweepTable table =
            sweep_password_length(options.n_min, options.n_max, options.trials, *metric, seed);
        const std::string csv = to_csv(table);
        if (options.out_path) {
            if (!detail::write_text_file(*options.out_path, csv, err)) return kExitRuntime;
            err << "wrote " << table.rows.size() << " rows to " << *options.out_path << " (seed "
                << seed << ")\n";
        } else {
            out << csv;
        }
        detail::print_detection_note(err);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

struct NoiseOptions {
    std::string kind = "depolarizing";
    std::vector<double> levels{0.0, 0.05, 0.1};
    std::vector<double> thresholds{1.0, 0.9, 0.8};
    std::size_t qubits = 8;
    std::size_t trials = 20000;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path;
};

// Security-usability grid over noise levels and acceptance thresholds.
inline int cmd_noise(const NoiseOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const auto kind = noise_kind_from_string(options.kind);
        if (!kind) throw ConfigError("unknown noise kind '" + options.kind + "'");
        if (options.levels.empty() || options.thresholds.empty())
            throw ConfigError("levels and thresholds must not be empty");
        const std::uint64_t seed = resolve_seed(options.seed);

        const auto rows = noise_tradeoff_sweep(*kind, options.levels, options.thresholds,
                                               options.qubits, options.trials, seed);
        const std::string csv = to_csv(rows);
        if (options.out_path) {
            if (!detail::write_text_file(*options.out_path, csv, err)) return kExitRuntime;
            err << "wrote " << rows.size() << " rows to " << *options.out_path << " (seed " << seed
                << ")\n";
        } else {
            out << csv;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace qupass
