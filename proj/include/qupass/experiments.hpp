#pragma once

#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qupass/attack.hpp"
#include "qupass/protocol.hpp"
#include "qupass/stats.hpp"

namespace qupass {

struct SweepRow {
    std::size_t n_qubits;
    std::string metric;
    std::size_t trials;
    std::size_t successes;
    double estimate;
    double ci_low;
    double ci_high;
    double analytic;
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

struct NoiseTradeoffRow {
    double noise_strength;
    double threshold_fraction;
    double honest_accept_rate;  // usability
    double eve_success_rate;    // security
    std::size_t trials;
};

namespace detail {

// Probabilities are serialized with 6 significant digits; counts exactly.
inline std::string format_probability(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", p);
    return buf;
}

inline std::size_t count_successes(const std::vector<AttackTrialResult>& results) {
    std::size_t wins = 0;
    for (const auto& r : results) wins += r.clone_accepted && r.alice_survives;
    return wins;
}

}  // namespace detail

// Success rate of the symmetric-cloner attack for each password length in
// [n_min, n_max]. The analytic column carries (5/6)^{2N} for the fidelity
// metric and the brute-force per-qubit joint probability raised to N for the
// operational metric. Per-length child streams keyed by (N, metric) keep rows
// independent of each other.
inline SweepTable sweep_password_length(std::size_t n_min, std::size_t n_max, std::size_t trials,
                                        SuccessMetric metric, std::uint64_t seed) {
    if (n_min < 1 || n_min > n_max || n_max > 20)
        throw std::invalid_argument("password length range must satisfy 1 <= n_min <= n_max <= 20");
    if (trials < 1000) throw std::invalid_argument("trials must be >= 1000");

    const Rng master(seed);
    const double per_qubit_operational =
        metric == SuccessMetric::operational
            ? operational_success_single_qubit(Strategy::uqcm_symmetric)
            : 0.0;

    SweepTable table;
    for (std::size_t n = n_min; n <= n_max; ++n) {
        Rng rng = master.fork(n, metric == SuccessMetric::fidelity ? 0 : 1);
        AttackScenario sc;
        sc.n_qubits = n;
        sc.trials = trials;
        sc.metric = metric;
        const std::size_t wins = detail::count_successes(run_attack(sc, rng));
        const ConfidenceInterval ci = estimate_with_ci(wins, trials);
        const double analytic = metric == SuccessMetric::fidelity
                                    ? uqcm_success_bound(n)
                                    : std::pow(per_qubit_operational, static_cast<double>(n));
        table.rows.push_back({n, to_string(metric), trials, wins, ci.estimate, ci.low, ci.high, analytic});
    }
    return table;
}

// Smallest password length whose analytic attack success drops the detection
// probability to the target. Closed form, no sampling.
inline std::size_t min_length_for_detection(double target_detection, SuccessMetric metric) {
    if (!(target_detection > 0.0 && target_detection < 1.0))
        throw std::invalid_argument("target detection must be in (0,1)");
    const double per_qubit = metric == SuccessMetric::fidelity
                                 ? 25.0 / 36.0
                                 : operational_success_single_qubit(Strategy::uqcm_symmetric);
    const double allowed = 1.0 - target_detection;
    std::size_t n = 1;
    double success = per_qubit;
    while (success > allowed) {
        ++n;
        success *= per_qubit;
    }
    return n;
}

// Security-usability grid: honest acceptance through a noisy channel against
// the symmetric-cloner operational attack through the same channel, both
// under the threshold policy. Cell streams are keyed by the parameter values,
// so enlarging the grid never perturbs existing cells.
inline std::vector<NoiseTradeoffRow> noise_tradeoff_sweep(NoiseKind kind,
                                                          const std::vector<double>& noise_levels,
                                                          const std::vector<double>& thresholds,
                                                          std::size_t n_qubits, std::size_t trials,
                                                          std::uint64_t seed) {
    if (n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    const Rng master(seed);
    std::vector<NoiseTradeoffRow> rows;
    for (const double level : noise_levels) {
        if (level < 0.0 || level > 1.0) throw std::invalid_argument("noise level must be in [0,1]");
        for (const double threshold : thresholds) {
            const AcceptancePolicy policy = threshold == 1.0
                                                ? AcceptancePolicy::strict()
                                                : AcceptancePolicy::with_threshold(threshold);
            policy.validate();
            const Channel channel{kind, level, 0.0, nullptr};

            Rng honest_rng = master.fork(std::bit_cast<std::uint64_t>(level),
                                         std::bit_cast<std::uint64_t>(threshold));
            std::size_t honest_ok = 0;
            for (std::size_t t = 0; t < trials; ++t) {
                auto issued = setup_account(n_qubits, honest_rng);
                const auto sent = transmit(issued.password, channel, honest_rng);
                honest_ok += verify(issued.record, sent.password, policy, honest_rng).accepted;
            }

            // Same cell key with the (otherwise unused) sign bit marking Eve's stream.
            Rng eve_rng = master.fork(std::bit_cast<std::uint64_t>(level),
                                      std::bit_cast<std::uint64_t>(threshold) | (std::uint64_t{1} << 63));
            AttackScenario sc;
            sc.strike_point = StrikePoint::in_transit;
            sc.metric = SuccessMetric::operational;
            sc.n_qubits = n_qubits;
            sc.trials = trials;
            sc.channel = channel;
            sc.policy = policy;
            const std::size_t eve_ok = detail::count_successes(run_attack(sc, eve_rng));

            rows.push_back({level, threshold,
                            static_cast<double>(honest_ok) / static_cast<double>(trials),
                            static_cast<double>(eve_ok) / static_cast<double>(trials), trials});
        }
    }
    return rows;
}

inline std::string to_csv(const SweepTable& table) {
    std::ostringstream out;
    out << "n_qubits,metric,trials,successes,estimate,ci_low,ci_high,analytic\n";
    for (const auto& r : table.rows)
        out << r.n_qubits << ',' << r.metric << ',' << r.trials << ',' << r.successes << ','
            << detail::format_probability(r.estimate) << ',' << detail::format_probability(r.ci_low)
            << ',' << detail::format_probability(r.ci_high) << ','
            << detail::format_probability(r.analytic) << '\n';
    return out.str();
}

inline std::string to_csv(const std::vector<NoiseTradeoffRow>& rows) {
    std::ostringstream out;
    out << "noise,threshold,honest_accept,eve_success,trials\n";
    for (const auto& r : rows)
        out << detail::format_probability(r.noise_strength) << ','
            << detail::format_probability(r.threshold_fraction) << ','
            << detail::format_probability(r.honest_accept_rate) << ','
            << detail::format_probability(r.eve_success_rate) << ',' << r.trials << '\n';
    return out.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace detail

inline SweepTable sweep_table_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "n_qubits,metric,trials,successes,estimate,ci_low,ci_high,analytic")
        throw std::invalid_argument("unrecognized sweep CSV header");
    SweepTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 8) throw std::invalid_argument("malformed sweep CSV row");
        table.rows.push_back({std::stoul(f[0]), f[1], std::stoul(f[2]), std::stoul(f[3]),
                              std::stod(f[4]), std::stod(f[5]), std::stod(f[6]), std::stod(f[7])});
    }
    return table;
}

inline std::vector<NoiseTradeoffRow> noise_rows_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "noise,threshold,honest_accept,eve_success,trials")
        throw std::invalid_argument("unrecognized noise CSV header");
    std::vector<NoiseTradeoffRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 5) throw std::invalid_argument("malformed noise CSV row");
        rows.push_back({std::stod(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3]),
                        std::stoul(f[4])});
    }
    return rows;
}

}  // namespace qupass
