#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qupass/attack.hpp"

namespace qupass {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSeed = 0x5eed0001;

// A complete attack scenario plus its run seed, as read from a scenario file
// or assembled from flags. Scenario files are flat INI sections
// [password]/[attack]/[channel]/[policy]/[run] with key=value lines; every
// flag mirrors a file key and overrides it.
struct ScenarioConfig {
    AttackScenario scenario;
    std::optional<std::uint64_t> seed;  // from file or flag; env/default fill in later
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] inline void config_fail(std::size_t line_no, const std::string& message) {
    throw ConfigError("line " + std::to_string(line_no) + ": " + message);
}

inline double parse_real(const std::string& value, std::size_t line_no, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        config_fail(line_no, "value of '" + key + "' is not a number: '" + value + "'");
    }
}

inline std::uint64_t parse_count(const std::string& value, std::size_t line_no, const std::string& key) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size() || value.find('-') != std::string::npos)
            throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        config_fail(line_no, "value of '" + key + "' is not a nonnegative integer: '" + value + "'");
    }
}

}  // namespace detail

// Parses scenario text. Unknown sections or keys are hard errors naming the
// offending key and line; range validation happens afterwards through
// AttackScenario::validate.
inline ScenarioConfig parse_scenario(const std::string& text) {
    ScenarioConfig config;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = detail::trim(raw);
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = detail::trim(line.substr(0, comment));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') detail::config_fail(line_no, "unterminated section header");
            section = line.substr(1, line.size() - 2);
            if (section != "password" && section != "attack" && section != "channel" &&
                section != "policy" && section != "run")
                detail::config_fail(line_no, "unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) detail::config_fail(line_no, "expected key=value, got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty()) detail::config_fail(line_no, "key '" + key + "' outside any section");

        AttackScenario& sc = config.scenario;
        if (section == "password") {
            if (key == "n_qubits")
                sc.n_qubits = static_cast<std::size_t>(detail::parse_count(value, line_no, key));
            else
                detail::config_fail(line_no, "unknown key '" + key + "' in section [password]");
        } else if (section == "attack") {
            if (key == "strategy") {
                const auto s = strategy_from_string(value);
                if (!s) detail::config_fail(line_no, "unknown strategy '" + value + "'");
                sc.strategy = *s;
            } else if (key == "asymmetry") {
                sc.asymmetry = detail::parse_real(value, line_no, key);
            } else if (key == "strike_point") {
                const auto s = strike_point_from_string(value);
                if (!s) detail::config_fail(line_no, "unknown strike_point '" + value + "'");
                sc.strike_point = *s;
            } else if (key == "metric") {
                const auto m = metric_from_string(value);
                if (!m) detail::config_fail(line_no, "unknown metric '" + value + "'");
                sc.metric = *m;
            } else {
                detail::config_fail(line_no, "unknown key '" + key + "' in section [attack]");
            }
        } else if (section == "channel") {
            if (key == "noise_kind") {
                const auto k = noise_kind_from_string(value);
                if (!k) detail::config_fail(line_no, "unknown noise_kind '" + value + "'");
                sc.channel.noise_kind = *k;
            } else if (key == "noise_strength") {
                sc.channel.noise_strength = detail::parse_real(value, line_no, key);
            } else if (key == "loss_probability") {
                sc.channel.loss_probability = detail::parse_real(value, line_no, key);
            } else {
                detail::config_fail(line_no, "unknown key '" + key + "' in section [channel]");
            }
        } else if (section == "policy") {
            if (key == "mode") {
                if (value == "strict")
                    sc.policy.mode = PolicyMode::strict;
                else if (value == "threshold")
                    sc.policy.mode = PolicyMode::threshold;
                else
                    detail::config_fail(line_no, "unknown policy mode '" + value + "'");
            } else if (key == "threshold_fraction") {
                sc.policy.threshold_fraction = detail::parse_real(value, line_no, key);
            } else {
                detail::config_fail(line_no, "unknown key '" + key + "' in section [policy]");
            }
        } else {  // run
            if (key == "trials")
                sc.trials = static_cast<std::size_t>(detail::parse_count(value, line_no, key));
            else if (key == "seed")
                config.seed = detail::parse_count(value, line_no, key);
            else
                detail::config_fail(line_no, "unknown key '" + key + "' in section [run]");
        }
    }
    return config;
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

// Seed precedence: explicit flag, then scenario file, then QUPASS_SEED, then
// the built-in default.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag_seed,
                                  std::optional<std::uint64_t> file_seed = std::nullopt) {
    if (flag_seed) return *flag_seed;
    if (file_seed) return *file_seed;
    if (const char* env = std::getenv("QUPASS_SEED")) {
        const std::string value(env);
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(value, &used);
            if (used != value.size() || value.find('-') != std::string::npos)
                throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("QUPASS_SEED is not a nonnegative integer: '" + value + "'");
        }
    }
    return kDefaultSeed;
}

}  // namespace qupass
