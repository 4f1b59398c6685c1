#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qupass/channels.hpp"
#include "qupass/cloning.hpp"
#include "qupass/gates.hpp"
#include "qupass/protocol.hpp"
#include "qupass/rng.hpp"
#include "qupass/state.hpp"

namespace qupass {

enum class Strategy { uqcm_symmetric, uqcm_asymmetric, random_guess, intercept_resend };
enum class StrikePoint { alice_station, in_transit, bob_server };

// fidelity: per-qubit success probabilities are the clone fidelities
// themselves (the accounting behind the (5/6)^{2N} bound). operational: the
// exact physical simulation of both verification circuits, including the
// correlations through the cloner's joint output.
enum class SuccessMetric { fidelity, operational };

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::uqcm_symmetric: return "uqcm_symmetric";
        case Strategy::uqcm_asymmetric: return "uqcm_asymmetric";
        case Strategy::random_guess: return "random_guess";
        case Strategy::intercept_resend: return "intercept_resend";
    }
    return "?";
}

inline const char* to_string(StrikePoint s) {
    switch (s) {
        case StrikePoint::alice_station: return "alice_station";
        case StrikePoint::in_transit: return "in_transit";
        case StrikePoint::bob_server: return "bob_server";
    }
    return "?";
}

inline const char* to_string(SuccessMetric m) {
    return m == SuccessMetric::fidelity ? "fidelity" : "operational";
}

inline std::optional<Strategy> strategy_from_string(const std::string& s) {
    if (s == "uqcm_symmetric") return Strategy::uqcm_symmetric;
    if (s == "uqcm_asymmetric") return Strategy::uqcm_asymmetric;
    if (s == "random_guess") return Strategy::random_guess;
    if (s == "intercept_resend") return Strategy::intercept_resend;
    return std::nullopt;
}

inline std::optional<StrikePoint> strike_point_from_string(const std::string& s) {
    if (s == "alice_station") return StrikePoint::alice_station;
    if (s == "in_transit") return StrikePoint::in_transit;
    if (s == "bob_server") return StrikePoint::bob_server;
    return std::nullopt;
}

inline std::optional<SuccessMetric> metric_from_string(const std::string& s) {
    if (s == "fidelity") return SuccessMetric::fidelity;
    if (s == "operational") return SuccessMetric::operational;
    return std::nullopt;
}

struct AttackScenario {
    Strategy strategy = Strategy::uqcm_symmetric;
    double asymmetry = 0.5;  // only meaningful for uqcm_asymmetric
    StrikePoint strike_point = StrikePoint::alice_station;
    std::size_t n_qubits = 1;
    std::size_t trials = 10000;
    SuccessMetric metric = SuccessMetric::fidelity;
    Channel channel;           // login path for every submission
    AcceptancePolicy policy;   // Bob's acceptance rule

    bool is_cloning() const {
        return strategy == Strategy::uqcm_symmetric || strategy == Strategy::uqcm_asymmetric;
    }

    void validate() const {
        if (n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1");
        if (trials < 1) throw std::invalid_argument("trials must be >= 1");
        if (strategy == Strategy::uqcm_asymmetric && !(asymmetry >= 0.0 && asymmetry <= 1.0))
            throw std::invalid_argument("asymmetry must be in [0,1]");
        channel.validate();
        policy.validate();
        if (channel.interceptor)
            throw std::invalid_argument("attack scenarios model the adversary directly; "
                                        "channel interceptors are not allowed here");
        if (metric == SuccessMetric::fidelity && !is_cloning())
            throw std::invalid_argument("the fidelity metric is defined only for cloning strategies");
        if (metric == SuccessMetric::fidelity && !channel.is_ideal())
            throw std::invalid_argument("the fidelity metric assumes an ideal channel");
    }
};

// Per-trial outcome: did Alice's next login still pass, was Eve's clone
// accepted, and was Eve detected (a failed Alice login or a fired integrity
// check).
struct AttackTrialResult {
    bool alice_survives;
    bool clone_accepted;
    bool eve_detected;
};

// (5/6)^{2N}: the cloning-attack success bound for an N-qubit password.
inline double uqcm_success_bound(std::size_t n_qubits) {
    if (n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1");
    return std::pow(5.0 / 6.0, 2.0 * static_cast<double>(n_qubits));
}

namespace detail {

// Growing pure-state register used to sample exact joint trial statistics.
// Entangled slots stay entangled; channels act as sampled Kraus branches, so
// the ensemble over trials reproduces the density-matrix evolution exactly.
class PureRegister {
public:
    explicit PureRegister(const PureState& s) : n_(s.n_qubits()), v_(s.amplitudes()) {}

    int n_qubits() const { return n_; }

    // Appends a fresh qubit in the given state; returns its slot index.
    int append(const PureState& q) {
        if (q.n_qubits() != 1) throw std::invalid_argument("append takes a single qubit");
        Eigen::VectorXcd out(v_.size() * 2);
        for (Eigen::Index i = 0; i < v_.size(); ++i) {
            out(2 * i) = v_(i) * q.amplitude(0);
            out(2 * i + 1) = v_(i) * q.amplitude(1);
        }
        v_ = std::move(out);
        return n_++;
    }

    void apply_single(const Eigen::Matrix2cd& u, int slot) {
        apply_local(v_, n_, u, {slot});
    }

    void apply_noise(int slot, NoiseKind kind, double strength, Rng& rng) {
        if (kind == NoiseKind::ideal || strength == 0.0) return;
        const auto kraus = kraus_operators(kind, strength);
        std::vector<Eigen::VectorXcd> branches;
        std::vector<double> weights;
        double total = 0.0;
        for (const auto& k : kraus) {
            Eigen::VectorXcd b = v_;
            apply_local(b, n_, k, {slot});
            const double w = b.squaredNorm();
            branches.push_back(std::move(b));
            weights.push_back(w);
            total += w;
        }
        double r = rng.uniform() * total;
        std::size_t pick = 0;
        for (; pick + 1 < weights.size(); ++pick) {
            if (r < weights[pick]) break;
            r -= weights[pick];
        }
        v_ = branches[pick] / std::sqrt(weights[pick]);
    }

    // Computational-basis measurement of one slot; collapses the register.
    int measure(int slot, Rng& rng) {
        const std::size_t mask = std::size_t{1} << bit_shift(n_, slot);
        double w0 = 0.0, w1 = 0.0;
        for (Eigen::Index i = 0; i < v_.size(); ++i)
            ((static_cast<std::size_t>(i) & mask) ? w1 : w0) += std::norm(v_(i));
        const auto [p0, p1] = normalized_weights(w0, w1);
        const int outcome = rng.uniform() < p1 ? 1 : 0;
        const double weight = outcome ? w1 : w0;
        for (Eigen::Index i = 0; i < v_.size(); ++i) {
            const bool keep = ((static_cast<std::size_t>(i) & mask) != 0) == (outcome == 1);
            v_(i) = keep ? v_(i) / std::sqrt(weight) : Complex{0.0, 0.0};
        }
        return outcome;
    }

    // Channel loss: collapses the slot and re-prepares it uniformly at
    // random, which equals the maximally mixed placeholder in distribution.
    void randomize(int slot, Rng& rng) {
        const int b = measure(slot, rng);
        const int fresh = rng.uniform() < 0.5 ? 0 : 1;
        if (fresh != b) {
            Eigen::Matrix2cd x;
            x << 0, 1, 1, 0;
            apply_single(x, slot);
        }
    }

    // SWAP-test instrument between two slots: projects onto the symmetric
    // (outcome 0) or antisymmetric (outcome 1) subspace with Born weights.
    // Identical to running the ancilla circuit and measuring the ancilla.
    int swap_test(int a, int b, Rng& rng) {
        const Eigen::VectorXcd swapped = swap_slots(a, b);
        const Eigen::VectorXcd sym = 0.5 * (v_ + swapped);
        const Eigen::VectorXcd anti = 0.5 * (v_ - swapped);
        const double w0 = sym.squaredNorm(), w1 = anti.squaredNorm();
        const auto [p0, p1] = normalized_weights(w0, w1);
        const int outcome = rng.uniform() < p1 ? 1 : 0;
        v_ = outcome ? anti / std::sqrt(w1) : sym / std::sqrt(w0);
        return outcome;
    }

    double swap_test_p0(int a, int b) const {
        const Eigen::VectorXcd swapped = swap_slots(a, b);
        const double w0 = 0.25 * (v_ + swapped).squaredNorm();
        const double w1 = 0.25 * (v_ - swapped).squaredNorm();
        return normalized_weights(w0, w1).first;
    }

    // Reduced single-qubit density of a slot.
    Eigen::Matrix2cd marginal(int slot) const {
        const std::size_t mask = std::size_t{1} << bit_shift(n_, slot);
        Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
        for (std::size_t i = 0; i < static_cast<std::size_t>(v_.size()); ++i) {
            if (i & mask) continue;
            const Complex a0 = v_(static_cast<Eigen::Index>(i));
            const Complex a1 = v_(static_cast<Eigen::Index>(i | mask));
            m(0, 0) += a0 * std::conj(a0);
            m(0, 1) += a0 * std::conj(a1);
            m(1, 0) += a1 * std::conj(a0);
            m(1, 1) += a1 * std::conj(a1);
        }
        return m;
    }

private:
    Eigen::VectorXcd swap_slots(int a, int b) const {
        const std::size_t ma = std::size_t{1} << bit_shift(n_, a);
        const std::size_t mb = std::size_t{1} << bit_shift(n_, b);
        Eigen::VectorXcd out(v_.size());
        for (std::size_t i = 0; i < static_cast<std::size_t>(v_.size()); ++i) {
            const bool ba = i & ma, bb = i & mb;
            const std::size_t j = (ba == bb) ? i : (i ^ ma ^ mb);
            out(static_cast<Eigen::Index>(j)) = v_(static_cast<Eigen::Index>(i));
        }
        return out;
    }

    int n_;
    Eigen::VectorXcd v_;
};

struct StrikeSetup {
    PureRegister reg;
    int eve_slot;    // Eve's submission
    int alice_slot;  // Alice's qubit for her next login
    int bob_slot;    // Bob's stored register when the strike disturbed it, else -1
};

// Builds the per-qubit post-strike state. For in_transit strikes the qubit
// picks up channel noise before Eve touches it; losses are modeled only on
// the two login submissions.
inline StrikeSetup make_strike(const AttackScenario& sc, const PureState& phi, Rng& rng) {
    switch (sc.strategy) {
        case Strategy::uqcm_symmetric:
        case Strategy::uqcm_asymmetric: {
            PureState input = phi;
            if (sc.strike_point == StrikePoint::in_transit)
                input = apply_noise_trajectory(input, 0, sc.channel.noise_kind,
                                               sc.channel.noise_strength, rng);
            const PureState joint = sc.strategy == Strategy::uqcm_symmetric
                                        ? symmetric_uqcm_state(input)
                                        : asymmetric_uqcm_state(input, sc.asymmetry);
            StrikeSetup s{PureRegister(joint), 0, 1, -1};
            if (sc.strike_point == StrikePoint::bob_server) {
                s.bob_slot = 1;  // the forwarded output sits in Bob's memory
                s.alice_slot = s.reg.append(phi);
            }
            return s;
        }
        case Strategy::random_guess: {
            StrikeSetup s{PureRegister(tensor(phi, haar_random_qubit(rng))), 1, 0, -1};
            return s;
        }
        case Strategy::intercept_resend: {
            PureRegister reg(phi);
            if (sc.strike_point == StrikePoint::in_transit)
                reg.apply_noise(0, sc.channel.noise_kind, sc.channel.noise_strength, rng);
            // Measure in a Haar-random basis and forward the eigenstate; Eve
            // keeps a fresh copy of it (she knows the outcome classically).
            const PureState e0 = haar_random_qubit(rng);
            Eigen::Matrix2cd u;
            u << e0.amplitude(0), -std::conj(e0.amplitude(1)),
                 e0.amplitude(1), std::conj(e0.amplitude(0));
            reg.apply_single(u.adjoint(), 0);
            const int outcome = reg.measure(0, rng);
            reg.apply_single(u, 0);
            const PureState eigenstate(1, u.col(outcome));

            StrikeSetup s{std::move(reg), -1, 0, -1};
            if (sc.strike_point == StrikePoint::bob_server) {
                s.bob_slot = 0;  // Bob's stored qubit collapsed
                s.eve_slot = s.reg.append(eigenstate);
                s.alice_slot = s.reg.append(phi);  // Alice untouched
            } else {
                s.eve_slot = s.reg.append(eigenstate);
            }
            return s;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace detail

// Runs the full attack Monte Carlo. Each trial uses a fresh account. Under
// the operational metric Eve submits her clone first, then Alice verifies her
// own (possibly disturbed) password; both submissions traverse the scenario
// channel and the joint statistics of the cloner output are sampled exactly.
// Under the fidelity metric each qubit's two events are Bernoulli draws with
// probabilities f_clone and f_forwarded. Strikes at Bob's server also run his
// integrity check.
inline std::vector<AttackTrialResult> run_attack(const AttackScenario& scenario, Rng& rng) {
    scenario.validate();
    const std::size_t n = scenario.n_qubits;
    std::vector<AttackTrialResult> results;
    results.reserve(scenario.trials);

    if (scenario.metric == SuccessMetric::fidelity) {
        const auto [f_clone, f_forwarded] = scenario.strategy == Strategy::uqcm_symmetric
                                                ? std::pair{5.0 / 6.0, 5.0 / 6.0}
                                                : asymmetric_fidelities(scenario.asymmetry);
        // An exact offline comparison always detects an imperfect copy.
        const bool integrity_fires =
            scenario.strike_point == StrikePoint::bob_server && f_forwarded < 1.0 - kAlgebraicTol;
        std::vector<int> eve_out(n), alice_out(n);
        for (std::size_t t = 0; t < scenario.trials; ++t) {
            for (std::size_t i = 0; i < n; ++i) {
                eve_out[i] = rng.bernoulli(f_clone) ? 0 : 1;
                alice_out[i] = rng.bernoulli(f_forwarded) ? 0 : 1;
            }
            const bool accepted = scenario.policy.accepts(eve_out);
            const bool survives = scenario.policy.accepts(alice_out);
            results.push_back({survives, accepted, !survives || integrity_fires});
        }
        return results;
    }

    std::vector<int> eve_out(n), alice_out(n);
    for (std::size_t t = 0; t < scenario.trials; ++t) {
        bool integrity_fired = false;
        for (std::size_t i = 0; i < n; ++i) {
            const PureState phi = haar_random_qubit(rng);
            detail::StrikeSetup s = detail::make_strike(scenario, phi, rng);

            if (scenario.strike_point == StrikePoint::bob_server && s.bob_slot >= 0) {
                const Eigen::Matrix2cd m = s.reg.marginal(s.bob_slot);
                const double f = (phi.amplitudes().adjoint() * m * phi.amplitudes())(0).real();
                if (f < 1.0 - kAlgebraicTol) integrity_fired = true;
            }

            // Eve's login with her clone.
            const bool eve_lost = scenario.channel.loss_probability > 0.0 &&
                                  rng.uniform() < scenario.channel.loss_probability;
            if (eve_lost) {
                s.reg.randomize(s.eve_slot, rng);
                eve_out[i] = 1;
            } else {
                s.reg.apply_noise(s.eve_slot, scenario.channel.noise_kind,
                                  scenario.channel.noise_strength, rng);
                const int stored = s.bob_slot >= 0 ? s.bob_slot : s.reg.append(phi);
                eve_out[i] = s.reg.swap_test(stored, s.eve_slot, rng);
            }

            // Alice's next login; Bob's stored copy is refreshed by then.
            const bool alice_lost = scenario.channel.loss_probability > 0.0 &&
                                    rng.uniform() < scenario.channel.loss_probability;
            if (alice_lost) {
                alice_out[i] = 1;
            } else {
                s.reg.apply_noise(s.alice_slot, scenario.channel.noise_kind,
                                  scenario.channel.noise_strength, rng);
                const int fresh = s.reg.append(phi);
                alice_out[i] = s.reg.swap_test(fresh, s.alice_slot, rng);
            }
        }
        const bool accepted = scenario.policy.accepts(eve_out);
        const bool survives = scenario.policy.accepts(alice_out);
        results.push_back({survives, accepted, !survives || integrity_fired});
    }
    return results;
}

// Exact per-qubit probability that both verifications pass for a cloning
// strategy under an ideal channel: the full density-matrix evaluation of both
// SWAP-test circuits on the three-qubit cloner output. Universality makes it
// input independent.
inline double operational_success_single_qubit(Strategy strategy, double asymmetry = 0.5) {
    if (strategy != Strategy::uqcm_symmetric && strategy != Strategy::uqcm_asymmetric)
        throw std::invalid_argument("operational reference is defined for cloning strategies");
    const PureState phi = PureState::basis(1, 0);
    const PureState joint = strategy == Strategy::uqcm_symmetric
                                ? symmetric_uqcm_state(phi)
                                : asymmetric_uqcm_state(phi, asymmetry);
    const DensityOp stored = DensityOp::from_pure(phi);
    const Gate h = hadamard();
    const Gate cswap = fredkin();

    auto project_anc0 = [](const Eigen::MatrixXcd& m, int n_qubits) {
        // Zeroes the ancilla-1 block without renormalizing.
        const std::size_t mask = std::size_t{1} << detail::bit_shift(n_qubits, 0);
        Eigen::MatrixXcd out = m;
        for (std::size_t i = 0; i < static_cast<std::size_t>(m.rows()); ++i)
            for (std::size_t j = 0; j < static_cast<std::size_t>(m.cols()); ++j)
                if ((i & mask) || (j & mask)) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 0;
        return out;
    };

    // Eve's test: ancilla + stored + (kept, forwarded, machine).
    DensityOp reg = tensor(DensityOp::from_pure(PureState::basis(1, 0)),
                           tensor(stored, DensityOp::from_pure(joint)));
    reg = apply_gate(reg, h, {0});
    reg = apply_gate(reg, cswap, {0, 1, 2});
    reg = apply_gate(reg, h, {0});
    Eigen::MatrixXcd projected = project_anc0(reg.matrix(), 5);
    const double p_eve = projected.trace().real();
    const DensityOp after_eve =
        partial_trace(DensityOp::unchecked(5, projected / p_eve), {2, 3, 4});

    // Alice's test against Bob's refreshed copy; her qubit is the forwarded slot.
    reg = tensor(DensityOp::from_pure(PureState::basis(1, 0)), tensor(stored, after_eve));
    reg = apply_gate(reg, h, {0});
    reg = apply_gate(reg, cswap, {0, 1, 3});
    reg = apply_gate(reg, h, {0});
    projected = project_anc0(reg.matrix(), 5);
    const double p_alice_given_eve = projected.trace().real();

    return p_eve * p_alice_given_eve;
}

}  // namespace qupass
