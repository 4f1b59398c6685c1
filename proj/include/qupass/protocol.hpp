#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qupass/channels.hpp"
#include "qupass/gates.hpp"
#include "qupass/rng.hpp"
#include "qupass/state.hpp"

namespace qupass {

// Classical record of one password qubit's amplitudes. Only Bob holds these;
// they are what lets him re-prepare his copy without violating no-cloning.
struct QubitDescription {
    Complex c1;  // |0> amplitude
    Complex c2;  // |1> amplitude

    PureState state() const { return PureState::single(c1, c2); }

    static QubitDescription of(const PureState& single) {
        if (single.n_qubits() != 1) throw std::invalid_argument("description requires a single qubit");
        return {single.amplitude(0), single.amplitude(1)};
    }
};

// Bob's side of an account: classical descriptions, the live stored copy used
// for verification, and the offline reference copy used for integrity checks.
struct PasswordRecord {
    std::string account_id;
    std::vector<QubitDescription> descriptions;
    std::vector<DensityOp> stored_copy;
    std::vector<QubitDescription> offline_copy;

    std::size_t length() const { return descriptions.size(); }
};

// Alice's side: one single-qubit state per position. Pure and equal to Bob's
// description at issuance, generally mixed after noise or an attack. A qubit
// dropped by the channel keeps a maximally mixed placeholder and a lost flag;
// the placeholder is never silently verified.
struct QuantumPassword {
    std::vector<DensityOp> qubits;
    std::vector<bool> lost;

    std::size_t length() const { return qubits.size(); }
};

using Interceptor = std::function<DensityOp(const DensityOp&, std::size_t, Rng&)>;

// Quantum channel between Alice and Bob: independent per-qubit loss, then a
// noise map, then an optional interceptor hook.
struct Channel {
    NoiseKind noise_kind = NoiseKind::ideal;
    double noise_strength = 0.0;
    double loss_probability = 0.0;
    Interceptor interceptor;

    void validate() const {
        if (noise_strength < 0.0 || noise_strength > 1.0)
            throw std::invalid_argument("noise_strength must be in [0,1]");
        if (loss_probability < 0.0 || loss_probability > 1.0)
            throw std::invalid_argument("loss_probability must be in [0,1]");
    }

    bool is_ideal() const {
        return (noise_kind == NoiseKind::ideal || noise_strength == 0.0) && loss_probability == 0.0 &&
               !interceptor;
    }
};

enum class PolicyMode { strict, threshold };

// Acceptance rule for a verification round: strict requires every per-qubit
// test to return 0; threshold requires at least the given fraction to.
struct AcceptancePolicy {
    PolicyMode mode = PolicyMode::strict;
    double threshold_fraction = 1.0;

    static AcceptancePolicy strict() { return {}; }
    static AcceptancePolicy with_threshold(double fraction) {
        return {PolicyMode::threshold, fraction};
    }

    void validate() const {
        if (threshold_fraction <= 0.0 || threshold_fraction > 1.0)
            throw std::invalid_argument("threshold_fraction must be in (0,1]");
        if (mode == PolicyMode::strict && threshold_fraction != 1.0)
            throw std::invalid_argument("strict mode requires threshold_fraction = 1");
    }

    // Smallest number of 0 outcomes that satisfies the policy on n qubits.
    std::size_t required_zeros(std::size_t n) const {
        if (mode == PolicyMode::strict) return n;
        const double k = std::ceil(threshold_fraction * static_cast<double>(n) - 1e-9);
        return static_cast<std::size_t>(std::max(k, 0.0));
    }

    bool accepts(const std::vector<int>& outcomes) const {
        std::size_t zeros = 0;
        for (int o : outcomes) zeros += (o == 0);
        return zeros >= required_zeros(outcomes.size());
    }
};

struct VerificationResult {
    bool accepted;
    std::vector<int> per_qubit_outcomes;
    double p_accept_analytic;  // exact acceptance probability, computed before sampling
    QuantumPassword post_alice;
    PasswordRecord post_bob;
};

struct IssuedPassword {
    PasswordRecord record;
    QuantumPassword password;
};

struct TransmitResult {
    QuantumPassword password;
    std::vector<std::size_t> lost_indices;
};

struct SwapTestResult {
    int outcome;
    DensityOp post_joint;  // two qubits: (stored register, submitted register)
    double p0;
};

struct IntegrityReport {
    bool intact;
    std::vector<double> per_qubit_fidelity;
};

namespace detail {

// Verifier register ancilla (x) phi (x) psi after (H (x) I)(c-SWAP)(H (x) I),
// before the ancilla measurement.
inline DensityOp swap_test_circuit_output(const DensityOp& phi, const DensityOp& psi) {
    if (phi.n_qubits() != 1 || psi.n_qubits() != 1)
        throw std::invalid_argument("swap test takes single-qubit inputs");
    static const Gate h = hadamard();
    static const Gate cswap = fredkin();
    DensityOp reg = tensor(DensityOp::from_pure(PureState::basis(1, 0)), tensor(phi, psi));
    reg = apply_gate(reg, h, {0});
    reg = apply_gate(reg, cswap, {0, 1, 2});
    return apply_gate(reg, h, {0});
}

}  // namespace detail

// Exact ancilla-0 probability of the verification circuit: for pure inputs
// this is (1 + |<phi|psi>|^2)/2. No sampling, no state change.
inline double swap_test_p0(const DensityOp& phi, const DensityOp& psi) {
    return measure_probabilities(detail::swap_test_circuit_output(phi, psi), 0).first;
}

// One verification test: builds the three-qubit register, runs the circuit,
// measures the ancilla. Returns the sampled outcome, the renormalized joint
// state of the two compared registers, and the exact p0.
inline SwapTestResult swap_test_pair(const DensityOp& phi, const DensityOp& psi, Rng& rng) {
    const DensityOp gamma = detail::swap_test_circuit_output(phi, psi);
    const auto measured = measure_qubit(gamma, 0, rng);
    const double p0 = measured.outcome == 0 ? measured.probability : 1.0 - measured.probability;
    return {measured.outcome, partial_trace(measured.post, {1, 2}), p0};
}

// Creates an account of n_qubits Haar-random qubits. Issuance is trusted:
// Alice receives her copy through no channel, and Bob's stored and offline
// copies equal it per qubit.
inline IssuedPassword setup_account(std::size_t n_qubits, Rng& rng) {
    if (n_qubits < 1) throw std::invalid_argument("password must contain at least one qubit");
    PasswordRecord record;
    QuantumPassword password;
    char id[32];
    std::snprintf(id, sizeof id, "acct-%016llx", static_cast<unsigned long long>(rng.next_u64()));
    record.account_id = id;
    for (std::size_t i = 0; i < n_qubits; ++i) {
        const PureState q = haar_random_qubit(rng);
        const QubitDescription desc = QubitDescription::of(q);
        const DensityOp stored = DensityOp::from_pure(q);
        record.descriptions.push_back(desc);
        record.offline_copy.push_back(desc);
        record.stored_copy.push_back(stored);
        password.qubits.push_back(stored);
        password.lost.push_back(false);
    }
    return {std::move(record), std::move(password)};
}

// Sends a password through the channel. Per qubit, independently: with
// loss_probability the qubit is dropped (maximally mixed placeholder, lost
// flag, index recorded); otherwise the noise map applies, then the
// interceptor if one is set.
inline TransmitResult transmit(const QuantumPassword& password, const Channel& channel, Rng& rng) {
    channel.validate();
    TransmitResult result{password, {}};
    for (std::size_t i = 0; i < password.length(); ++i) {
        if (result.password.lost[i]) continue;
        if (rng.uniform() < channel.loss_probability) {
            result.password.qubits[i] = DensityOp::maximally_mixed(1);
            result.password.lost[i] = true;
            result.lost_indices.push_back(i);
            continue;
        }
        DensityOp q = apply_noise(result.password.qubits[i], 0, channel.noise_kind, channel.noise_strength);
        if (channel.interceptor) q = channel.interceptor(q, i, rng);
        result.password.qubits[i] = q;
    }
    return result;
}

// Exact acceptance probability for independent per-qubit pass probabilities
// under the policy. Strict mode is the plain product; threshold mode sums the
// tail of the number-of-zeros distribution.
inline double acceptance_probability(const std::vector<double>& p_zero, const AcceptancePolicy& policy) {
    const std::size_t n = p_zero.size();
    if (policy.mode == PolicyMode::strict) {
        double prod = 1.0;
        for (double p : p_zero) prod *= p;
        return prod;
    }
    std::vector<double> dist(n + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i + 1; k-- > 0;) {
            dist[k + 1] += dist[k] * p_zero[i];
            dist[k] *= 1.0 - p_zero[i];
        }
    double tail = 0.0;
    for (std::size_t k = policy.required_zeros(n); k <= n; ++k) tail += dist[k];
    return std::min(tail, 1.0);
}

// Runs the verification stage: a SWAP test per qubit between Bob's stored
// copy and the submitted qubit. Lost qubits count as failed outcomes and are
// not tested. Bob refreshes his stored copy from the classical descriptions;
// Alice receives the reduced state of each submitted register.
inline VerificationResult verify(const PasswordRecord& record, const QuantumPassword& submitted,
                                 const AcceptancePolicy& policy, Rng& rng) {
    if (submitted.length() != record.length())
        throw std::invalid_argument("submitted password length must match the record");
    policy.validate();
    const std::size_t n = record.length();

    std::vector<double> p_zero(n, 0.0);
    std::vector<DensityOp> gamma;
    gamma.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (submitted.lost[i]) {
            gamma.push_back(submitted.qubits[i]);  // placeholder, never tested
            continue;
        }
        gamma.push_back(detail::swap_test_circuit_output(record.stored_copy[i], submitted.qubits[i]));
        p_zero[i] = measure_probabilities(gamma[i], 0).first;
    }
    const double p_accept = acceptance_probability(p_zero, policy);

    VerificationResult result;
    result.p_accept_analytic = p_accept;
    result.per_qubit_outcomes.resize(n);
    result.post_alice.qubits.reserve(n);
    result.post_alice.lost = submitted.lost;
    for (std::size_t i = 0; i < n; ++i) {
        if (submitted.lost[i]) {
            result.per_qubit_outcomes[i] = 1;
            result.post_alice.qubits.push_back(submitted.qubits[i]);
            continue;
        }
        const auto measured = measure_qubit(gamma[i], 0, rng);
        result.per_qubit_outcomes[i] = measured.outcome;
        result.post_alice.qubits.push_back(partial_trace(measured.post, {2}));
    }
    result.accepted = policy.accepts(result.per_qubit_outcomes);

    result.post_bob = record;
    for (std::size_t i = 0; i < n; ++i)
        result.post_bob.stored_copy[i] = DensityOp::from_pure(record.descriptions[i].state());
    return result;
}

// Bob's offline comparison. He knows each description classically, so the
// default check is the exact fidelity of the stored copy against the offline
// reference; intact requires every fidelity >= 1 - 1e-9.
inline IntegrityReport bob_integrity_check(const PasswordRecord& record) {
    IntegrityReport report{true, {}};
    report.per_qubit_fidelity.reserve(record.length());
    for (std::size_t i = 0; i < record.length(); ++i) {
        const double f = fidelity(record.offline_copy[i].state(), record.stored_copy[i]);
        report.per_qubit_fidelity.push_back(f);
        if (f < 1.0 - kAlgebraicTol) report.intact = false;
    }
    return report;
}

// Sampled variant: projects each stored qubit onto {|psi>, |psi_perp>} and
// requires every outcome to land on |psi>. The fidelity list reports the
// exact values for reference.
inline IntegrityReport bob_integrity_check_sampled(const PasswordRecord& record, Rng& rng) {
    IntegrityReport report{true, {}};
    report.per_qubit_fidelity.reserve(record.length());
    for (std::size_t i = 0; i < record.length(); ++i) {
        const double f = fidelity(record.offline_copy[i].state(), record.stored_copy[i]);
        report.per_qubit_fidelity.push_back(f);
        if (rng.uniform() >= f) report.intact = false;
    }
    return report;
}

// Discards the old password and issues a fresh one for the same account,
// eliminating any information an eavesdropper may have gained.
inline IssuedPassword regenerate(const PasswordRecord& record, Rng& rng) {
    IssuedPassword fresh = setup_account(record.length(), rng);
    fresh.record.account_id = record.account_id;
    return fresh;
}

}  // namespace qupass
