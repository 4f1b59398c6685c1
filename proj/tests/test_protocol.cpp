#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "qupass/protocol.hpp"

using namespace qupass;

namespace {

DensityOp clone_like_state(const PureState& phi) {
    // (5/6)|phi><phi| + (1/6)|phi_perp><phi_perp|
    const Eigen::Vector2cd v = phi.amplitudes();
    Eigen::Vector2cd perp;
    perp << -std::conj(v(1)), std::conj(v(0));
    Eigen::MatrixXcd m = (5.0 / 6.0) * (v * v.adjoint()) + (1.0 / 6.0) * (perp * perp.adjoint());
    return DensityOp(1, std::move(m));
}

}  // namespace

TEST_CASE("account setup issues identical copies") {
    Rng rng(101);
    const IssuedPassword issued = setup_account(1, rng);
    REQUIRE(std::abs(fidelity(issued.password.qubits[0], issued.record.stored_copy[0]) - 1.0) <
            kConstructionTol);
    REQUIRE(std::abs(fidelity(issued.record.descriptions[0].state(), issued.password.qubits[0]) - 1.0) <
            kConstructionTol);

    Rng rng13(7);
    const IssuedPassword long_pw = setup_account(13, rng13);
    REQUIRE(long_pw.record.length() == 13);
    REQUIRE(long_pw.record.stored_copy.size() == 13);
    REQUIRE(long_pw.record.offline_copy.size() == 13);
    REQUIRE(long_pw.password.length() == 13);

    REQUIRE_THROWS_AS(setup_account(0, rng), std::invalid_argument);
}

TEST_CASE("account setup is deterministic in the seed") {
    Rng a(55), b(55), c(56);
    const auto pa = setup_account(4, a);
    const auto pb = setup_account(4, b);
    const auto pc = setup_account(4, c);
    for (std::size_t i = 0; i < 4; ++i) {
        REQUIRE(pa.record.descriptions[i].c1 == pb.record.descriptions[i].c1);
        REQUIRE(pa.record.descriptions[i].c2 == pb.record.descriptions[i].c2);
        REQUIRE(fidelity(pa.record.descriptions[i].state(), pc.record.descriptions[i].state()) < 1.0);
    }
}

TEST_CASE("ideal channel transmits unchanged") {
    Rng rng(61);
    const auto issued = setup_account(3, rng);
    const auto sent = transmit(issued.password, Channel{}, rng);
    REQUIRE(sent.lost_indices.empty());
    for (std::size_t i = 0; i < 3; ++i)
        REQUIRE((sent.password.qubits[i].matrix() - issued.password.qubits[i].matrix())
                    .cwiseAbs()
                    .maxCoeff() < kConstructionTol);
}

TEST_CASE("depolarizing transmission matches the closed form") {
    Rng rng(67);
    QuantumPassword pw{{DensityOp::from_pure(PureState::basis(1, 0))}, {false}};

    Channel full{NoiseKind::depolarizing, 1.0, 0.0, nullptr};
    const auto mixed = transmit(pw, full, rng);
    REQUIRE((mixed.password.qubits[0].matrix() - DensityOp::maximally_mixed(1).matrix())
                .cwiseAbs()
                .maxCoeff() < kConstructionTol);

    for (const double p : {0.1, 0.4, 0.9}) {
        Channel ch{NoiseKind::depolarizing, p, 0.0, nullptr};
        const auto out = transmit(pw, ch, rng);
        REQUIRE(std::abs(fidelity(PureState::basis(1, 0), out.password.qubits[0]) - (1.0 - p / 2.0)) <
                kConstructionTol);
    }
}

TEST_CASE("lost qubits are flagged and replaced by the mixed placeholder") {
    Rng rng(71);
    const auto issued = setup_account(5, rng);
    Channel lossy;
    lossy.loss_probability = 1.0;
    const auto sent = transmit(issued.password, lossy, rng);
    REQUIRE(sent.lost_indices.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        REQUIRE(sent.password.lost[i]);
        REQUIRE((sent.password.qubits[i].matrix() - DensityOp::maximally_mixed(1).matrix())
                    .cwiseAbs()
                    .maxCoeff() < kConstructionTol);
    }

    const auto rejected = verify(issued.record, sent.password, AcceptancePolicy::strict(), rng);
    REQUIRE_FALSE(rejected.accepted);
    REQUIRE(rejected.p_accept_analytic == 0.0);
    for (int o : rejected.per_qubit_outcomes) REQUIRE(o == 1);
}

TEST_CASE("channel interceptor hook runs after noise") {
    Rng rng(73);
    const auto issued = setup_account(2, rng);
    std::size_t calls = 0;
    Channel ch;
    ch.interceptor = [&](const DensityOp&, std::size_t, Rng&) {
        ++calls;
        return DensityOp::maximally_mixed(1);
    };
    const auto sent = transmit(issued.password, ch, rng);
    REQUIRE(calls == 2);
    REQUIRE(std::abs(fidelity(issued.record.descriptions[0].state(), sent.password.qubits[0]) - 0.5) <
            kConstructionTol);
}

TEST_CASE("swap test statistics follow the overlap formulas") {
    Rng rng(79);
    for (int trial = 0; trial < 200; ++trial) {
        const PureState phi = haar_random_qubit(rng);
        const PureState psi = haar_random_qubit(rng);
        const double overlap = fidelity(phi, psi);
        const double p0 = swap_test_p0(DensityOp::from_pure(phi), DensityOp::from_pure(psi));
        REQUIRE(std::abs(p0 - 0.5 * (1.0 + overlap)) < kConstructionTol);
    }
}

TEST_CASE("swap test on identical inputs is exact and non-disturbing") {
    Rng rng(83);
    const PureState phi = haar_random_qubit(rng);
    const DensityOp rho = DensityOp::from_pure(phi);
    for (int i = 0; i < 20; ++i) {
        const SwapTestResult r = swap_test_pair(rho, rho, rng);
        REQUIRE(r.outcome == 0);
        REQUIRE(r.p0 == 1.0);
        const DensityOp back = partial_trace(r.post_joint, {1});
        REQUIRE((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < kConstructionTol);
    }
}

TEST_CASE("swap test on orthogonal inputs is a coin flip") {
    Rng rng(89);
    const DensityOp zero = DensityOp::from_pure(PureState::basis(1, 0));
    const DensityOp one = DensityOp::from_pure(PureState::basis(1, 1));
    REQUIRE(std::abs(swap_test_p0(zero, one) - 0.5) < kConstructionTol);

    int zeros = 0;
    const int shots = 10000;
    for (int i = 0; i < shots; ++i) zeros += swap_test_pair(zero, one, rng).outcome == 0;
    const double se = std::sqrt(0.25 / shots);
    REQUIRE(std::abs(static_cast<double>(zeros) / shots - 0.5) <= 4.0 * se);
}

TEST_CASE("swap test p0 for a 5/6-fidelity clone is 11/12") {
    Rng rng(97);
    const PureState phi = haar_random_qubit(rng);
    const double p0 = swap_test_p0(DensityOp::from_pure(phi), clone_like_state(phi));
    REQUIRE(std::abs(p0 - 11.0 / 12.0) < kAlgebraicTol);
}

TEST_CASE("control parity convention does not change the statistics") {
    // Same circuit with a swap-on-|0> controlled-SWAP instead of the standard
    // swap-on-|1> gate: the Hadamard symmetrizes the control branch, so the
    // ancilla distribution is identical.
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(8, 8);
    m(1, 1) = m(2, 2) = 0;
    m(1, 2) = m(2, 1) = 1;
    const Gate cswap0(3, std::move(m));

    Rng rng(103);
    for (int trial = 0; trial < 50; ++trial) {
        const PureState phi = haar_random_qubit(rng);
        const PureState psi = haar_random_qubit(rng);
        PureState reg = tensor(tensor(PureState::basis(1, 0), phi), psi);
        reg = apply_gate(reg, hadamard(), {0});
        const PureState alt = apply_gate(reg, cswap0, {0, 1, 2});
        const PureState std_gate = apply_gate(reg, fredkin(), {0, 1, 2});
        const auto pa = measure_probabilities(apply_gate(alt, hadamard(), {0}), 0);
        const auto ps = measure_probabilities(apply_gate(std_gate, hadamard(), {0}), 0);
        REQUIRE(std::abs(pa.first - ps.first) < kConstructionTol);
        const double expected = 0.5 * (1.0 + fidelity(phi, psi));
        REQUIRE(std::abs(pa.first - expected) < kConstructionTol);
    }
}

TEST_CASE("honest verification accepts with analytic probability exactly 1") {
    Rng rng(107);
    auto issued = setup_account(8, rng);
    for (int round = 0; round < 100; ++round) {
        const auto result = verify(issued.record, issued.password, AcceptancePolicy::strict(), rng);
        REQUIRE(result.accepted);
        REQUIRE(result.p_accept_analytic == 1.0);
        issued.record = result.post_bob;
        issued.password = result.post_alice;
        for (std::size_t i = 0; i < issued.password.length(); ++i)
            REQUIRE(fidelity(issued.record.descriptions[i].state(), issued.password.qubits[i]) >=
                    1.0 - kAlgebraicTol);
    }
}

TEST_CASE("orthogonal submission has acceptance probability 2^-N") {
    Rng rng(109);
    const std::size_t n = 6;
    const auto issued = setup_account(n, rng);
    QuantumPassword wrong;
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2cd v = issued.record.descriptions[i].state().amplitudes();
        Eigen::Vector2cd perp;
        perp << -std::conj(v(1)), std::conj(v(0));
        Eigen::VectorXcd amps = perp;
        wrong.qubits.push_back(DensityOp::from_pure(PureState(1, std::move(amps))));
        wrong.lost.push_back(false);
    }
    const auto result = verify(issued.record, wrong, AcceptancePolicy::strict(), rng);
    REQUIRE(std::abs(result.p_accept_analytic - std::pow(2.0, -static_cast<double>(n))) <
            kConstructionTol);
}

TEST_CASE("a random guess is accepted three quarters of the time") {
    Rng rng(113);
    const int trials = 20000;
    int accepted = 0;
    for (int t = 0; t < trials; ++t) {
        const auto issued = setup_account(1, rng);
        QuantumPassword guess{{DensityOp::from_pure(haar_random_qubit(rng))}, {false}};
        accepted += verify(issued.record, guess, AcceptancePolicy::strict(), rng).accepted;
    }
    const double rate = static_cast<double>(accepted) / trials;
    const double se = std::sqrt(0.75 * 0.25 / trials);
    REQUIRE(std::abs(rate - 0.75) <= 3.0 * se);
}

TEST_CASE("sampled acceptance matches the analytic probability") {
    Rng rng(127);
    for (int rep = 0; rep < 2; ++rep) {
        const std::size_t n = 3;
        const auto issued = setup_account(n, rng);
        QuantumPassword submitted;
        for (std::size_t i = 0; i < n; ++i) {
            submitted.qubits.push_back(qupass::testing::random_mixed_qubit(rng));
            submitted.lost.push_back(false);
        }
        const AcceptancePolicy policy =
            rep == 0 ? AcceptancePolicy::strict() : AcceptancePolicy::with_threshold(0.6);

        const double p = verify(issued.record, submitted, policy, rng).p_accept_analytic;
        const int trials = 10000;
        int accepted = 0;
        for (int t = 0; t < trials; ++t)
            accepted += verify(issued.record, submitted, policy, rng).accepted;
        const double rate = static_cast<double>(accepted) / trials;
        const double se = std::sqrt(std::max(p * (1.0 - p), 1e-4) / trials);
        REQUIRE(std::abs(rate - p) <= 4.0 * se);
    }
}

TEST_CASE("strict acceptance probability is the product of per-qubit p0") {
    Rng rng(131);
    const std::size_t n = 5;
    const auto issued = setup_account(n, rng);
    QuantumPassword submitted;
    double prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        submitted.qubits.push_back(qupass::testing::random_mixed_qubit(rng));
        submitted.lost.push_back(false);
        prod *= swap_test_p0(issued.record.stored_copy[i], submitted.qubits[i]);
    }
    const auto result = verify(issued.record, submitted, AcceptancePolicy::strict(), rng);
    REQUIRE(std::abs(result.p_accept_analytic - prod) < kConstructionTol);
}

TEST_CASE("threshold acceptance probability matches a hand-computed case") {
    const std::vector<double> p{0.8, 0.6, 0.9};
    AcceptancePolicy policy = AcceptancePolicy::with_threshold(2.0 / 3.0);
    REQUIRE(policy.required_zeros(3) == 2);
    // P(at least 2 zeros) = .432 + .048 + .288 + .108
    REQUIRE(std::abs(acceptance_probability(p, policy) - 0.876) < kConstructionTol);

    REQUIRE(AcceptancePolicy::strict().required_zeros(7) == 7);
    REQUIRE(AcceptancePolicy::with_threshold(0.5).required_zeros(10) == 5);
    REQUIRE(AcceptancePolicy::with_threshold(0.75).required_zeros(10) == 8);
    REQUIRE_THROWS_AS(AcceptancePolicy::with_threshold(0.0).validate(), std::invalid_argument);
    REQUIRE_THROWS_AS(AcceptancePolicy::with_threshold(1.2).validate(), std::invalid_argument);
}

TEST_CASE("verification rejects mismatched lengths") {
    Rng rng(137);
    const auto issued = setup_account(2, rng);
    QuantumPassword shorter{{DensityOp::maximally_mixed(1)}, {false}};
    REQUIRE_THROWS_AS(verify(issued.record, shorter, AcceptancePolicy::strict(), rng),
                      std::invalid_argument);
}

TEST_CASE("honest acceptance through a depolarizing channel is 1 - p/4 per qubit") {
    Rng rng(139);
    for (const double p : {0.1, 0.3, 0.6}) {
        const auto issued = setup_account(1, rng);
        Channel ch{NoiseKind::depolarizing, p, 0.0, nullptr};
        const auto sent = transmit(issued.password, ch, rng);
        const auto result = verify(issued.record, sent.password, AcceptancePolicy::strict(), rng);
        REQUIRE(std::abs(result.p_accept_analytic - (1.0 - p / 4.0)) < kAlgebraicTol);
    }
}

TEST_CASE("integrity check detects tampering") {
    Rng rng(149);
    auto issued = setup_account(3, rng);

    const IntegrityReport fresh = bob_integrity_check(issued.record);
    REQUIRE(fresh.intact);
    for (double f : fresh.per_qubit_fidelity) REQUIRE(std::abs(f - 1.0) < kConstructionTol);

    issued.record.stored_copy[1] = clone_like_state(issued.record.descriptions[1].state());
    const IntegrityReport tampered = bob_integrity_check(issued.record);
    REQUIRE_FALSE(tampered.intact);
    REQUIRE(std::abs(tampered.per_qubit_fidelity[1] - 5.0 / 6.0) < kAlgebraicTol);

    issued.record.stored_copy[1] = apply_noise(
        DensityOp::from_pure(issued.record.descriptions[1].state()), 0, NoiseKind::depolarizing, 0.2);
    const IntegrityReport noisy = bob_integrity_check(issued.record);
    REQUIRE(std::abs(noisy.per_qubit_fidelity[1] - (1.0 - 0.2 / 2.0)) < kAlgebraicTol);
    REQUIRE_FALSE(noisy.intact);
}

TEST_CASE("sampled integrity check fires at the fidelity rate") {
    Rng rng(151);
    auto issued = setup_account(1, rng);
    issued.record.stored_copy[0] = clone_like_state(issued.record.descriptions[0].state());
    const int trials = 20000;
    int intact = 0;
    for (int t = 0; t < trials; ++t) intact += bob_integrity_check_sampled(issued.record, rng).intact;
    const double rate = static_cast<double>(intact) / trials;
    const double se = std::sqrt((5.0 / 6.0) * (1.0 / 6.0) / trials);
    REQUIRE(std::abs(rate - 5.0 / 6.0) <= 4.0 * se);
}

TEST_CASE("regeneration discards the old password") {
    Rng rng(157);
    const auto old_issue = setup_account(2, rng);
    const auto fresh = regenerate(old_issue.record, rng);
    REQUIRE(fresh.record.account_id == old_issue.record.account_id);
    REQUIRE(fresh.record.length() == 2);
    REQUIRE(bob_integrity_check(fresh.record).intact);
    for (std::size_t i = 0; i < 2; ++i)
        REQUIRE(fidelity(old_issue.record.descriptions[i].state(),
                         fresh.record.descriptions[i].state()) < 1.0 - 1e-6);

    // An old clone is no better than a random guess against the new record.
    const int trials = 20000;
    int accepted = 0;
    Rng mc(158);
    for (int t = 0; t < trials; ++t) {
        const auto account = setup_account(1, mc);
        const auto renewed = regenerate(account.record, mc);
        QuantumPassword stale{{account.password.qubits[0]}, {false}};
        accepted += verify(renewed.record, stale, AcceptancePolicy::strict(), mc).accepted;
    }
    const double rate = static_cast<double>(accepted) / trials;
    const double se = std::sqrt(0.75 * 0.25 / trials);
    REQUIRE(std::abs(rate - 0.75) <= 3.0 * se);
}
