#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qupass/state.hpp"

namespace qupass {

// Unitary on 1-3 qubits. apply_gate embeds it at the chosen target qubits;
// untargeted qubits are untouched.
class Gate {
public:
    Gate(int arity, Eigen::MatrixXcd matrix) : arity_(arity), u_(std::move(matrix)) {
        if (arity_ < 1 || arity_ > 3) throw std::invalid_argument("gate arity must be 1, 2 or 3");
        const auto dim = Eigen::Index{1} << arity_;
        if (u_.rows() != dim || u_.cols() != dim)
            throw std::invalid_argument("gate matrix must be 2^arity x 2^arity");
        if (!detail::all_finite(u_)) throw std::invalid_argument("gate matrix must be finite");
        const Eigen::MatrixXcd gram = u_ * u_.adjoint();
        if ((gram - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() > kAlgebraicTol)
            throw std::invalid_argument("gate matrix must be unitary");
    }

    int arity() const { return arity_; }
    const Eigen::MatrixXcd& matrix() const { return u_; }

    Gate adjoint() const {
        Gate g = *this;
        g.u_ = u_.adjoint();
        return g;
    }

private:
    int arity_;
    Eigen::MatrixXcd u_;
};

inline Gate identity_gate(int arity = 1) {
    const auto dim = Eigen::Index{1} << arity;
    return Gate(arity, Eigen::MatrixXcd::Identity(dim, dim));
}

// |a> -> (|0> + (-1)^a |1>)/sqrt(2)
inline Gate hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd m(2, 2);
    m << s, s, s, -s;
    return Gate(1, std::move(m));
}

inline Gate pauli_x() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return Gate(1, std::move(m));
}

inline Gate pauli_y() {
    Eigen::MatrixXcd m(2, 2);
    m << Complex{0, 0}, Complex{0, -1}, Complex{0, 1}, Complex{0, 0};
    return Gate(1, std::move(m));
}

inline Gate pauli_z() {
    Eigen::MatrixXcd m(2, 2);
    m << 1, 0, 0, -1;
    return Gate(1, std::move(m));
}

inline Gate swap_gate() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4);
    m(1, 1) = m(2, 2) = 0;
    m(1, 2) = m(2, 1) = 1;
    return Gate(2, std::move(m));
}

// Controlled-SWAP. The first target qubit is the control; |1> activates the
// swap of the remaining two (the standard Fredkin convention).
inline Gate fredkin() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(8, 8);
    m(5, 5) = m(6, 6) = 0;
    m(5, 6) = m(6, 5) = 1;
    return Gate(3, std::move(m));
}

namespace detail {

inline void check_targets(int n_qubits, int arity, const std::vector<int>& targets) {
    if (static_cast<int>(targets.size()) != arity)
        throw std::invalid_argument("target count must equal gate arity");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0 || targets[i] >= n_qubits) throw std::out_of_range("target qubit out of range");
        for (std::size_t j = i + 1; j < targets.size(); ++j)
            if (targets[i] == targets[j]) throw std::invalid_argument("target qubits must be distinct");
    }
}

// Applies an arbitrary 2^k x 2^k matrix at the target qubits of a state
// vector. targets[0] supplies the most significant bit of the local index.
inline void apply_local(Eigen::VectorXcd& v, int n_qubits, const Eigen::MatrixXcd& m,
                        const std::vector<int>& targets) {
    const int k = static_cast<int>(targets.size());
    const std::size_t sub = std::size_t{1} << k;
    const std::size_t dim = static_cast<std::size_t>(v.size());

    std::size_t target_mask = 0;
    std::array<std::size_t, 8> offset{};
    for (std::size_t l = 0; l < sub; ++l) {
        std::size_t off = 0;
        for (int j = 0; j < k; ++j)
            if (l & (std::size_t{1} << (k - 1 - j)))
                off |= std::size_t{1} << bit_shift(n_qubits, targets[static_cast<std::size_t>(j)]);
        offset[l] = off;
    }
    for (int j = 0; j < k; ++j) target_mask |= std::size_t{1} << bit_shift(n_qubits, targets[static_cast<std::size_t>(j)]);

    std::array<Complex, 8> in{};
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & target_mask) continue;
        for (std::size_t l = 0; l < sub; ++l) in[l] = v(static_cast<Eigen::Index>(base | offset[l]));
        for (std::size_t r = 0; r < sub; ++r) {
            Complex acc{0.0, 0.0};
            for (std::size_t c = 0; c < sub; ++c) acc += m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
            v(static_cast<Eigen::Index>(base | offset[r])) = acc;
        }
    }
}

// rho -> M rho M^dagger for an arbitrary local matrix M (not necessarily
// unitary): M on the row index, conj(M) on the column index.
inline void conjugate_local(Eigen::MatrixXcd& rho, int n_qubits, const Eigen::MatrixXcd& m,
                            const std::vector<int>& targets) {
    const auto dim = rho.rows();
    Eigen::VectorXcd tmp(dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        tmp = rho.col(c);
        apply_local(tmp, n_qubits, m, targets);
        rho.col(c) = tmp;
    }
    const Eigen::MatrixXcd mc = m.conjugate();
    for (Eigen::Index r = 0; r < dim; ++r) {
        tmp = rho.row(r).transpose();
        apply_local(tmp, n_qubits, mc, targets);
        rho.row(r) = tmp.transpose();
    }
}

}  // namespace detail

inline PureState apply_gate(const PureState& state, const Gate& gate, const std::vector<int>& targets) {
    detail::check_targets(state.n_qubits(), gate.arity(), targets);
    Eigen::VectorXcd v = state.amplitudes();
    detail::apply_local(v, state.n_qubits(), gate.matrix(), targets);
    return PureState::unchecked(state.n_qubits(), std::move(v));
}

inline DensityOp apply_gate(const DensityOp& state, const Gate& gate, const std::vector<int>& targets) {
    detail::check_targets(state.n_qubits(), gate.arity(), targets);
    Eigen::MatrixXcd m = state.matrix();
    detail::conjugate_local(m, state.n_qubits(), gate.matrix(), targets);
    return DensityOp::unchecked(state.n_qubits(), std::move(m));
}

// Exact Born probabilities (p0, p1) for measuring one qubit in the
// computational basis. No state change, no randomness. The pair sums to 1
// exactly up to the normalization of the input state.
namespace detail {

inline std::pair<double, double> normalized_weights(double w0, double w1) {
    w0 = std::max(w0, 0.0);
    w1 = std::max(w1, 0.0);
    if (w0 < kProbabilityFloor * (w0 + w1)) w0 = 0.0;
    if (w1 < kProbabilityFloor * (w0 + w1)) w1 = 0.0;
    const double total = w0 + w1;
    return {w0 / total, w1 / total};
}

}  // namespace detail

inline std::pair<double, double> measure_probabilities(const PureState& state, int index) {
    if (index < 0 || index >= state.n_qubits()) throw std::out_of_range("qubit index out of range");
    const std::size_t mask = std::size_t{1} << detail::bit_shift(state.n_qubits(), index);
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i)
        ((i & mask) ? w1 : w0) += std::norm(state.amplitude(i));
    return detail::normalized_weights(w0, w1);
}

inline std::pair<double, double> measure_probabilities(const DensityOp& state, int index) {
    if (index < 0 || index >= state.n_qubits()) throw std::out_of_range("qubit index out of range");
    const std::size_t mask = std::size_t{1} << detail::bit_shift(state.n_qubits(), index);
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const double d = state.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
        ((i & mask) ? w1 : w0) += d;
    }
    return detail::normalized_weights(w0, w1);
}

struct PureMeasurement {
    int outcome;
    PureState post;
    double probability;
};

struct DensityMeasurement {
    int outcome;
    DensityOp post;
    double probability;
};

// Samples one computational-basis measurement of a single qubit. The outcome
// follows the Born probabilities; a branch of exactly zero probability is
// never selected. post is the renormalized projection.
inline PureMeasurement measure_qubit(const PureState& state, int index, Rng& rng) {
    const auto [p0, p1] = measure_probabilities(state, index);
    const int outcome = rng.uniform() < p1 ? 1 : 0;
    const std::size_t mask = std::size_t{1} << detail::bit_shift(state.n_qubits(), index);

    Eigen::VectorXcd v = state.amplitudes();
    double weight = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const bool keep = ((i & mask) != 0) == (outcome == 1);
        if (keep)
            weight += std::norm(v(static_cast<Eigen::Index>(i)));
        else
            v(static_cast<Eigen::Index>(i)) = Complex{0.0, 0.0};
    }
    v /= std::sqrt(weight);
    return {outcome, PureState::unchecked(state.n_qubits(), std::move(v)), outcome ? p1 : p0};
}

inline DensityMeasurement measure_qubit(const DensityOp& state, int index, Rng& rng) {
    const auto [p0, p1] = measure_probabilities(state, index);
    const int outcome = rng.uniform() < p1 ? 1 : 0;
    const std::size_t mask = std::size_t{1} << detail::bit_shift(state.n_qubits(), index);

    Eigen::MatrixXcd m = state.matrix();
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const bool keep_i = ((i & mask) != 0) == (outcome == 1);
        for (std::size_t j = 0; j < state.dim(); ++j) {
            const bool keep_j = ((j & mask) != 0) == (outcome == 1);
            if (!keep_i || !keep_j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex{0.0, 0.0};
        }
    }
    m /= m.trace().real();
    return {outcome, DensityOp::unchecked(state.n_qubits(), std::move(m)), outcome ? p1 : p0};
}

}  // namespace qupass
