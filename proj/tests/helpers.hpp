#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "qupass/gates.hpp"
#include "qupass/rng.hpp"
#include "qupass/state.hpp"

namespace qupass::testing {

inline double gaussian(Rng& rng) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Eigen::MatrixXcd random_unitary(int dim, Rng& rng) {
    Eigen::MatrixXcd a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex{gaussian(rng), gaussian(rng)};
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
    return q;
}

inline Gate random_gate(int arity, Rng& rng) {
    return Gate(arity, random_unitary(1 << arity, rng));
}

inline PureState random_state(int n_qubits, Rng& rng) {
    const auto dim = Eigen::Index{1} << n_qubits;
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex{gaussian(rng), gaussian(rng)};
    v /= v.norm();
    return PureState(n_qubits, std::move(v));
}

// Random rank-2 mixed single-qubit state.
inline DensityOp random_mixed_qubit(Rng& rng) {
    const PureState a = haar_random_qubit(rng);
    const PureState b = haar_random_qubit(rng);
    const double w = rng.uniform();
    Eigen::MatrixXcd m = w * (a.amplitudes() * a.amplitudes().adjoint()) +
                         (1.0 - w) * (b.amplitudes() * b.amplitudes().adjoint());
    return DensityOp(1, std::move(m));
}

}  // namespace qupass::testing
