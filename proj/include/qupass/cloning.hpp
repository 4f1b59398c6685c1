#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "qupass/state.hpp"

namespace qupass {

// Output of a 1 -> 2 cloning machine. Register order of the joint state:
// qubit 0 the clone Eve keeps, qubit 1 the qubit forwarded back in place of
// the original, qubit 2 the machine ancilla.
struct CloneOutput {
    DensityOp joint;
    double f_clone;      // fidelity of the kept clone against the input
    double f_forwarded;  // fidelity of the forwarded qubit against the input
};

namespace detail {

inline void require_single_qubit(const PureState& input) {
    if (input.n_qubits() != 1) throw std::invalid_argument("cloner input must be a single qubit");
}

}  // namespace detail

// Weights (a, b) of the asymmetric cloner family, a^2 + ab + b^2 = 1. The
// parameter t in [0,1] maps linearly to b/(a+b): t = 0 leaves the original
// untouched, t = 1/2 is the symmetric point, t = 1 takes a perfect copy while
// destroying the original.
inline std::pair<double, double> asymmetric_weights(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("asymmetry must be in [0,1]");
    const double norm = std::sqrt(1.0 - t + t * t);
    return {(1.0 - t) / norm, t / norm};
}

// Closed-form (f_clone, f_forwarded) = (1 - a^2/2, 1 - b^2/2) of the family.
inline std::pair<double, double> asymmetric_fidelities(double t) {
    const auto [a, b] = asymmetric_weights(t);
    return {1.0 - a * a / 2.0, 1.0 - b * b / 2.0};
}

// Symmetric universal cloning isometry, extended by linearity from
//   |0> -> sqrt(2/3)|00>|1> + sqrt(1/3)|Psi+>|0>
//   |1> -> sqrt(2/3)|11>|0> + sqrt(1/3)|Psi+>|1>
// with |Psi+> = (|01>+|10>)/sqrt(2). Both clone marginals come out as
// (5/6)|phi><phi| + (1/6)|phi_perp><phi_perp| for every input.
inline PureState symmetric_uqcm_state(const PureState& input) {
    detail::require_single_qubit(input);
    const Complex c1 = input.amplitude(0);
    const Complex c2 = input.amplitude(1);
    const double r23 = std::sqrt(2.0 / 3.0);
    const double r16 = std::sqrt(1.0 / 6.0);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
    v(1) = c1 * r23;  // |001>
    v(2) = c1 * r16;  // |010>
    v(4) = c1 * r16;  // |100>
    v(6) = c2 * r23;  // |110>
    v(3) = c2 * r16;  // |011>
    v(5) = c2 * r16;  // |101>
    return PureState::unchecked(3, v / v.norm());
}

// Asymmetric cloner: a * (input stays in the forwarded slot) + b * (input
// routed to the kept slot), over a maximally entangled (kept, ancilla) pair.
inline PureState asymmetric_uqcm_state(const PureState& input, double asymmetry) {
    detail::require_single_qubit(input);
    const auto [a, b] = asymmetric_weights(asymmetry);
    const double s = 1.0 / std::sqrt(2.0);

    Eigen::VectorXcd chi = Eigen::VectorXcd::Zero(8);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t f = 0; f < 2; ++f)
            chi(static_cast<Eigen::Index>((j << 2) | (f << 1) | j)) = input.amplitude(f) * s;

    Eigen::VectorXcd swapped(8);  // kept <-> forwarded (bits 2 and 1)
    for (std::size_t i = 0; i < 8; ++i) {
        const std::size_t k = (i >> 2) & 1, f = (i >> 1) & 1;
        const std::size_t j = (k == f) ? i : (i ^ 0b110);
        swapped(static_cast<Eigen::Index>(j)) = chi(static_cast<Eigen::Index>(i));
    }

    Eigen::VectorXcd out = a * chi + b * swapped;
    return PureState::unchecked(3, out / out.norm());
}

namespace detail {

inline CloneOutput make_clone_output(const PureState& input, const PureState& joint) {
    DensityOp rho = DensityOp::from_pure(joint);
    const double f_clone = fidelity(input, partial_trace(rho, {0}));
    const double f_forwarded = fidelity(input, partial_trace(rho, {1}));
    return {std::move(rho), f_clone, f_forwarded};
}

}  // namespace detail

inline CloneOutput symmetric_uqcm(const PureState& input) {
    return detail::make_clone_output(input, symmetric_uqcm_state(input));
}

inline CloneOutput asymmetric_uqcm(const PureState& input, double asymmetry) {
    return detail::make_clone_output(input, asymmetric_uqcm_state(input, asymmetry));
}

}  // namespace qupass
