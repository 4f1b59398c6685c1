#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qupass/gates.hpp"
#include "qupass/state.hpp"

namespace qupass {

// Single-qubit noise models applied during storage and transmission.
enum class NoiseKind { ideal, depolarizing, dephasing, amplitude_damping };

inline const char* to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::ideal: return "ideal";
        case NoiseKind::depolarizing: return "depolarizing";
        case NoiseKind::dephasing: return "dephasing";
        case NoiseKind::amplitude_damping: return "amplitude_damping";
    }
    return "?";
}

inline std::optional<NoiseKind> noise_kind_from_string(const std::string& s) {
    if (s == "ideal") return NoiseKind::ideal;
    if (s == "depolarizing") return NoiseKind::depolarizing;
    if (s == "dephasing") return NoiseKind::dephasing;
    if (s == "amplitude_damping") return NoiseKind::amplitude_damping;
    return std::nullopt;
}

// Kraus decomposition of the channel at strength p:
//   depolarizing       rho -> (1-p) rho + p I/2
//   dephasing          rho -> (1-p) rho + p Z rho Z
//   amplitude damping  decay |1> -> |0> with probability p
inline std::vector<Eigen::Matrix2cd> kraus_operators(NoiseKind kind, double strength) {
    if (strength < 0.0 || strength > 1.0) throw std::invalid_argument("noise strength must be in [0,1]");
    const double p = strength;
    std::vector<Eigen::Matrix2cd> ops;
    Eigen::Matrix2cd k;
    switch (kind) {
        case NoiseKind::ideal:
            ops.push_back(Eigen::Matrix2cd::Identity());
            break;
        case NoiseKind::depolarizing:
            ops.push_back(std::sqrt(1.0 - 0.75 * p) * Eigen::Matrix2cd::Identity());
            k.setZero();
            k(0, 1) = k(1, 0) = std::sqrt(p / 4.0);
            ops.push_back(k);
            k.setZero();
            k(0, 1) = Complex{0.0, -std::sqrt(p / 4.0)};
            k(1, 0) = Complex{0.0, std::sqrt(p / 4.0)};
            ops.push_back(k);
            k.setZero();
            k(0, 0) = std::sqrt(p / 4.0);
            k(1, 1) = -std::sqrt(p / 4.0);
            ops.push_back(k);
            break;
        case NoiseKind::dephasing:
            ops.push_back(std::sqrt(1.0 - p) * Eigen::Matrix2cd::Identity());
            k.setZero();
            k(0, 0) = std::sqrt(p);
            k(1, 1) = -std::sqrt(p);
            ops.push_back(k);
            break;
        case NoiseKind::amplitude_damping:
            k.setZero();
            k(0, 0) = 1.0;
            k(1, 1) = std::sqrt(1.0 - p);
            ops.push_back(k);
            k.setZero();
            k(0, 1) = std::sqrt(p);
            ops.push_back(k);
            break;
    }
    return ops;
}

// Applies the channel map sum_i K_i rho K_i^dagger at one qubit.
inline DensityOp apply_noise(const DensityOp& rho, int qubit, NoiseKind kind, double strength) {
    if (qubit < 0 || qubit >= rho.n_qubits()) throw std::out_of_range("qubit index out of range");
    if (kind == NoiseKind::ideal || strength == 0.0) return rho;
    const auto kraus = kraus_operators(kind, strength);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rho.dim()),
                                                  static_cast<Eigen::Index>(rho.dim()));
    for (const auto& k : kraus) {
        Eigen::MatrixXcd branch = rho.matrix();
        detail::conjugate_local(branch, rho.n_qubits(), k, {qubit});
        out += branch;
    }
    return DensityOp::unchecked(rho.n_qubits(), std::move(out));
}

// Exact trajectory unravelling of the same channel: samples one Kraus branch
// with its Born weight and returns the renormalized pure state. Averaged over
// the sample, this reproduces apply_noise.
inline PureState apply_noise_trajectory(const PureState& state, int qubit, NoiseKind kind,
                                        double strength, Rng& rng) {
    if (qubit < 0 || qubit >= state.n_qubits()) throw std::out_of_range("qubit index out of range");
    if (kind == NoiseKind::ideal || strength == 0.0) return state;
    const auto kraus = kraus_operators(kind, strength);

    std::vector<Eigen::VectorXcd> branches;
    std::vector<double> weights;
    branches.reserve(kraus.size());
    double total = 0.0;
    for (const auto& k : kraus) {
        Eigen::VectorXcd v = state.amplitudes();
        detail::apply_local(v, state.n_qubits(), k, {qubit});
        const double w = v.squaredNorm();
        branches.push_back(std::move(v));
        weights.push_back(w);
        total += w;
    }
    double r = rng.uniform() * total;
    std::size_t pick = 0;
    for (; pick + 1 < weights.size(); ++pick) {
        if (r < weights[pick]) break;
        r -= weights[pick];
    }
    branches[pick] /= std::sqrt(weights[pick]);
    return PureState::unchecked(state.n_qubits(), std::move(branches[pick]));
}

}  // namespace qupass
