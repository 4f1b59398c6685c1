#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qupass/rng.hpp"

namespace qupass {

using Complex = std::complex<double>;

// Algebraic identities (unitarity, Hermiticity, norms after circuits) hold to
// this tolerance; construction-level identities to the tighter one.
inline constexpr double kAlgebraicTol = 1e-9;
inline constexpr double kConstructionTol = 1e-12;

// Born weights below this fraction of the total are numerical residue of the
// circuit arithmetic, not physics; they are treated as exactly zero so that
// comparing identical states yields certainty rather than 1 - epsilon.
inline constexpr double kProbabilityFloor = 1e-13;

namespace detail {

inline std::size_t dim_for(int n_qubits) {
    if (n_qubits < 1) throw std::invalid_argument("qubit count must be >= 1");
    if (n_qubits > 24) throw std::invalid_argument("register too large for dense simulation");
    return std::size_t{1} << n_qubits;
}

inline bool all_finite(const Eigen::Ref<const Eigen::MatrixXcd>& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

// Bit position (from the least significant end) of a qubit index.
// Qubit 0 is the most significant bit of the amplitude index, everywhere.
inline unsigned bit_shift(int n_qubits, int qubit) {
    return static_cast<unsigned>(n_qubits - 1 - qubit);
}

}  // namespace detail

// Pure state on n qubits: 2^n complex amplitudes with unit norm.
// Qubit 0 is the most significant bit of the amplitude index.
class PureState {
public:
    // |0...0>
    explicit PureState(int n_qubits)
        : n_(n_qubits), amps_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(detail::dim_for(n_qubits)))) {
        amps_(0) = Complex{1.0, 0.0};
    }

    PureState(int n_qubits, Eigen::VectorXcd amplitudes) : n_(n_qubits), amps_(std::move(amplitudes)) {
        if (static_cast<std::size_t>(amps_.size()) != detail::dim_for(n_))
            throw std::invalid_argument("amplitude vector length must be 2^n_qubits");
        if (!detail::all_finite(amps_)) throw std::invalid_argument("amplitudes must be finite");
        if (std::abs(amps_.squaredNorm() - 1.0) > kAlgebraicTol)
            throw std::invalid_argument("pure state must have unit norm");
    }

    static PureState basis(int n_qubits, std::size_t index) {
        const std::size_t dim = detail::dim_for(n_qubits);
        if (index >= dim) throw std::out_of_range("basis state index out of range");
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
        v(static_cast<Eigen::Index>(index)) = Complex{1.0, 0.0};
        return PureState(Tag{}, n_qubits, std::move(v));
    }

    // Single qubit c0|0> + c1|1>.
    static PureState single(Complex c0, Complex c1) {
        Eigen::VectorXcd v(2);
        v << c0, c1;
        return PureState(1, std::move(v));
    }

    // For values whose invariants hold by construction (library internals).
    static PureState unchecked(int n_qubits, Eigen::VectorXcd amplitudes) {
        return PureState(Tag{}, n_qubits, std::move(amplitudes));
    }

    int n_qubits() const { return n_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    Complex amplitude(std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

private:
    struct Tag {};
    PureState(Tag, int n, Eigen::VectorXcd a) : n_(n), amps_(std::move(a)) {}

    int n_;
    Eigen::VectorXcd amps_;
};

// <a|b>
inline Complex inner_product(const PureState& a, const PureState& b) {
    if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("qubit count mismatch");
    return a.amplitudes().dot(b.amplitudes());
}

// Density operator on n qubits: Hermitian, positive semidefinite, trace 1.
class DensityOp {
public:
    DensityOp(int n_qubits, Eigen::MatrixXcd matrix) : n_(n_qubits), m_(std::move(matrix)) {
        const auto dim = static_cast<Eigen::Index>(detail::dim_for(n_));
        if (m_.rows() != dim || m_.cols() != dim)
            throw std::invalid_argument("density matrix must be 2^n x 2^n");
        if (!detail::all_finite(m_)) throw std::invalid_argument("density matrix must be finite");
        if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kAlgebraicTol)
            throw std::invalid_argument("density matrix must be Hermitian");
        if (std::abs(m_.trace().real() - 1.0) > kAlgebraicTol || std::abs(m_.trace().imag()) > kAlgebraicTol)
            throw std::invalid_argument("density matrix must have trace 1");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -kAlgebraicTol)
            throw std::invalid_argument("density matrix must be positive semidefinite");
    }

    static DensityOp from_pure(const PureState& psi) {
        const auto& v = psi.amplitudes();
        return DensityOp(Tag{}, psi.n_qubits(), v * v.adjoint());
    }

    static DensityOp maximally_mixed(int n_qubits) {
        const auto dim = static_cast<Eigen::Index>(detail::dim_for(n_qubits));
        return DensityOp(Tag{}, n_qubits,
                         Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
    }

    static DensityOp unchecked(int n_qubits, Eigen::MatrixXcd matrix) {
        return DensityOp(Tag{}, n_qubits, std::move(matrix));
    }

    int n_qubits() const { return n_; }
    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    double trace_real() const { return m_.trace().real(); }
    double purity() const { return (m_ * m_).trace().real(); }

private:
    struct Tag {};
    DensityOp(Tag, int n, Eigen::MatrixXcd m) : n_(n), m_(std::move(m)) {}

    int n_;
    Eigen::MatrixXcd m_;
};

// Composite register; the first argument occupies the lower-index qubits.
inline PureState tensor(const PureState& a, const PureState& b) {
    const std::size_t da = a.dim(), db = b.dim();
    Eigen::VectorXcd out(static_cast<Eigen::Index>(da * db));
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < db; ++j)
            out(static_cast<Eigen::Index>(i * db + j)) = a.amplitude(i) * b.amplitude(j);
    return PureState::unchecked(a.n_qubits() + b.n_qubits(), std::move(out));
}

inline DensityOp tensor(const DensityOp& a, const DensityOp& b) {
    const auto da = static_cast<Eigen::Index>(a.dim()), db = static_cast<Eigen::Index>(b.dim());
    Eigen::MatrixXcd out(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < da; ++j)
            out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
    return DensityOp::unchecked(a.n_qubits() + b.n_qubits(), std::move(out));
}

// Reduced state on the kept qubits, in the order given.
inline DensityOp partial_trace(const DensityOp& rho, const std::vector<int>& keep) {
    const int n = rho.n_qubits();
    if (keep.empty()) throw std::invalid_argument("keep list must not be empty");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int q : keep) {
        if (q < 0 || q >= n) throw std::out_of_range("kept qubit index out of range");
        if (seen[static_cast<std::size_t>(q)]) throw std::invalid_argument("kept qubit indices must be distinct");
        seen[static_cast<std::size_t>(q)] = true;
    }
    std::vector<int> traced;
    for (int q = 0; q < n; ++q)
        if (!seen[static_cast<std::size_t>(q)]) traced.push_back(q);

    const int k = static_cast<int>(keep.size());
    const std::size_t kd = std::size_t{1} << k;
    const std::size_t td = std::size_t{1} << traced.size();

    auto full_index = [&](std::size_t ik, std::size_t it) {
        std::size_t idx = 0;
        for (int j = 0; j < k; ++j)
            if (ik & (std::size_t{1} << (k - 1 - j))) idx |= std::size_t{1} << detail::bit_shift(n, keep[static_cast<std::size_t>(j)]);
        for (std::size_t j = 0; j < traced.size(); ++j)
            if (it & (std::size_t{1} << (traced.size() - 1 - j))) idx |= std::size_t{1} << detail::bit_shift(n, traced[j]);
        return idx;
    };

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(kd), static_cast<Eigen::Index>(kd));
    for (std::size_t i = 0; i < kd; ++i)
        for (std::size_t j = 0; j < kd; ++j) {
            Complex sum{0.0, 0.0};
            for (std::size_t t = 0; t < td; ++t)
                sum += rho.matrix()(static_cast<Eigen::Index>(full_index(i, t)),
                                    static_cast<Eigen::Index>(full_index(j, t)));
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sum;
        }
    return DensityOp::unchecked(k, std::move(out));
}

inline double fidelity(const PureState& a, const PureState& b) {
    return std::norm(inner_product(a, b));
}

inline double fidelity(const PureState& a, const DensityOp& rho) {
    if (a.n_qubits() != rho.n_qubits()) throw std::invalid_argument("qubit count mismatch");
    const Complex f = (a.amplitudes().adjoint() * rho.matrix() * a.amplitudes())(0);
    return std::clamp(f.real(), 0.0, 1.0);
}

inline double fidelity(const DensityOp& rho, const PureState& a) { return fidelity(a, rho); }

namespace detail {

// Square roots of the eigenvalues with numerical-noise values (relative to the
// largest) zeroed out, so nearly-rank-deficient states do not leak
// sqrt(epsilon)-sized artifacts into the result.
inline Eigen::VectorXd clean_sqrt(const Eigen::VectorXd& eigenvalues) {
    const double cutoff = 1e-12 * std::max(eigenvalues.maxCoeff(), 0.0);
    Eigen::VectorXd out(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        out(i) = eigenvalues(i) > cutoff ? std::sqrt(eigenvalues(i)) : 0.0;
    return out;
}

}  // namespace detail

// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2 via eigendecomposition.
inline double fidelity(const DensityOp& a, const DensityOp& b) {
    if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("qubit count mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(a.matrix());
    const Eigen::MatrixXcd sqrt_a = ea.eigenvectors() *
                                    detail::clean_sqrt(ea.eigenvalues()).asDiagonal() *
                                    ea.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(sqrt_a * b.matrix() * sqrt_a);
    const double root_sum = detail::clean_sqrt(em.eigenvalues()).sum();
    return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

// Uniform (Haar) random single-qubit state: cos(t/2)|0> + e^{i l} sin(t/2)|1>
// with cos(t) uniform on [-1,1] and l uniform on [0,2pi). The global phase is
// fixed so the |0> amplitude is real and nonnegative.
inline PureState haar_random_qubit(Rng& rng) {
    const double u = rng.uniform(-1.0, 1.0);
    const double lambda = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double c = std::sqrt((1.0 + u) / 2.0);
    const double s = std::sqrt((1.0 - u) / 2.0);
    return PureState::single(Complex{c, 0.0}, std::polar(s, lambda));
}

}  // namespace qupass
