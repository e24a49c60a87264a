#pragma once

// Truncated Fock-space operator algebra: ladder, quadrature and
// cosine-of-flux operators.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "squidsim/errors.hpp"

namespace squid {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// max |A - A^dagger|.
inline double hermiticity_error(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Dense operator on the truncated number basis. Operators flagged
/// Hermitian are checked on construction.
class FockOperator {
public:
    FockOperator() = default;

    FockOperator(Matrix matrix, bool hermitian) : matrix_(std::move(matrix)), hermitian_(hermitian) {
        if (matrix_.rows() != matrix_.cols()) throw DomainError("Fock operator must be square");
        if (hermitian_) {
            const double scale = matrix_.size() ? matrix_.cwiseAbs().maxCoeff() : 0.0;
            if (hermiticity_error(matrix_) > 1e-12 * std::max(scale, 1e-300))
                throw DomainError("operator flagged Hermitian is not Hermitian");
        }
    }

    Index dim() const { return matrix_.rows(); }
    const Matrix& matrix() const { return matrix_; }
    bool hermitian() const { return hermitian_; }

    FockOperator adjoint() const { return FockOperator(matrix_.adjoint(), hermitian_); }

private:
    Matrix matrix_;
    bool hermitian_ = false;
};

inline void require_dim(Index dim) {
    if (dim < 2) throw DomainError("Fock dimension must be at least 2, got " + std::to_string(dim));
}

struct LadderPair {
    FockOperator annihilation;
    FockOperator creation;
};

/// a[n-1, n] = sqrt(n); creation is the adjoint.
inline LadderPair ladder_operators(Index dim) {
    require_dim(dim);
    Matrix a = Matrix::Zero(dim, dim);
    for (Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    FockOperator annihilation(a, false);
    return {annihilation, annihilation.adjoint()};
}

struct QuadraturePair {
    FockOperator x;
    FockOperator p;
};

/// x = (a + a^dagger)/sqrt 2, p = (a - a^dagger)/(i sqrt 2).
inline QuadraturePair quadrature_operators(Index dim) {
    const auto [a, ad] = ladder_operators(dim);
    const double r = 1.0 / std::sqrt(2.0);
    Matrix x = r * (a.matrix() + ad.matrix());
    Matrix p = (r / kI) * (a.matrix() - ad.matrix());
    return {FockOperator(std::move(x), true), FockOperator(std::move(p), true)};
}

inline FockOperator number_operator(Index dim) {
    require_dim(dim);
    Matrix n = Matrix::Zero(dim, dim);
    for (Index k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return FockOperator(std::move(n), true);
}

/// (-1)^(a^dagger a).
inline FockOperator parity_operator(Index dim) {
    require_dim(dim);
    Matrix P = Matrix::Zero(dim, dim);
    for (Index k = 0; k < dim; ++k) P(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    return FockOperator(std::move(P), true);
}

/// Spectral decomposition of the real tridiagonal operator a + a^dagger.
/// Functions of the flux operator are built exactly on the truncated
/// space as V f(lambda) V^T.
class FluxSpectralBasis {
public:
    explicit FluxSpectralBasis(Index dim) {
        require_dim(dim);
        RealVector diag = RealVector::Zero(dim);
        RealVector sub(dim - 1);
        for (Index n = 1; n < dim; ++n) sub(n - 1) = std::sqrt(static_cast<double>(n));
        Eigen::SelfAdjointEigenSolver<RealMatrix> solver;
        solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        if (solver.info() != Eigen::Success) throw DomainError("tridiagonal eigensolver failed");
        eigenvalues_ = solver.eigenvalues();
        eigenvectors_ = solver.eigenvectors();
    }

    Index dim() const { return eigenvalues_.size(); }
    const RealVector& eigenvalues() const { return eigenvalues_; }
    const RealMatrix& eigenvectors() const { return eigenvectors_; }

    template <class F>
    RealMatrix apply(F&& f) const {
        RealVector d(dim());
        for (Index i = 0; i < dim(); ++i) d(i) = f(eigenvalues_(i));
        return eigenvectors_ * d.asDiagonal() * eigenvectors_.transpose();
    }

    /// cos(k (a + a^dagger) + phase).
    RealMatrix cosine(double k, double phase) const {
        return apply([&](double l) { return std::cos(k * l + phase); });
    }
    RealMatrix sine(double k, double phase) const {
        return apply([&](double l) { return std::sin(k * l + phase); });
    }

private:
    RealVector eigenvalues_;
    RealMatrix eigenvectors_;
};

inline FockOperator cosine_operator(Index dim, double k, double phase) {
    if (!(k >= 0.0)) throw DomainError("cosine scale k must be non-negative");
    FluxSpectralBasis basis(dim);
    RealMatrix c = basis.cosine(k, phase);
    // Symmetrise away rounding from the V D V^T product.
    c = 0.5 * (c + c.transpose()).eval();
    return FockOperator(c.cast<Complex>(), true);
}

inline FockOperator sine_operator(Index dim, double k, double phase) {
    if (!(k >= 0.0)) throw DomainError("cosine scale k must be non-negative");
    FluxSpectralBasis basis(dim);
    RealMatrix s = basis.sine(k, phase);
    s = 0.5 * (s + s.transpose()).eval();
    return FockOperator(s.cast<Complex>(), true);
}

/// Unitary displacement exp(alpha a^dagger - alpha* a) on the truncated space.
inline Matrix displacement_operator(Index dim, Complex alpha) {
    const auto [a, ad] = ladder_operators(dim);
    // G = i (alpha a^dagger - alpha* a) is Hermitian; D = exp(-i G).
    Matrix G = kI * (alpha * ad.matrix() - std::conj(alpha) * a.matrix());
    G = 0.5 * (G + G.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(G);
    Vector phases(dim);
    for (Index i = 0; i < dim; ++i) phases(i) = std::exp(-kI * solver.eigenvalues()(i));
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace squid
