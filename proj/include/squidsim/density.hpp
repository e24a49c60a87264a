#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>
#include <vector>

#include "squidsim/states.hpp"

namespace squid {

/// Hermitian, unit-trace density matrix in the truncated Fock basis (or in
/// whatever basis the owning model uses).
class DensityMatrix {
public:
    DensityMatrix() = default;

    /// Validates Hermiticity (1e-10) and unit trace (1e-8).
    explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() < 1) throw DomainError("density matrix must be square");
        if (hermiticity_error(m_) > 1e-10) throw DomainError("density matrix is not Hermitian");
        if (std::abs(m_.trace() - Complex(1.0)) > 1e-8) throw DomainError("density matrix trace is not 1");
    }

    static DensityMatrix pure(const FockState& psi) {
        return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
    }

    /// sum_i w_i |psi_i><psi_i| with weights normalised to sum to one.
    static DensityMatrix mixture(const std::vector<std::pair<double, FockState>>& terms) {
        if (terms.empty()) throw DomainError("empty mixture");
        const Index dim = terms.front().second.dim();
        Matrix m = Matrix::Zero(dim, dim);
        double total = 0.0;
        for (const auto& [w, psi] : terms) {
            if (psi.dim() != dim) throw DomainError("mixture of states with different dimensions");
            if (w < 0.0) throw DomainError("negative mixture weight");
            m += w * psi.amplitudes() * psi.amplitudes().adjoint();
            total += w;
        }
        return DensityMatrix(m / total);
    }

    Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    double trace() const { return m_.trace().real(); }
    double purity() const { return m_.cwiseAbs2().sum(); }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(m_, Eigen::EigenvaluesOnly);
        return solver.eigenvalues()(0);
    }

    Complex expectation(const Matrix& op) const { return (op.transpose().cwiseProduct(m_)).sum(); }

private:
    Matrix m_;
};

/// Spectral decomposition rho = sum_k w_k |v_k><v_k| keeping weights above
/// `cutoff`. Phase-space routines work on this form.
struct StateComponents {
    RealVector weights;
    Matrix vectors;  // columns, Fock basis

    Index dim() const { return vectors.rows(); }
    Index count() const { return weights.size(); }
};

inline StateComponents components(const FockState& psi) {
    StateComponents c;
    c.weights = RealVector::Ones(1);
    c.vectors = psi.amplitudes();
    return c;
}

inline StateComponents components(const DensityMatrix& rho, double cutoff = 1e-14) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (rho.matrix() + rho.matrix().adjoint()));
    std::vector<Index> keep;
    for (Index i = rho.dim() - 1; i >= 0; --i)
        if (solver.eigenvalues()(i) > cutoff) keep.push_back(i);
    StateComponents c;
    c.weights.resize(static_cast<Index>(keep.size()));
    c.vectors.resize(rho.dim(), static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        c.weights(static_cast<Index>(j)) = solver.eigenvalues()(keep[j]);
        c.vectors.col(static_cast<Index>(j)) = solver.eigenvectors().col(keep[j]);
    }
    return c;
}

}  // namespace squid
