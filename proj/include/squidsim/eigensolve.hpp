#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "squidsim/fock.hpp"

namespace squid {

/// Ascending eigenvalues (units of hbar omega for ring Hamiltonians) and
/// the matching orthonormal eigenvectors as columns.
struct SpectralResult {
    RealVector eigenvalues;
    Matrix eigenvectors;  // empty when only eigenvalues were requested

    Index size() const { return eigenvalues.size(); }
    bool has_vectors() const { return eigenvectors.cols() == eigenvalues.size() && eigenvalues.size() > 0; }
};

namespace detail {

/// Fix the arbitrary phase of each column: largest-magnitude component real
/// and positive. Ties are broken toward the lowest index.
inline void normalise_phases(Matrix& vectors) {
    for (Index c = 0; c < vectors.cols(); ++c) {
        Index best = 0;
        double best_abs = -1.0;
        for (Index r = 0; r < vectors.rows(); ++r) {
            const double v = std::abs(vectors(r, c));
            if (v > best_abs * (1.0 + 1e-12)) {
                best_abs = v;
                best = r;
            }
        }
        if (best_abs > 0.0) vectors.col(c) *= std::conj(vectors(best, c)) / best_abs;
    }
}

}  // namespace detail

/// Dense Hermitian eigensolver returning the lowest `count` pairs
/// (count <= 0 means all). Real-valued input takes the real symmetric path.
inline SpectralResult eigensolve(const Matrix& h, Index count = 0, bool want_vectors = true) {
    if (h.rows() != h.cols() || h.rows() == 0) throw DomainError("eigensolve needs a non-empty square matrix");
    const double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
    if (hermiticity_error(h) > 1e-12 * scale) throw DomainError("eigensolve: matrix is not Hermitian");

    const Index n = h.rows();
    const Index keep = (count <= 0 || count > n) ? n : count;
    const auto options = want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;

    SpectralResult out;
    if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
        RealMatrix re = h.real();
        re = 0.5 * (re + re.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<RealMatrix> solver(re, options);
        if (solver.info() != Eigen::Success) throw DomainError("eigensolver did not converge");
        out.eigenvalues = solver.eigenvalues().head(keep);
        if (want_vectors) out.eigenvectors = solver.eigenvectors().leftCols(keep).cast<Complex>();
    } else {
        Matrix sym = 0.5 * (h + h.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, options);
        if (solver.info() != Eigen::Success) throw DomainError("eigensolver did not converge");
        out.eigenvalues = solver.eigenvalues().head(keep);
        if (want_vectors) out.eigenvectors = solver.eigenvectors().leftCols(keep);
    }
    if (want_vectors) detail::normalise_phases(out.eigenvectors);
    return out;
}

inline SpectralResult eigensolve(const FockOperator& h, Index count = 0, bool want_vectors = true) {
    return eigensolve(h.matrix(), count, want_vectors);
}

}  // namespace squid
