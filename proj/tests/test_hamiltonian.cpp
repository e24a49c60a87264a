#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "squidsim/hamiltonian.hpp"

using namespace squid;

namespace {

SquidParams harmonic_params() {
    SquidParams p = standard_params();
    p.josephson_energy = 0.0;
    return p;
}

}  // namespace

TEST(FockHamiltonian, HarmonicLimitIsExact) {
    const Index dim = 200;
    const RealVector e = eigensolve(build_fock_hamiltonian(harmonic_params(), derive_scales(harmonic_params()), dim)).eigenvalues;
    for (Index n = 0; n < dim - 20; ++n) EXPECT_NEAR(e(n), static_cast<double>(n) + 0.5, 1e-8);
}

TEST(FockHamiltonian, IsRealSymmetric) {
    const DerivedScales s = derive_scales(standard_params());
    const RingHamiltonian ring(s, 120);
    for (double b : {0.0, 0.13, 0.5}) {
        const RealMatrix h = ring.real_matrix(b);
        EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(FockHamiltonian, PeriodicInBias) {
    const DerivedScales s = derive_scales(standard_params());
    const RingHamiltonian ring(s, 100);
    EXPECT_LT((ring.real_matrix(0.2) - ring.real_matrix(1.2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FockHamiltonian, MirrorSymmetricBiasesShareSpectrum) {
    // phi_x -> -phi_x is the parity image.
    const DerivedScales s = derive_scales(standard_params());
    const RingHamiltonian ring(s, 300);
    const RealVector a = eigensolve(ring.at(0.3), 10, false).eigenvalues;
    const RealVector b = eigensolve(ring.at(-0.3), 10, false).eigenvalues;
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Potential, LabAndCentredFramesAgree) {
    const SquidParams p = standard_params(0.37);
    const DerivedScales s = derive_scales(p);
    const double offset = bias_offset_x(s, p.bias_flux);
    for (double x : {-6.0, -1.3, 0.0, 2.2, 7.9}) {
        const double flux = x_to_flux(x + offset, s);
        EXPECT_NEAR(potential_energy(flux, p) / s.hbar_omega, reduced_potential(x, s, p.bias_flux), 1e-10);
    }
}

TEST(Potential, SlopeMatchesFiniteDifference) {
    const DerivedScales s = derive_scales(standard_params());
    for (double x : {-4.0, 0.3, 5.5}) {
        const double h = 1e-5;
        const double fd = (reduced_potential(x + h, s, 0.49) - reduced_potential(x - h, s, 0.49)) / (2 * h);
        EXPECT_NEAR(reduced_potential_slope(x, s, 0.49), fd, 1e-7);
    }
}

TEST(Potential, SymmetricDoubleWellAtHalfFluxQuantum) {
    const DerivedScales s = derive_scales(standard_params());
    const auto minima = potential_minima(s, 0.5, 10.0);
    ASSERT_EQ(minima.size(), 2u);
    EXPECT_NEAR(minima[0].x, -minima[1].x, 1e-10);
    EXPECT_NEAR(minima[0].value, minima[1].value, 1e-10);
    for (const auto& m : minima) EXPECT_NEAR(reduced_potential_slope(m.x, s, 0.5), 0.0, 1e-10);
}

TEST(Potential, BiasTiltsTheWells) {
    const DerivedScales s = derive_scales(standard_params());
    const auto minima = potential_minima(s, 0.49, 10.0);
    ASSERT_EQ(minima.size(), 2u);
    EXPECT_LT(minima[0].value, minima[1].value);
}

TEST(FluxGrid, HarmonicLimit) {
    const RealVector e = flux_grid_levels_extrapolated(harmonic_params(), 20);
    for (Index n = 0; n < 20; ++n) EXPECT_NEAR(e(n) / (static_cast<double>(n) + 0.5), 1.0, 1e-5);
}

TEST(FluxGrid, RejectsCoarseGrid) {
    const SquidParams p = standard_params(0.5);
    FluxGrid g = default_flux_grid(p, 10, 1e-3);
    g.step *= 2000.0;
    g.points /= 2000;
    EXPECT_THROW(build_flux_grid_hamiltonian(p, g), GridError);
}

TEST(FluxGrid, SturmBisectionMatchesDenseSolver) {
    TridiagonalMatrix t;
    const Index n = 60;
    t.diagonal.resize(n);
    t.off_diagonal.resize(n - 1);
    for (Index i = 0; i < n; ++i) t.diagonal(i) = std::sin(1.7 * static_cast<double>(i)) + 0.01 * static_cast<double>(i);
    for (Index i = 0; i + 1 < n; ++i) t.off_diagonal(i) = 0.3 + 0.1 * std::cos(static_cast<double>(i));
    RealMatrix dense = RealMatrix::Zero(n, n);
    dense.diagonal() = t.diagonal;
    dense.diagonal(1) = t.off_diagonal;
    dense.diagonal(-1) = t.off_diagonal;
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(dense);
    const RealVector bis = tridiagonal_lowest_eigenvalues(t, 8, 1e-13);
    for (Index j = 0; j < 8; ++j) {
        EXPECT_NEAR(bis(j), solver.eigenvalues()(j), 1e-12);
        const RealVector v = tridiagonal_eigenvector(t, bis(j));
        EXPECT_LT((dense * v - bis(j) * v).norm(), 1e-9);
    }
}

class OracleEquivalence : public ::testing::TestWithParam<double> {};

TEST_P(OracleEquivalence, LowestTenLevels) {
    const double bias = GetParam();
    const SquidParams p = standard_params(bias);
    const DerivedScales s = derive_scales(p);
    const RealVector fock = eigensolve(RingHamiltonian(s, 400).at(bias), 10, false).eigenvalues;
    const RealVector grid = flux_grid_levels_extrapolated(p, 10);
    EXPECT_LT((fock - grid).cwiseAbs().maxCoeff(), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Biases, OracleEquivalence, ::testing::Values(0.0, 0.25, 0.49, 0.5));

TEST(OracleEquivalence, GroundStateIsTranslatedByBiasOffset) {
    // The lab-frame grid ground state sits at the Fock-frame mean flux
    // shifted by the bias offset.
    const SquidParams p = standard_params(0.25);
    const DerivedScales s = derive_scales(p);
    const SpectralResult fock = eigensolve(RingHamiltonian(s, 400).at(p.bias_flux), 1);
    const Matrix x = quadrature_operators(400).x.matrix();
    const Vector v = fock.eigenvectors.col(0);
    const double mean_fock = v.dot(x * v).real();

    const FluxGrid g = default_flux_grid(p, 1, 2e-3);
    TridiagonalMatrix t = build_flux_grid_hamiltonian(p, g);
    t.diagonal /= s.hbar_omega;
    t.off_diagonal /= s.hbar_omega;
    const RealVector e = tridiagonal_lowest_eigenvalues(t, 1, 1e-12);
    const RealVector psi = tridiagonal_eigenvector(t, e(0));
    double mean_grid = 0.0;
    for (Index i = 0; i < g.points; ++i) mean_grid += psi(i) * psi(i) * flux_to_x(g.at(i), s);
    EXPECT_NEAR(mean_grid - bias_offset_x(s, p.bias_flux), mean_fock, 1e-4);
}

TEST(Sweep, EndpointsOfUnitPeriodAgree) {
    const FluxSweep sw = spectrum_sweep(standard_params(), 200, 0.0, 1.0, 0.05, 6);
    ASSERT_EQ(sw.bias.size(), 21u);
    EXPECT_EQ(sw.bias.front(), 0.0);
    EXPECT_EQ(sw.bias.back(), 1.0);
    EXPECT_LT((sw.levels.row(0) - sw.levels.row(20)).cwiseAbs().maxCoeff(), 1e-9);
    for (Index r = 0; r < sw.levels.rows(); ++r)
        for (Index c = 1; c < sw.levels.cols(); ++c) EXPECT_GE(sw.levels(r, c), sw.levels(r, c - 1));
}

TEST(Sweep, CsvLayout) {
    const FluxSweep sw = spectrum_sweep(standard_params(), 60, 0.0, 0.1, 0.05, 3);
    const std::string csv = sw.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "phi_x,E0,E1,E2");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Sweep, BadRangesRejected) {
    EXPECT_THROW(bias_samples(0.0, 1.0, 0.0), DomainError);
    EXPECT_THROW(bias_samples(1.0, 0.0, 0.1), DomainError);
    EXPECT_EQ(bias_samples(0.0, 0.25, 0.1).size(), 3u);
}

TEST(Convergence, StandardParametersConverge) {
    const DerivedScales s = derive_scales(standard_params());
    const ConvergedDimension c = converge_dimension(s, 0.5, 200, 10);
    EXPECT_LT(c.max_shift, 1e-8);
    EXPECT_GE(c.dim, 200);
}

TEST(Convergence, FailureReportsBothDimensions) {
    const DerivedScales s = derive_scales(standard_params());
    try {
        converge_dimension(s, 0.5, 20, 10, 1e-8, 10, 30);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_EQ(e.first_dim(), 20);
        EXPECT_EQ(e.second_dim(), 30);
    }
}
