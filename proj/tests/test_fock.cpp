#include <gtest/gtest.h>

#include <cmath>

#include "squidsim/fock.hpp"
#include "squidsim/states.hpp"

using namespace squid;

namespace {

// cos(A) and sin(A) by direct power series.
Matrix series_cos(const Matrix& A, bool sine) {
    const Index n = A.rows();
    Matrix term = Matrix::Identity(n, n);
    Matrix sum = Matrix::Zero(n, n);
    for (int j = 0; j < 200; ++j) {
        if (j > 0) term = (term * A / static_cast<double>(j)).eval();
        if ((j % 2 == 1) != sine) continue;
        const double sign = ((j / 2) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * term;
    }
    return sum;
}

}  // namespace

TEST(Ladder, CommutatorIsIdentityBelowTruncation) {
    const Index n = 30;
    const auto [a, ad] = ladder_operators(n);
    const Matrix c = a.matrix() * ad.matrix() - ad.matrix() * a.matrix();
    for (Index i = 0; i < n - 1; ++i) EXPECT_NEAR(std::abs(c(i, i) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(c(n - 1, n - 1).real(), -static_cast<double>(n - 1), 1e-12);
    EXPECT_NEAR((c - Matrix(c.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(Ladder, NumberOperator) {
    const auto [a, ad] = ladder_operators(12);
    EXPECT_LT((ad.matrix() * a.matrix() - number_operator(12).matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Ladder, RejectsTinyDimension) {
    EXPECT_THROW(ladder_operators(1), DomainError);
    EXPECT_THROW(number_operator(0), DomainError);
}

TEST(Quadratures, CanonicalCommutator) {
    const Index n = 25;
    const auto [x, p] = quadrature_operators(n);
    const Matrix c = x.matrix() * p.matrix() - p.matrix() * x.matrix();
    for (Index i = 0; i < n - 1; ++i) EXPECT_NEAR(std::abs(c(i, i) - kI), 0.0, 1e-14);
    EXPECT_TRUE(x.hermitian());
    EXPECT_LT(hermiticity_error(p.matrix()), 1e-15);
}

TEST(Parity, AnticommutesWithQuadratures) {
    const Index n = 20;
    const Matrix P = parity_operator(n).matrix();
    const auto [x, p] = quadrature_operators(n);
    EXPECT_LT((P * x.matrix() * P + x.matrix()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((P * p.matrix() * P + p.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FockOperator, FlaggedHermitianChecked) {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 1) = 1.0;
    EXPECT_THROW(FockOperator(m, true), DomainError);
    EXPECT_NO_THROW(FockOperator(m, false));
    EXPECT_THROW(FockOperator(Matrix::Zero(2, 3), false), DomainError);
}

class CosineSeries : public ::testing::TestWithParam<double> {};

TEST_P(CosineSeries, MatchesPowerSeries) {
    const Index n = 40;
    const double k = 0.345;
    const double phase = GetParam();
    const auto [a, ad] = ladder_operators(n);
    const Matrix X = a.matrix() + ad.matrix();
    const Matrix c = series_cos(k * X, false), s = series_cos(k * X, true);
    const Matrix expected = std::cos(phase) * c - std::sin(phase) * s;
    EXPECT_LT((cosine_operator(n, k, phase).matrix() - expected).cwiseAbs().maxCoeff(), 1e-11);
    const Matrix expected_sin = std::sin(phase) * c + std::cos(phase) * s;
    EXPECT_LT((sine_operator(n, k, phase).matrix() - expected_sin).cwiseAbs().maxCoeff(), 1e-11);
}

INSTANTIATE_TEST_SUITE_P(Phases, CosineSeries, ::testing::Values(0.0, 0.9, 3.078760800517997, 3.141592653589793));

TEST(CosineOperator, ZeroScaleIsIdentityTimesCosPhase) {
    const Matrix c = cosine_operator(10, 0.0, 0.4).matrix();
    EXPECT_LT((c - std::cos(0.4) * Matrix::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_THROW(cosine_operator(10, -0.1, 0.0), DomainError);
}

TEST(CosineOperator, VacuumExpectationIsGaussian) {
    // <0| cos(k X) |0> = exp(-k^2 / 2) for X = a + a^dag.
    const double k = 0.345;
    const Matrix c = cosine_operator(80, k, 0.0).matrix();
    EXPECT_NEAR(c(0, 0).real(), std::exp(-0.5 * k * k), 1e-13);
}

TEST(Displacement, VacuumToCoherentState) {
    const Index n = 60;
    const Complex alpha(0.7, -1.1);
    const Matrix D = displacement_operator(n, alpha);
    EXPECT_LT((D.adjoint() * D - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
    const FockState coh = coherent_state(alpha, n);
    for (Index k = 0; k < 20; ++k) EXPECT_NEAR(std::abs(D(k, 0) - coh.amplitudes()(k)), 0.0, 1e-10);
}

TEST(Displacement, ShiftsQuadratures) {
    const Index n = 80;
    const Complex alpha(1.0, 0.5);
    const Matrix D = displacement_operator(n, alpha);
    const auto [x, p] = quadrature_operators(n);
    const Vector v = D.col(0);
    EXPECT_NEAR(v.dot(x.matrix() * v).real(), std::sqrt(2.0) * alpha.real(), 1e-10);
    EXPECT_NEAR(v.dot(p.matrix() * v).real(), std::sqrt(2.0) * alpha.imag(), 1e-10);
}
