#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "squidsim/units.hpp"

using namespace squid;

namespace {

constexpr double kPi = std::numbers::pi;

// Values below are recomputed from the SI formulas here rather than taken
// from the library.
struct HandScales {
    double omega, nu_over_omega, c_omega, k, period;
};

HandScales hand_scales(double C, double L, double phi0sq_over_l) {
    const double hbar = 1.054571817e-34, phi0 = 2.067833848e-15;
    HandScales s{};
    s.omega = 1.0 / std::sqrt(L * C);
    s.nu_over_omega = phi0sq_over_l * phi0 * phi0 / L / (hbar * s.omega);
    s.c_omega = C * s.omega;
    s.k = 2.0 * kPi / phi0 * std::sqrt(hbar / (2.0 * s.c_omega));
    s.period = 2.0 * kPi * std::sqrt(L * C);
    return s;
}

}  // namespace

TEST(Constants, FluxQuantumMatchesHOver2e) {
    EXPECT_LT(PhysicalConstants::codata2018().flux_quantum_consistency(), 1e-9);
}

TEST(DerivedScales, StandardParameters) {
    const DerivedScales s = derive_scales(standard_params());
    const HandScales h = hand_scales(5e-15, 3e-10, 0.047);
    EXPECT_NEAR(s.omega / h.omega, 1.0, 1e-14);
    EXPECT_NEAR(s.nu_over_omega / h.nu_over_omega, 1.0, 1e-12);
    EXPECT_NEAR(s.cosine_scale_k / h.k, 1.0, 1e-12);

    EXPECT_NEAR(s.nu_over_omega, 7.9, 0.02 * 7.9);
    EXPECT_NEAR(s.c_omega, 4.1e-3, 0.02 * 4.1e-3);
    EXPECT_NEAR(s.frequency_hz(), 130e9, 0.01 * 130e9);
    EXPECT_NEAR(s.lc_period, 7.6e-12, 0.02 * 7.6e-12);
    EXPECT_NEAR(s.cosine_scale_k, 0.345, 1e-3);
}

TEST(DerivedScales, FriedmanParameters) {
    const SquidParams p = friedman_params();
    const DerivedScales s = derive_scales(p);
    EXPECT_NEAR(p.critical_current(), 2.02e-6, 1e-15);
    EXPECT_NEAR(s.frequency_hz(), 32.14e9, 0.01e9);
    EXPECT_NEAR(s.nu_over_omega, 31.2, 0.05);
    EXPECT_DOUBLE_EQ(p.bias_flux, 0.514466);
}

TEST(DerivedScales, FluxQuantumInXUnitsMatchesCosinePeriod) {
    const DerivedScales s = derive_scales(standard_params());
    // cos(k (a + a^dag)) = cos(sqrt2 k x) advances 2 pi over one flux quantum.
    EXPECT_NEAR(std::sqrt(2.0) * s.cosine_scale_k * s.flux_quantum_x(), 2.0 * kPi, 1e-10);
}

TEST(Conversions, RoundTrip) {
    const DerivedScales s = derive_scales(standard_params());
    for (double v : {-3.2e-15, 0.0, 1e-16, 7.7e-15}) {
        EXPECT_NEAR(x_to_flux(flux_to_x(v, s), s), v, 1e-12 * std::abs(v) + 1e-300);
        EXPECT_NEAR(p_to_charge(charge_to_p(v * 1e-4, s), s), v * 1e-4, 1e-12 * std::abs(v * 1e-4) + 1e-300);
    }
}

TEST(Conversions, FluxQuantumInXUnits) {
    const DerivedScales s = derive_scales(standard_params());
    const HandScales h = hand_scales(5e-15, 3e-10, 0.047);
    EXPECT_NEAR(flux_to_x(2.067833848e-15, s), 2.067833848e-15 * std::sqrt(h.c_omega / 1.054571817e-34), 1e-10);
    EXPECT_NEAR(flux_to_x(2.067833848e-15, s), 12.866, 1e-3);
}

TEST(Conversions, UninitialisedScalesRejected) {
    EXPECT_THROW(flux_to_x(1.0, DerivedScales{}), ParameterError);
}

TEST(SquidParams, Validation) {
    EXPECT_THROW(derive_scales(SquidParams{0.0, 3e-10, 0.0, 0.0}), ParameterError);
    EXPECT_THROW(derive_scales(SquidParams{5e-15, -1.0, 0.0, 0.0}), ParameterError);
    EXPECT_THROW(derive_scales(SquidParams{5e-15, 3e-10, -1e-22, 0.0}), ParameterError);
    EXPECT_THROW(derive_scales(SquidParams{5e-15, 3e-10, 0.0, NAN}), ParameterError);
    EXPECT_NO_THROW(derive_scales(SquidParams{5e-15, 3e-10, 0.0, 0.0}));
}

TEST(SquidParams, CriticalCurrentRoundTrip) {
    const SquidParams p = SquidParams::from_critical_current(1e-13, 2e-10, 3.5e-6, 0.25);
    EXPECT_NEAR(p.critical_current() / 3.5e-6, 1.0, 1e-14);
}
