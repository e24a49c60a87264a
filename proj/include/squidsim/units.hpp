#pragma once

// Physical constants, SQUID ring circuit parameters and the dimensionless
// scales derived from them.
//
// Dimensionless conventions used throughout the library:
//   energy   in units of hbar*omega, omega = 1/sqrt(L C)
//   time     tau = omega * t
//   flux     x = sqrt(C omega / hbar) * Phi
//   charge   p = Q / sqrt(hbar C omega)

#include <cmath>
#include <numbers>
#include <string>

#include "squidsim/errors.hpp"

namespace squid {

struct PhysicalConstants {
    double hbar;             // J s
    double boltzmann;        // J / K
    double flux_quantum;     // Wb
    double electron_charge;  // C

    /// CODATA 2018 exact/recommended values.
    static constexpr PhysicalConstants codata2018() {
        return {1.054571817e-34, 1.380649e-23, 2.067833848e-15, 1.602176634e-19};
    }

    /// |Phi0 - 2 pi hbar / 2e| / Phi0.
    double flux_quantum_consistency() const {
        const double derived = 2.0 * std::numbers::pi * hbar / (2.0 * electron_charge);
        return std::abs(derived - flux_quantum) / flux_quantum;
    }
};

struct SquidParams {
    double capacitance = 0.0;       // F
    double inductance = 0.0;        // H
    double josephson_energy = 0.0;  // J, hbar*nu
    double bias_flux = 0.0;         // Phi_x / Phi0

    /// Josephson energy from the critical current, Ic = 2 e nu.
    static SquidParams from_critical_current(double capacitance, double inductance,
                                             double critical_current, double bias_flux,
                                             const PhysicalConstants& k = PhysicalConstants::codata2018()) {
        const double nu = critical_current / (2.0 * k.electron_charge);
        return {capacitance, inductance, k.hbar * nu, bias_flux};
    }

    /// Josephson energy given as a multiple of Phi0^2 / L (e.g. 0.047).
    static SquidParams from_reduced_josephson(double capacitance, double inductance,
                                              double phi0sq_over_l, double bias_flux,
                                              const PhysicalConstants& k = PhysicalConstants::codata2018()) {
        return {capacitance, inductance, phi0sq_over_l * k.flux_quantum * k.flux_quantum / inductance,
                bias_flux};
    }

    double critical_current(const PhysicalConstants& k = PhysicalConstants::codata2018()) const {
        return 2.0 * k.electron_charge * josephson_energy / k.hbar;
    }

    void validate() const {
        if (!(capacitance > 0.0) || !std::isfinite(capacitance))
            throw ParameterError("capacitance must be positive and finite");
        if (!(inductance > 0.0) || !std::isfinite(inductance))
            throw ParameterError("inductance must be positive and finite");
        if (!(josephson_energy >= 0.0) || !std::isfinite(josephson_energy))
            throw ParameterError("josephson energy must be non-negative and finite");
        if (!std::isfinite(bias_flux)) throw ParameterError("bias flux must be finite");
    }
};

struct DerivedScales {
    double omega = 0.0;           // rad/s
    double nu_over_omega = 0.0;
    double c_omega = 0.0;         // C*omega = sqrt(C/L), siemens
    double cosine_scale_k = 0.0;  // (2 pi / Phi0) sqrt(hbar / 2 C omega)
    double x_per_weber = 0.0;     // sqrt(C omega / hbar)
    double p_per_coulomb = 0.0;   // 1 / sqrt(hbar C omega)
    double lc_period = 0.0;       // s, 2 pi sqrt(L C)
    double hbar_omega = 0.0;      // J

    double frequency_hz() const { return omega / (2.0 * std::numbers::pi); }

    /// Flux quantum measured in x units; the cosine argument advances by
    /// 2 pi over this distance.
    double flux_quantum_x(const PhysicalConstants& k = PhysicalConstants::codata2018()) const {
        return k.flux_quantum * x_per_weber;
    }
};

inline DerivedScales derive_scales(const SquidParams& params,
                                   const PhysicalConstants& k = PhysicalConstants::codata2018()) {
    params.validate();
    DerivedScales s;
    s.omega = 1.0 / std::sqrt(params.inductance * params.capacitance);
    s.hbar_omega = k.hbar * s.omega;
    s.nu_over_omega = params.josephson_energy / s.hbar_omega;
    s.c_omega = params.capacitance * s.omega;
    s.cosine_scale_k = 2.0 * std::numbers::pi / k.flux_quantum * std::sqrt(k.hbar / (2.0 * s.c_omega));
    s.x_per_weber = std::sqrt(s.c_omega / k.hbar);
    s.p_per_coulomb = 1.0 / std::sqrt(k.hbar * s.c_omega);
    s.lc_period = 2.0 * std::numbers::pi * std::sqrt(params.inductance * params.capacitance);
    return s;
}

enum class Quantity { flux, charge };
enum class Direction { to_dimensionless, to_si };

inline double convert_flux_charge(double value, Quantity quantity, Direction direction,
                                  const DerivedScales& s) {
    if (!(s.x_per_weber > 0.0) || !(s.p_per_coulomb > 0.0))
        throw ParameterError("derived scales are not initialised");
    const double factor = quantity == Quantity::flux ? s.x_per_weber : s.p_per_coulomb;
    return direction == Direction::to_dimensionless ? value * factor : value / factor;
}

inline double flux_to_x(double flux, const DerivedScales& s) {
    return convert_flux_charge(flux, Quantity::flux, Direction::to_dimensionless, s);
}
inline double x_to_flux(double x, const DerivedScales& s) {
    return convert_flux_charge(x, Quantity::flux, Direction::to_si, s);
}
inline double charge_to_p(double charge, const DerivedScales& s) {
    return convert_flux_charge(charge, Quantity::charge, Direction::to_dimensionless, s);
}
inline double p_to_charge(double p, const DerivedScales& s) {
    return convert_flux_charge(p, Quantity::charge, Direction::to_si, s);
}

/// Default ring: C = 5 fF, L = 300 pH,
/// hbar nu = 0.047 Phi0^2 / L.
inline SquidParams standard_params(double bias_flux = 0.0) {
    return SquidParams::from_reduced_josephson(5e-15, 3e-10, 0.047, bias_flux);
}

/// Large-capacitance ring (C = 103 fF,
/// L = 238 pH, Ic = 2.02 uA).
inline SquidParams friedman_params(double bias_flux = 0.514466) {
    return SquidParams::from_critical_current(1.03e-13, 2.38e-10, 2.02e-6, bias_flux);
}

}  // namespace squid
