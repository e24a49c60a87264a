#pragma once

// SQUID ring Hamiltonian in two independent representations:
//   * the truncated Fock basis of the LC oscillator, bias-centred frame
//     H = (a^dagger a + 1/2) - (nu/omega) cos(k (a + a^dagger) + 2 pi phi_x)
//   * a finite-difference flux grid in SI units, lab frame
//     H = -(hbar^2 / 2C) d^2/dPhi^2 + (Phi - Phi_x)^2 / 2L - hbar nu cos(2 pi Phi / Phi0)
// The two are related by a translation in flux and share their spectrum.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "squidsim/eigensolve.hpp"
#include "squidsim/fock.hpp"
#include "squidsim/parallel.hpp"
#include "squidsim/units.hpp"

namespace squid {

/// Fock-basis ring Hamiltonian with the flux-operator functions cached, so
/// that evaluating it at a new bias costs O(dim^2).
class RingHamiltonian {
public:
    RingHamiltonian(const DerivedScales& scales, Index dim)
        : nu_over_omega_(scales.nu_over_omega), k_(scales.cosine_scale_k), dim_(dim) {
        require_dim(dim);
        FluxSpectralBasis basis(dim);
        cos_ = basis.cosine(k_, 0.0);
        sin_ = basis.sine(k_, 0.0);
        cos_ = 0.5 * (cos_ + cos_.transpose()).eval();
        sin_ = 0.5 * (sin_ + sin_.transpose()).eval();
    }

    Index dim() const { return dim_; }
    double nu_over_omega() const { return nu_over_omega_; }
    double cosine_scale() const { return k_; }

    /// cos(kX + theta) = cos(kX) cos(theta) - sin(kX) sin(theta).
    RealMatrix real_matrix(double bias_flux) const {
        const double theta = 2.0 * std::numbers::pi * bias_flux;
        RealMatrix h = -nu_over_omega_ * (std::cos(theta) * cos_ - std::sin(theta) * sin_);
        for (Index n = 0; n < dim_; ++n) h(n, n) += static_cast<double>(n) + 0.5;
        return h;
    }

    FockOperator at(double bias_flux) const { return FockOperator(real_matrix(bias_flux).cast<Complex>(), true); }

private:
    double nu_over_omega_;
    double k_;
    Index dim_;
    RealMatrix cos_;
    RealMatrix sin_;
};

inline FockOperator build_fock_hamiltonian(const SquidParams& params, const DerivedScales& scales, Index dim) {
    params.validate();
    return RingHamiltonian(scales, dim).at(params.bias_flux);
}

// ---------------------------------------------------------------------------
// Potential

/// Ring potential energy in joules, lab frame.
inline double potential_energy(double flux, const SquidParams& params,
                               const PhysicalConstants& k = PhysicalConstants::codata2018()) {
    const double shifted = flux - params.bias_flux * k.flux_quantum;
    return shifted * shifted / (2.0 * params.inductance) -
           params.josephson_energy * std::cos(2.0 * std::numbers::pi * flux / k.flux_quantum);
}

/// Position of the bias flux in x units; lab-frame x equals bias-centred
/// x plus this offset.
inline double bias_offset_x(const DerivedScales& scales, double bias_flux,
                            const PhysicalConstants& k = PhysicalConstants::codata2018()) {
    return bias_flux * k.flux_quantum * scales.x_per_weber;
}

/// Potential in units of hbar omega as a function of the bias-centred x,
/// i.e. the frame of the Fock-basis Hamiltonian.
inline double reduced_potential(double x, const DerivedScales& scales, double bias_flux) {
    const double q = std::sqrt(2.0) * scales.cosine_scale_k;
    return 0.5 * x * x - scales.nu_over_omega * std::cos(q * x + 2.0 * std::numbers::pi * bias_flux);
}

inline double reduced_potential_slope(double x, const DerivedScales& scales, double bias_flux) {
    const double q = std::sqrt(2.0) * scales.cosine_scale_k;
    return x + scales.nu_over_omega * q * std::sin(q * x + 2.0 * std::numbers::pi * bias_flux);
}

struct PotentialExtremum {
    double x;      // bias-centred x
    double value;  // hbar omega
    bool minimum;
};

/// Local minima and maxima of the reduced potential on [x_lo, x_hi], found by
/// scanning at `spacing` and refining the slope root by bisection.
inline std::vector<PotentialExtremum> potential_extrema(const DerivedScales& scales, double bias_flux, double x_lo,
                                                        double x_hi, double spacing) {
    std::vector<PotentialExtremum> out;
    if (!(spacing > 0.0) || !(x_hi > x_lo)) throw DomainError("potential_extrema: bad scan range");
    const long n = static_cast<long>(std::ceil((x_hi - x_lo) / spacing));
    double xa = x_lo;
    double sa = reduced_potential_slope(xa, scales, bias_flux);
    for (long i = 1; i <= n; ++i) {
        const double xb = std::min(x_lo + static_cast<double>(i) * spacing, x_hi);
        const double sb = reduced_potential_slope(xb, scales, bias_flux);
        if ((sa < 0.0 && sb >= 0.0) || (sa > 0.0 && sb <= 0.0)) {
            double lo = xa, hi = xb, slo = sa;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double sm = reduced_potential_slope(mid, scales, bias_flux);
                if ((slo < 0.0) == (sm < 0.0)) {
                    lo = mid;
                    slo = sm;
                } else {
                    hi = mid;
                }
            }
            const double xr = 0.5 * (lo + hi);
            out.push_back({xr, reduced_potential(xr, scales, bias_flux), sa < 0.0});
        }
        xa = xb;
        sa = sb;
    }
    return out;
}

/// Minima whose value lies below `energy_ceiling`, sorted left to right.
inline std::vector<PotentialExtremum> potential_minima(const DerivedScales& scales, double bias_flux,
                                                       double energy_ceiling) {
    const double reach = std::sqrt(2.0 * (std::max(energy_ceiling, 0.0) + scales.nu_over_omega)) + 1.0;
    const double spacing = 1e-3 * scales.flux_quantum_x();
    std::vector<PotentialExtremum> minima;
    for (const auto& e : potential_extrema(scales, bias_flux, -reach, reach, spacing))
        if (e.minimum && e.value <= energy_ceiling) minima.push_back(e);
    return minima;
}

// ---------------------------------------------------------------------------
// Flux-grid representation (independent oracle)

struct FluxGrid {
    double start = 0.0;  // Wb
    double step = 0.0;   // Wb
    Index points = 0;

    double at(Index i) const { return start + static_cast<double>(i) * step; }
};

struct TridiagonalMatrix {
    RealVector diagonal;
    RealVector off_diagonal;

    Index size() const { return diagonal.size(); }
};

/// Second-order central differences for Q^2/2C with hard walls at the grid
/// ends. Entries in joules.
inline TridiagonalMatrix build_flux_grid_hamiltonian(const SquidParams& params, const FluxGrid& grid,
                                                     const PhysicalConstants& k = PhysicalConstants::codata2018()) {
    params.validate();
    if (grid.points < 3 || !(grid.step > 0.0)) throw GridError("flux grid needs >= 3 points and a positive step");

    const DerivedScales scales = derive_scales(params, k);
    // At least 8 samples per shortest local wavelength over the potential
    // range spanned by the grid.
    double u_min = std::numeric_limits<double>::infinity();
    double u_max = -u_min;
    for (Index i = 0; i < grid.points; ++i) {
        const double u = potential_energy(grid.at(i), params, k);
        u_min = std::min(u_min, u);
        u_max = std::max(u_max, u);
    }
    const double p_max = std::sqrt(2.0 * (u_max - u_min) / scales.hbar_omega + 1.0);
    const double h_x = grid.step * scales.x_per_weber;
    if (h_x > 2.0 * std::numbers::pi / p_max / 8.0) {
        std::ostringstream msg;
        msg << "flux grid too coarse: spacing " << h_x << " (x units) exceeds 1/8 of the shortest local wavelength "
            << 2.0 * std::numbers::pi / p_max;
        throw GridError(msg.str());
    }

    const double kinetic = k.hbar * k.hbar / (2.0 * params.capacitance * grid.step * grid.step);
    TridiagonalMatrix t;
    t.diagonal.resize(grid.points);
    t.off_diagonal.setConstant(grid.points - 1, -kinetic);
    for (Index i = 0; i < grid.points; ++i) t.diagonal(i) = 2.0 * kinetic + potential_energy(grid.at(i), params, k);
    return t;
}

/// Grid spanning every well reachable by the lowest `levels` states, with
/// walls three flux quanta beyond the outermost one.
inline FluxGrid default_flux_grid(const SquidParams& params, Index levels, double spacing_x = 1e-3,
                                  const PhysicalConstants& k = PhysicalConstants::codata2018()) {
    const DerivedScales s = derive_scales(params, k);
    const double phi0_x = s.flux_quantum_x(k);
    const double stiffest = std::sqrt(1.0 + 2.0 * s.nu_over_omega * s.cosine_scale_k * s.cosine_scale_k);
    const double reach = std::sqrt(2.0 * (s.nu_over_omega + 1.0)) + phi0_x;
    double u_min = std::numeric_limits<double>::infinity();
    const double scan = 1e-3 * phi0_x;
    for (double x = -reach; x <= reach; x += scan) u_min = std::min(u_min, reduced_potential(x, s, params.bias_flux));
    const double ceiling = u_min + (static_cast<double>(levels) + 1.0) * stiffest + 2.0;

    const double outer = std::sqrt(2.0 * (ceiling + s.nu_over_omega)) + 1.0;
    double lo = 0.0, hi = 0.0;
    bool found = false;
    for (double x = -outer; x <= outer; x += scan) {
        if (reduced_potential(x, s, params.bias_flux) <= ceiling) {
            if (!found) lo = x;
            hi = x;
            found = true;
        }
    }
    lo -= 3.0 * phi0_x;
    hi += 3.0 * phi0_x;
    const double offset = bias_offset_x(s, params.bias_flux, k);
    FluxGrid g;
    g.step = spacing_x / s.x_per_weber;
    g.start = (lo + offset) / s.x_per_weber;
    g.points = static_cast<Index>(std::ceil((hi - lo) / spacing_x)) + 1;
    return g;
}

namespace detail {

/// Number of eigenvalues of T strictly below lambda (Sturm sequence count).
inline Index sturm_count(const TridiagonalMatrix& t, double lambda) {
    Index count = 0;
    double q = 1.0;
    const double tiny = 1e-300;
    for (Index i = 0; i < t.size(); ++i) {
        const double e2 = i > 0 ? t.off_diagonal(i - 1) * t.off_diagonal(i - 1) : 0.0;
        q = t.diagonal(i) - lambda - (i > 0 ? e2 / q : 0.0);
        if (q == 0.0) q = -tiny;
        if (q < 0.0) ++count;
    }
    return count;
}

}  // namespace detail

/// Lowest `count` eigenvalues of a symmetric tridiagonal matrix by bisection,
/// to absolute tolerance `tol`.
inline RealVector tridiagonal_lowest_eigenvalues(const TridiagonalMatrix& t, Index count, double tol) {
    const Index n = t.size();
    if (count <= 0 || count > n) throw DomainError("tridiagonal_lowest_eigenvalues: bad count");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Index i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(t.off_diagonal(i - 1)) : 0.0) + (i + 1 < n ? std::abs(t.off_diagonal(i)) : 0.0);
        lo = std::min(lo, t.diagonal(i) - r);
        hi = std::max(hi, t.diagonal(i) + r);
    }
    RealVector out(count);
    double floor = lo;
    for (Index j = 0; j < count; ++j) {
        double a = floor, b = hi;
        while (b - a > tol) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            if (detail::sturm_count(t, mid) > j)
                b = mid;
            else
                a = mid;
        }
        out(j) = 0.5 * (a + b);
        floor = a;
    }
    return out;
}

/// Eigenvector for an eigenvalue by inverse iteration, orthogonalised against
/// `previous` (used for close-lying eigenvalues). Unit Euclidean norm.
inline RealVector tridiagonal_eigenvector(const TridiagonalMatrix& t, double eigenvalue,
                                          const std::vector<RealVector>& previous = {}) {
    const Index n = t.size();
    const double scale = std::max(t.diagonal.cwiseAbs().maxCoeff(), 1e-300);
    const double shift = eigenvalue + 1e-13 * scale;
    RealVector y = RealVector::Ones(n);
    for (Index i = 0; i < n; ++i) y(i) += 1e-3 * std::sin(0.37 * static_cast<double>(i));
    RealVector c(n), d(n);
    for (int iter = 0; iter < 4; ++iter) {
        // Thomas algorithm on (T - shift I) y' = y.
        double denom = t.diagonal(0) - shift;
        if (denom == 0.0) denom = 1e-300;
        c(0) = n > 1 ? t.off_diagonal(0) / denom : 0.0;
        d(0) = y(0) / denom;
        for (Index i = 1; i < n; ++i) {
            denom = t.diagonal(i) - shift - t.off_diagonal(i - 1) * c(i - 1);
            if (denom == 0.0) denom = 1e-300;
            c(i) = i + 1 < n ? t.off_diagonal(i) / denom : 0.0;
            d(i) = (y(i) - t.off_diagonal(i - 1) * d(i - 1)) / denom;
        }
        y(n - 1) = d(n - 1);
        for (Index i = n - 2; i >= 0; --i) y(i) = d(i) - c(i) * y(i + 1);
        for (const auto& v : previous) y -= v.dot(y) * v;
        y.normalize();
    }
    Index big;
    y.cwiseAbs().maxCoeff(&big);
    if (y(big) < 0.0) y = -y;
    return y;
}

/// Lowest `count` flux-grid eigenvalues in units of hbar omega.
inline RealVector flux_grid_levels(const SquidParams& params, const FluxGrid& grid, Index count,
                                   const PhysicalConstants& k = PhysicalConstants::codata2018()) {
    const DerivedScales s = derive_scales(params, k);
    TridiagonalMatrix t = build_flux_grid_hamiltonian(params, grid, k);
    t.diagonal /= s.hbar_omega;
    t.off_diagonal /= s.hbar_omega;
    return tridiagonal_lowest_eigenvalues(t, count, 1e-11);
}

/// Richardson extrapolation of the flux-grid levels from spacings 2h and h,
/// removing the O(h^2) central-difference error.
inline RealVector flux_grid_levels_extrapolated(const SquidParams& params, Index count, double spacing_x = 1e-3,
                                                const PhysicalConstants& k = PhysicalConstants::codata2018()) {
    const RealVector coarse = flux_grid_levels(params, default_flux_grid(params, count, 2.0 * spacing_x, k), count, k);
    const RealVector fine = flux_grid_levels(params, default_flux_grid(params, count, spacing_x, k), count, k);
    return (4.0 * fine - coarse) / 3.0;
}

// ---------------------------------------------------------------------------
// Spectra

struct FluxSweep {
    std::vector<double> bias;
    RealMatrix levels;  // rows: bias points, columns: level index

    /// `phi_x,E0,E1,...` with 12 significant digits.
    std::string to_csv() const {
        std::string out = "phi_x";
        for (Index c = 0; c < levels.cols(); ++c) out += ",E" + std::to_string(c);
        out += '\n';
        char buf[64];
        for (std::size_t r = 0; r < bias.size(); ++r) {
            std::snprintf(buf, sizeof buf, "%.12g", bias[r]);
            out += buf;
            for (Index c = 0; c < levels.cols(); ++c) {
                std::snprintf(buf, sizeof buf, ",%.12g", levels(static_cast<Index>(r), c));
                out += buf;
            }
            out += '\n';
        }
        return out;
    }
};

/// Bias samples from start to stop inclusive. When the range is an integer
/// number of steps the endpoint is hit exactly.
inline std::vector<double> bias_samples(double start, double stop, double step) {
    if (!(step > 0.0)) throw DomainError("sweep step must be positive");
    if (!(stop >= start)) throw DomainError("sweep stop must not precede start");
    const double ratio = (stop - start) / step;
    const double whole = std::round(ratio);
    std::vector<double> out;
    if (std::abs(ratio - whole) < 1e-9 * std::max(1.0, whole)) {
        const long n = static_cast<long>(whole);
        for (long i = 0; i <= n; ++i)
            out.push_back(n == 0 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(n));
    } else {
        const long n = static_cast<long>(std::floor(ratio));
        for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    }
    return out;
}

inline FluxSweep spectrum_sweep(const DerivedScales& scales, Index dim, double start, double stop, double step,
                                Index levels) {
    if (levels <= 0 || levels > dim) throw DomainError("sweep levels must be in [1, dim]");
    const RingHamiltonian ring(scales, dim);
    FluxSweep sweep;
    sweep.bias = bias_samples(start, stop, step);
    sweep.levels.resize(static_cast<Index>(sweep.bias.size()), levels);
    parallel_for(static_cast<long>(sweep.bias.size()), [&](long i) {
        RealMatrix h = ring.real_matrix(sweep.bias[static_cast<std::size_t>(i)]);
        Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw DomainError("eigensolver did not converge in sweep");
        sweep.levels.row(i) = solver.eigenvalues().head(levels).transpose();
    });
    return sweep;
}

inline FluxSweep spectrum_sweep(const SquidParams& params, Index dim, double start, double stop, double step,
                                Index levels) {
    return spectrum_sweep(derive_scales(params), dim, start, stop, step, levels);
}

struct ConvergedDimension {
    Index dim = 0;
    RealVector eigenvalues;  // tracked levels at `dim`
    double max_shift = 0.0;  // against dim + step
};

/// Increase the Fock dimension in `step` increments until the lowest
/// `levels` eigenvalues move by less than `tol` (hbar omega).
inline ConvergedDimension converge_dimension(const DerivedScales& scales, double bias_flux, Index start_dim,
                                             Index levels, double tol = 1e-8, Index step = 100,
                                             Index max_dim = 0) {
    if (max_dim <= 0) max_dim = start_dim + 4 * step;
    Index dim = start_dim;
    RealVector current = eigensolve(RingHamiltonian(scales, dim).at(bias_flux), levels, false).eigenvalues;
    while (true) {
        const Index next_dim = dim + step;
        RealVector next = eigensolve(RingHamiltonian(scales, next_dim).at(bias_flux), levels, false).eigenvalues;
        const double shift = (next - current).cwiseAbs().maxCoeff();
        if (shift < tol) return {dim, current, shift};
        if (next_dim + step > max_dim) {
            std::ostringstream msg;
            msg << "Fock truncation not converged: lowest " << levels << " levels shift by " << shift
                << " between dim " << dim << " and " << next_dim;
            throw ConvergenceError(msg.str(), dim, next_dim);
        }
        dim = next_dim;
        current = std::move(next);
    }
}

}  // namespace squid
