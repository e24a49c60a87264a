#pragma once

// Wigner and Weyl functions on rectangular grids.
//
//   W(x, p)  = 1/(2 pi) Int dz <x + z/2| rho |x - z/2> exp(-i z p)
//   W~(X, P) = 1/(2 pi) Int dz <z + X/2| rho |z - X/2> exp(-i z P)
//
// Both integrals are evaluated with position wavefunctions sampled on a
// uniform lattice chosen so that every point x +- z/2 (resp. z +- X/2) is a
// lattice node. The z sums are then matrix products against a table of
// plane waves.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "squidsim/density.hpp"
#include "squidsim/parallel.hpp"

namespace squid {

struct Axis {
    double min = 0.0;
    double max = 0.0;
    Index count = 0;

    double step() const { return (max - min) / static_cast<double>(count - 1); }
    double at(Index i) const { return min + static_cast<double>(i) * step(); }
    double edge() const { return std::max(std::abs(min), std::abs(max)); }

    void validate(const char* name) const {
        if (count < 2 || !(max > min) || !std::isfinite(min) || !std::isfinite(max))
            throw GridError(std::string("axis ") + name + " needs at least 2 points and max > min");
    }
};

/// First axis: x (Wigner) or X (Weyl); second axis: p or P.
struct PhaseSpaceGrid {
    Axis first;
    Axis second;

    static PhaseSpaceGrid square(double half_width = 16.0, Index points = 257) {
        return {{-half_width, half_width, points}, {-half_width, half_width, points}};
    }
};

enum class FieldKind { wigner, weyl };

inline const char* to_string(FieldKind k) { return k == FieldKind::wigner ? "wigner" : "weyl"; }

struct PhaseSpaceField {
    FieldKind kind = FieldKind::wigner;
    PhaseSpaceGrid grid;
    Matrix values;                   // (first index, second index); real for Wigner
    double imaginary_residue = 0.0;  // Wigner: max |Im| before it was dropped

    RealMatrix real() const { return values.real(); }
    RealMatrix magnitude() const { return values.cwiseAbs(); }

    /// Long format: `x,p,value` (Wigner) or `X,P,abs,re,im` (Weyl).
    std::string to_csv() const {
        std::string out = kind == FieldKind::wigner ? "x,p,value\n" : "X,P,abs,re,im\n";
        char buf[160];
        for (Index i = 0; i < grid.first.count; ++i) {
            for (Index j = 0; j < grid.second.count; ++j) {
                const Complex v = values(i, j);
                if (kind == FieldKind::wigner)
                    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", grid.first.at(i), grid.second.at(j), v.real());
                else
                    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", grid.first.at(i),
                                  grid.second.at(j), std::abs(v), v.real(), v.imag());
                out += buf;
            }
        }
        return out;
    }
};

namespace detail {

/// Component wavefunctions sampled at origin + j * spacing for j in
/// [first, last]; rows outside the support of every component are trimmed.
struct LatticeSamples {
    double origin = 0.0;
    double spacing = 0.0;
    long first = 0;
    long last = -1;
    Matrix psi;  // (last - first + 1) x components

    bool contains(long j) const { return j >= first && j <= last; }
    auto row(long j) const { return psi.row(static_cast<Index>(j - first)); }
    double point(long j) const { return origin + static_cast<double>(j) * spacing; }
};

inline LatticeSamples sample_on_lattice(const Matrix& vectors, double origin, double spacing) {
    const double radius = basis_support_radius(vectors.rows());
    LatticeSamples s;
    s.origin = origin;
    s.spacing = spacing;
    s.first = static_cast<long>(std::ceil((-radius - origin) / spacing));
    s.last = static_cast<long>(std::floor((radius - origin) / spacing));
    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(s.last - s.first + 1));
    for (long j = s.first; j <= s.last; ++j) points.push_back(s.point(j));
    const RealMatrix table = hermite_table(points, vectors.rows());
    const RealMatrix re = table * vectors.real();
    const RealMatrix im = table * vectors.imag();
    Matrix psi(re.rows(), re.cols());
    psi.real() = re;
    psi.imag() = im;

    // Trim tails where every component is negligible.
    const RealVector row_max = psi.cwiseAbs().rowwise().maxCoeff();
    const double peak = row_max.maxCoeff();
    Index lo = 0, hi = row_max.size() - 1;
    while (lo < hi && row_max(lo) < 1e-17 * peak) ++lo;
    while (hi > lo && row_max(hi) < 1e-17 * peak) --hi;
    s.psi = psi.middleRows(lo, hi - lo + 1);
    s.last = s.first + static_cast<long>(hi);
    s.first += static_cast<long>(lo);
    return s;
}

/// Probability outside [lo, hi] of the position density of the components.
inline double probability_outside(const StateComponents& c, double lo, double hi, bool momentum) {
    Matrix vectors = c.vectors;
    if (momentum) {
        const Complex phase[4] = {1.0, -kI, -1.0, kI};
        for (Index n = 0; n < vectors.rows(); ++n) vectors.row(n) *= phase[n % 4];
    }
    const LatticeSamples s = sample_on_lattice(vectors, 0.0, 0.05);
    double outside = 0.0;
    for (long j = s.first; j <= s.last; ++j) {
        const double x = s.point(j);
        if (x >= lo && x <= hi) continue;
        outside += (s.row(j).cwiseAbs2() * c.weights).sum() * s.spacing;
    }
    return outside;
}

}  // namespace detail

/// Wigner function on `grid` (x, p). Throws GridError when more than
/// `coverage_tol` of the state's position or momentum probability lies
/// outside the grid.
inline PhaseSpaceField wigner_function(const StateComponents& state, const PhaseSpaceGrid& grid,
                                       double coverage_tol = 1e-6) {
    grid.first.validate("x");
    grid.second.validate("p");
    const Axis& xa = grid.first;
    const Axis& pa = grid.second;
    const double hx = xa.step();
    const double hp = pa.step();
    if (coverage_tol > 0.0) {
        const double out_x = detail::probability_outside(state, xa.min - 0.5 * hx, xa.max + 0.5 * hx, false);
        const double out_p = detail::probability_outside(state, pa.min - 0.5 * hp, pa.max + 0.5 * hp, true);
        if (out_x > coverage_tol || out_p > coverage_tol) {
            char msg[200];
            std::snprintf(msg, sizeof msg,
                          "phase-space grid does not cover the state: %.3g of the x and %.3g of the p probability "
                          "lie outside",
                          out_x, out_p);
            throw GridError(msg);
        }
    }

    // Lattice spacing delta = hx / r; the z step is 2 delta and samples
    // exp(-i z p) at >= 8 points per period at the grid edge.
    const double radius = basis_support_radius(state.dim());
    const double dz_max = std::min(2.0 * std::numbers::pi / (8.0 * std::max(pa.edge(), 1e-3)),
                                   std::numbers::pi / radius);
    const long r = static_cast<long>(std::ceil(hx / (0.5 * dz_max) - 1e-9));
    const double delta = hx / static_cast<double>(r);
    const detail::LatticeSamples s = detail::sample_on_lattice(state.vectors, xa.min, delta);

    long m_max = 0;
    for (Index i = 0; i < xa.count; ++i) {
        const long c = static_cast<long>(i) * r;
        if (s.contains(c)) m_max = std::max(m_max, std::min(c - s.first, s.last - c));
    }
    const Index cols = 2 * m_max + 1;
    Matrix corr = Matrix::Zero(xa.count, cols);
    const Vector w = state.weights.cast<Complex>();
    parallel_for(static_cast<long>(xa.count), [&](long i) {
        const long c = i * r;
        if (!s.contains(c)) return;
        const long mi = std::min(c - s.first, s.last - c);
        for (long m = -mi; m <= mi; ++m)
            corr(i, m + m_max) = (s.row(c + m).transpose().cwiseProduct(s.row(c - m).adjoint()).cwiseProduct(w)).sum();
    });
    Matrix waves(cols, pa.count);
    for (long m = -m_max; m <= m_max; ++m)
        for (Index j = 0; j < pa.count; ++j)
            waves(m + m_max, j) = std::polar(1.0, -2.0 * static_cast<double>(m) * delta * pa.at(j));

    PhaseSpaceField f;
    f.kind = FieldKind::wigner;
    f.grid = grid;
    f.values = (delta / std::numbers::pi) * (corr * waves);
    f.imaginary_residue = f.values.imag().cwiseAbs().maxCoeff();
    f.values.imag().setZero();
    return f;
}

/// Weyl (characteristic) function on `grid` (X, P).
inline PhaseSpaceField weyl_function(const StateComponents& state, const PhaseSpaceGrid& grid) {
    grid.first.validate("X");
    grid.second.validate("P");
    const Axis& xa = grid.first;
    const Axis& pa = grid.second;
    const double h = xa.step();
    const double radius = basis_support_radius(state.dim());
    const double dz_max = std::min(2.0 * std::numbers::pi / (8.0 * std::max(pa.edge(), 1e-3)),
                                   0.5 * std::numbers::pi / radius);
    // delta = h / 2r so that X_i / 2 moves by whole lattice steps.
    const long r = static_cast<long>(std::ceil(0.5 * h / dz_max - 1e-9));
    const double delta = 0.5 * h / static_cast<double>(r);
    const detail::LatticeSamples plus = detail::sample_on_lattice(state.vectors, 0.5 * xa.min, delta);
    const detail::LatticeSamples minus = detail::sample_on_lattice(state.vectors, -0.5 * xa.min, delta);

    // z_m = m delta; z_m + X_i/2 -> plus[m + i r], z_m - X_i/2 -> minus[m - i r].
    auto range = [&](long i) {
        const long lo = std::max(plus.first - i * r, minus.first + i * r);
        const long hi = std::min(plus.last - i * r, minus.last + i * r);
        return std::pair{lo, hi};
    };
    long m_lo = 0, m_hi = -1;
    bool any = false;
    for (Index i = 0; i < xa.count; ++i) {
        const auto [lo, hi] = range(static_cast<long>(i));
        if (lo > hi) continue;
        m_lo = any ? std::min(m_lo, lo) : lo;
        m_hi = any ? std::max(m_hi, hi) : hi;
        any = true;
    }
    PhaseSpaceField f;
    f.kind = FieldKind::weyl;
    f.grid = grid;
    if (!any) {
        f.values = Matrix::Zero(xa.count, pa.count);
        return f;
    }
    const Index cols = m_hi - m_lo + 1;
    Matrix corr = Matrix::Zero(xa.count, cols);
    const Vector w = state.weights.cast<Complex>();
    parallel_for(static_cast<long>(xa.count), [&](long i) {
        const auto [lo, hi] = range(i);
        for (long m = lo; m <= hi; ++m)
            corr(i, m - m_lo) =
                (plus.row(m + i * r).transpose().cwiseProduct(minus.row(m - i * r).adjoint()).cwiseProduct(w)).sum();
    });
    Matrix waves(cols, pa.count);
    for (long m = m_lo; m <= m_hi; ++m)
        for (Index j = 0; j < pa.count; ++j)
            waves(m - m_lo, j) = std::polar(1.0, -static_cast<double>(m) * delta * pa.at(j));
    f.values = (delta / (2.0 * std::numbers::pi)) * (corr * waves);
    return f;
}

inline PhaseSpaceField wigner_function(const FockState& psi, const PhaseSpaceGrid& grid) {
    return wigner_function(components(psi), grid);
}
inline PhaseSpaceField wigner_function(const DensityMatrix& rho, const PhaseSpaceGrid& grid) {
    return wigner_function(components(rho), grid);
}
inline PhaseSpaceField weyl_function(const FockState& psi, const PhaseSpaceGrid& grid) {
    return weyl_function(components(psi), grid);
}
inline PhaseSpaceField weyl_function(const DensityMatrix& rho, const PhaseSpaceGrid& grid) {
    return weyl_function(components(rho), grid);
}

/// Two-dimensional Fourier transform of a Wigner field by direct quadrature,
///   W~(X, P) = 1/(2 pi) Int dx dp W(x, p) exp(i (p X - x P)).
inline PhaseSpaceField wigner_to_weyl(const PhaseSpaceField& wigner, const PhaseSpaceGrid& target) {
    if (wigner.kind != FieldKind::wigner) throw DomainError("wigner_to_weyl expects a Wigner field");
    const Axis& xa = wigner.grid.first;
    const Axis& pa = wigner.grid.second;
    Matrix left(target.first.count, pa.count);   // exp(i p_j X_a)
    for (Index a = 0; a < target.first.count; ++a)
        for (Index j = 0; j < pa.count; ++j) left(a, j) = std::polar(1.0, pa.at(j) * target.first.at(a));
    Matrix right(xa.count, target.second.count);  // exp(-i x_i P_b)
    for (Index i = 0; i < xa.count; ++i)
        for (Index b = 0; b < target.second.count; ++b) right(i, b) = std::polar(1.0, -xa.at(i) * target.second.at(b));
    PhaseSpaceField f;
    f.kind = FieldKind::weyl;
    f.grid = target;
    const Matrix w = wigner.values.real().cast<Complex>();
    f.values = (xa.step() * pa.step() / (2.0 * std::numbers::pi)) * (left * w.transpose() * right);
    return f;
}

// ---------------------------------------------------------------------------
// Diagnostics

struct PhaseSpaceDiagnostics {
    double normalization = 0.0;
    std::vector<double> x_marginal;
    std::vector<double> p_marginal;
    double max_x_marginal_error = 0.0;  // against <x|rho|x>
    double negativity_volume = 0.0;
    std::vector<double> lobe_positions;  // x of the two strongest x-marginal peaks, ascending
    std::optional<double> fringe_amplitude;
    double purity_estimate = 0.0;  // 2 pi Int W^2
    double purity = 0.0;           // Tr rho^2
};

/// Local maxima of a sampled curve above `fraction` of its peak, strongest first.
inline std::vector<Index> curve_peaks(const std::vector<double>& y, double fraction = 0.1) {
    std::vector<Index> idx;
    const double top = *std::max_element(y.begin(), y.end());
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] >= y[i - 1] && y[i] > y[i + 1] && y[i] >= fraction * top) idx.push_back(static_cast<Index>(i));
    std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return y[static_cast<std::size_t>(a)] > y[static_cast<std::size_t>(b)]; });
    return idx;
}

/// Peak position refined by a parabola through the neighbours.
inline double refine_peak(const std::vector<double>& y, Index i, double x0, double h) {
    const double a = y[static_cast<std::size_t>(i - 1)], b = y[static_cast<std::size_t>(i)], c = y[static_cast<std::size_t>(i + 1)];
    const double denom = a - 2.0 * b + c;
    const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    return x0 + (static_cast<double>(i) + shift) * h;
}

inline PhaseSpaceDiagnostics phase_space_diagnostics(const PhaseSpaceField& field, const StateComponents& state) {
    if (field.kind != FieldKind::wigner) throw DomainError("phase-space diagnostics need a Wigner field");
    const Axis& xa = field.grid.first;
    const Axis& pa = field.grid.second;
    const double hx = xa.step(), hp = pa.step();
    const RealMatrix w = field.real();
    PhaseSpaceDiagnostics d;
    d.normalization = w.sum() * hx * hp;
    d.negativity_volume = (-w).cwiseMax(0.0).sum() * hx * hp;
    d.purity_estimate = 2.0 * std::numbers::pi * w.cwiseAbs2().sum() * hx * hp;
    d.purity = state.weights.cwiseAbs2().sum();
    d.x_marginal.resize(static_cast<std::size_t>(xa.count));
    d.p_marginal.resize(static_cast<std::size_t>(pa.count));
    for (Index i = 0; i < xa.count; ++i) d.x_marginal[static_cast<std::size_t>(i)] = w.row(i).sum() * hp;
    for (Index j = 0; j < pa.count; ++j) d.p_marginal[static_cast<std::size_t>(j)] = w.col(j).sum() * hx;

    std::vector<double> xs(static_cast<std::size_t>(xa.count));
    for (Index i = 0; i < xa.count; ++i) xs[static_cast<std::size_t>(i)] = xa.at(i);
    const RealMatrix table = hermite_table(xs, state.dim());
    const Matrix psi = table.cast<Complex>() * state.vectors;
    for (Index i = 0; i < xa.count; ++i) {
        const double exact = (psi.row(i).cwiseAbs2() * state.weights)(0);
        d.max_x_marginal_error = std::max(d.max_x_marginal_error, std::abs(exact - d.x_marginal[static_cast<std::size_t>(i)]));
    }

    const std::vector<Index> peaks = curve_peaks(d.x_marginal);
    if (peaks.size() >= 2) {
        double a = refine_peak(d.x_marginal, peaks[0], xa.min, hx);
        double b = refine_peak(d.x_marginal, peaks[1], xa.min, hx);
        if (a > b) std::swap(a, b);
        d.lobe_positions = {a, b};
        const double gap = b - a;
        double amp = 0.0;
        for (Index i = 0; i < xa.count; ++i) {
            const double x = xa.at(i);
            if (x < a + 0.25 * gap || x > b - 0.25 * gap) continue;
            amp = std::max(amp, w.row(i).cwiseAbs().maxCoeff());
        }
        d.fringe_amplitude = amp;
    } else if (peaks.size() == 1) {
        d.lobe_positions = {refine_peak(d.x_marginal, peaks[0], xa.min, hx)};
    }
    return d;
}

/// Integrated Wigner weight left and right of x = split.
inline std::pair<double, double> half_plane_weights(const PhaseSpaceField& field, double split) {
    const Axis& xa = field.grid.first;
    const double cell = xa.step() * field.grid.second.step();
    double left = 0.0, right = 0.0;
    for (Index i = 0; i < xa.count; ++i) {
        const double row = field.values.row(i).real().sum() * cell;
        const double x = xa.at(i);
        if (std::abs(x - split) < 1e-12)
            left += 0.5 * row, right += 0.5 * row;
        else if (x < split)
            left += row;
        else
            right += row;
    }
    return {left, right};
}

/// Dominant angular frequency of W(x_i, p) along p for the column nearest to
/// `x`, searched over [k_lo, k_hi].
inline double fringe_wavevector(const PhaseSpaceField& field, double x, double k_lo, double k_hi) {
    const Axis& xa = field.grid.first;
    const Axis& pa = field.grid.second;
    const Index i = std::clamp<Index>(static_cast<Index>(std::lround((x - xa.min) / xa.step())), 0, xa.count - 1);
    auto power = [&](double k) {
        Complex s = 0.0;
        for (Index j = 0; j < pa.count; ++j) s += field.values(i, j).real() * std::polar(1.0, -k * pa.at(j));
        return std::norm(s);
    };
    const double dk = 1e-3;
    double best_k = k_lo, best = -1.0;
    for (double k = k_lo; k <= k_hi; k += dk) {
        const double v = power(k);
        if (v > best) {
            best = v;
            best_k = k;
        }
    }
    const double a = power(best_k - dk), b = best, c = power(best_k + dk);
    const double denom = a - 2.0 * b + c;
    return denom != 0.0 ? best_k + 0.5 * dk * (a - c) / denom : best_k;
}

}  // namespace squid
