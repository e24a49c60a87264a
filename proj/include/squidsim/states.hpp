#pragma once

// Pure states of the ring: coherent states, phase-tunable superpositions of
// eigenstates, well classification and position-space wavefunctions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "squidsim/eigensolve.hpp"
#include "squidsim/hamiltonian.hpp"

namespace squid {

/// Unit-norm amplitude vector in the truncated number basis.
class FockState {
public:
    FockState() = default;

    /// Normalises `amplitudes`; throws on a zero vector.
    static FockState normalized(Vector amplitudes) {
        const double norm = amplitudes.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("cannot normalise a zero state");
        return FockState(amplitudes / norm);
    }

    /// Validating constructor: the input must already have unit norm.
    explicit FockState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() < 2) throw DomainError("Fock state needs dim >= 2");
        if (std::abs(amplitudes_.norm() - 1.0) > 1e-10) throw DomainError("Fock state is not normalised");
    }

    static FockState number(Index dim, Index n) {
        if (n < 0 || n >= dim) throw DomainError("number state outside the truncated space");
        Vector v = Vector::Zero(dim);
        v(n) = 1.0;
        return FockState(std::move(v));
    }

    Index dim() const { return amplitudes_.size(); }
    const Vector& amplitudes() const { return amplitudes_; }

    Complex inner(const FockState& other) const { return amplitudes_.dot(other.amplitudes_); }

    /// <psi|A|psi>.
    Complex expectation(const Matrix& op) const { return amplitudes_.dot(op * amplitudes_); }

    /// Same state lifted into a larger space (zero padded).
    FockState padded(Index dim) const {
        if (dim < this->dim()) throw DomainError("cannot pad to a smaller dimension");
        Vector v = Vector::Zero(dim);
        v.head(this->dim()) = amplitudes_;
        return FockState(std::move(v));
    }

private:
    Vector amplitudes_;
};

inline FockState eigenstate(const SpectralResult& spectral, Index i) {
    if (!spectral.has_vectors() || i < 0 || i >= spectral.size()) throw DomainError("eigenstate index out of range");
    return FockState::normalized(spectral.eigenvectors.col(i));
}

/// |alpha> truncated to `dim` levels and renormalised; requires
/// |alpha|^2 <= dim / 4.
inline FockState coherent_state(Complex alpha, Index dim) {
    require_dim(dim);
    if (std::norm(alpha) > static_cast<double>(dim) / 4.0)
        throw TruncationError("coherent state |alpha|^2 exceeds dim/4; increase the Fock dimension");
    Vector c(dim);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (Index n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return FockState::normalized(std::move(c));
}

/// (psi1 + e^{i theta} psi2) / norm.
inline FockState phase_superposition(const FockState& psi1, const FockState& psi2, double theta) {
    if (psi1.dim() != psi2.dim()) throw DomainError("superposition of states with different dimensions");
    if (std::abs(psi1.inner(psi2)) > 1.0 - 1e-10) throw DegeneracyError("superposition of parallel states");
    return FockState::normalized(psi1.amplitudes() + std::exp(kI * theta) * psi2.amplitudes());
}

struct QuadratureMoments {
    double mean_x = 0.0;
    double mean_p = 0.0;
    double var_x = 0.0;
    double var_p = 0.0;
    double occupation = 0.0;
};

/// Moments computed from the ladder structure directly (tridiagonal, O(dim)).
inline QuadratureMoments quadrature_moments(const FockState& psi) {
    const Vector& c = psi.amplitudes();
    const Index n = c.size();
    Complex a1 = 0.0, a2 = 0.0;  // <a>, <a^2>
    double nn = 0.0;
    for (Index k = 0; k < n; ++k) {
        nn += static_cast<double>(k) * std::norm(c(k));
        if (k + 1 < n) a1 += std::conj(c(k)) * std::sqrt(static_cast<double>(k + 1)) * c(k + 1);
        if (k + 2 < n)
            a2 += std::conj(c(k)) * std::sqrt(static_cast<double>((k + 1) * (k + 2))) * c(k + 2);
    }
    // In the truncated space a a^dagger = diag(1, ..., n-1, 0), so x^2 and p^2
    // match the products of the truncated x and p matrices.
    const double aad = nn + 1.0 - static_cast<double>(n) * std::norm(c(n - 1));
    QuadratureMoments m;
    m.occupation = nn;
    m.mean_x = std::sqrt(2.0) * a1.real();
    m.mean_p = std::sqrt(2.0) * a1.imag();
    const double x2 = 0.5 * (2.0 * a2.real() + nn + aad);
    const double p2 = 0.5 * (-2.0 * a2.real() + nn + aad);
    m.var_x = x2 - m.mean_x * m.mean_x;
    m.var_p = p2 - m.mean_p * m.mean_p;
    return m;
}

// ---------------------------------------------------------------------------
// Hermite functions

/// Normalised Hermite functions phi_0..phi_{dim-1} at x by the three-term
/// recurrence, carried in scaled form so that e^{-x^2/2} never underflows
/// before the polynomial part has grown.
inline void hermite_functions(double x, Index dim, double* out) {
    const double log_base = -0.5 * x * x - 0.25 * std::log(std::numbers::pi);
    double prev = 0.0;
    double cur = 1.0;
    double log_scale = log_base;
    const double big = 1e150;
    const double log_big = std::log(big);
    auto emit = [&](Index n, double v) { out[n] = v == 0.0 ? 0.0 : v * std::exp(log_scale); };
    emit(0, cur);
    for (Index n = 1; n < dim; ++n) {
        const double next = std::sqrt(2.0 / static_cast<double>(n)) * x * cur -
                            std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n)) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > big) {
            cur /= big;
            prev /= big;
            log_scale += log_big;
        }
        emit(n, cur);
    }
}

/// Rows: points; columns: Hermite function index.
inline RealMatrix hermite_table(const std::vector<double>& points, Index dim) {
    RealMatrix table(static_cast<Index>(points.size()), dim);
    std::vector<double> row(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < points.size(); ++i) {
        hermite_functions(points[i], dim, row.data());
        for (Index n = 0; n < dim; ++n) table(static_cast<Index>(i), n) = row[static_cast<std::size_t>(n)];
    }
    return table;
}

/// Beyond this radius every basis function of the truncated space is
/// numerically zero.
inline double basis_support_radius(Index dim) { return std::sqrt(2.0 * static_cast<double>(dim) + 1.0) + 8.0; }

struct SampledWavefunction {
    std::vector<double> x;
    std::vector<Complex> psi;
    std::optional<std::string> warning;

    std::vector<double> density() const {
        std::vector<double> d(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) d[i] = std::norm(psi[i]);
        return d;
    }
};

/// psi(x) = sum_n c_n phi_n(x).
inline SampledWavefunction position_wavefunction(const FockState& state, const std::vector<double>& xs) {
    const RealMatrix table = hermite_table(xs, state.dim());
    const Vector values = table.cast<Complex>() * state.amplitudes();
    SampledWavefunction out;
    out.x = xs;
    out.psi.assign(values.data(), values.data() + values.size());
    const double turning = std::sqrt(2.0 * static_cast<double>(state.dim()) + 1.0);
    for (double x : xs) {
        if (std::abs(x) > turning) {
            out.warning = "grid extends beyond |x| = " + std::to_string(turning) +
                          " where the truncated basis cannot represent the state";
            break;
        }
    }
    return out;
}

/// Momentum-space wavefunction: the Fourier transform maps phi_n to
/// (-i)^n phi_n.
inline SampledWavefunction momentum_wavefunction(const FockState& state, const std::vector<double>& ps) {
    Vector rotated = state.amplitudes();
    const Complex phase[4] = {1.0, -kI, -1.0, kI};
    for (Index n = 0; n < rotated.size(); ++n) rotated(n) *= phase[n % 4];
    return position_wavefunction(FockState::normalized(std::move(rotated)), ps);
}

inline std::vector<double> uniform_points(double lo, double hi, Index count) {
    if (count < 2) throw DomainError("uniform grid needs at least 2 points");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
}

// ---------------------------------------------------------------------------
// Well classification

enum class WellRole { localized, symmetric, antisymmetric, delocalized };

inline const char* to_string(WellRole r) {
    switch (r) {
        case WellRole::localized: return "localized";
        case WellRole::symmetric: return "symmetric";
        case WellRole::antisymmetric: return "antisymmetric";
        case WellRole::delocalized: return "delocalized";
    }
    return "?";
}

struct WellLabel {
    Index state = 0;             // eigenstate index
    double energy = 0.0;         // hbar omega
    int well = -1;               // index into the minima list, -1 when delocalized
    int ordinal = -1;            // level number within the well
    double mean_x = 0.0;
    WellRole role = WellRole::delocalized;
    int partner = -1;            // other member of a tunnelling pair
    std::vector<double> weights; // probability in each well basin
};

struct WellClassification {
    std::vector<PotentialExtremum> minima;   // left to right
    std::vector<double> barriers;            // barrier tops between consecutive minima
    std::vector<WellLabel> labels;

    /// Lowest state localized in `well`, if any.
    std::optional<Index> lowest_in_well(int well) const {
        for (const auto& l : labels)
            if (l.role == WellRole::localized && l.well == well) return l.state;
        return std::nullopt;
    }
};

/// Assigns each eigenstate to a potential well by its probability in the
/// well basins. A state with >= `threshold` of its weight in one basin is
/// localized there; its ordinal counts the lower states already in that well.
/// Adjacent pairs sharing two wells with splitting below `pair_splitting`
/// are tunnelling pairs; the even (parity about the symmetry point) member
/// is `symmetric`. Pair members count one level in each of their wells.
inline WellClassification classify_well_states(const SpectralResult& spectral, const DerivedScales& scales,
                                               double bias_flux, double threshold = 0.9,
                                               double pair_splitting = 1e-2) {
    if (!spectral.has_vectors()) throw DomainError("classification needs eigenvectors");
    WellClassification out;
    const double e_top = spectral.eigenvalues(spectral.size() - 1);
    const double reach = std::sqrt(2.0 * (std::max(e_top, 0.0) + scales.nu_over_omega)) + 2.0;
    const double spacing = 1e-3 * scales.flux_quantum_x();
    std::vector<PotentialExtremum> ext = potential_extrema(scales, bias_flux, -reach, reach, spacing);
    for (const auto& e : ext)
        if (e.minimum && e.value < e_top) out.minima.push_back(e);
    if (out.minima.empty()) throw DomainError("no potential minimum in the populated region");

    // Basin boundaries: the maximum between consecutive minima.
    std::vector<double> edges;
    for (std::size_t w = 0; w + 1 < out.minima.size(); ++w) {
        double best_x = 0.5 * (out.minima[w].x + out.minima[w + 1].x);
        double best_u = -std::numeric_limits<double>::infinity();
        for (const auto& e : ext) {
            if (!e.minimum && e.x > out.minima[w].x && e.x < out.minima[w + 1].x && e.value > best_u) {
                best_u = e.value;
                best_x = e.x;
            }
        }
        edges.push_back(best_x);
        out.barriers.push_back(best_u);
    }

    const Index dim = spectral.eigenvectors.rows();
    const double radius = basis_support_radius(dim);
    const Index npts = static_cast<Index>(std::ceil(2.0 * radius / 0.02)) + 1;
    const std::vector<double> xs = uniform_points(-radius, radius, npts);
    const double dx = xs[1] - xs[0];
    const RealMatrix table = hermite_table(xs, dim);
    const Matrix psi = table.cast<Complex>() * spectral.eigenvectors;
    const std::size_t wells = out.minima.size();

    const Matrix x_op = quadrature_operators(dim).x.matrix();
    for (Index s = 0; s < spectral.size(); ++s) {
        WellLabel l;
        l.state = s;
        l.energy = spectral.eigenvalues(s);
        l.weights.assign(wells, 0.0);
        for (Index i = 0; i < npts; ++i) {
            std::size_t w = 0;
            while (w < edges.size() && xs[static_cast<std::size_t>(i)] > edges[w]) ++w;
            l.weights[w] += std::norm(psi(i, s)) * dx;
        }
        const Vector v = spectral.eigenvectors.col(s);
        l.mean_x = v.dot(x_op * v).real();
        const auto best = std::max_element(l.weights.begin(), l.weights.end());
        if (*best >= threshold) {
            l.role = WellRole::localized;
            l.well = static_cast<int>(best - l.weights.begin());
        }
        out.labels.push_back(std::move(l));
    }

    // Tunnelling pairs among the delocalized states.
    const Matrix parity = parity_operator(dim).matrix();
    for (Index s = 0; s + 1 < spectral.size(); ++s) {
        WellLabel& lo = out.labels[static_cast<std::size_t>(s)];
        WellLabel& hi = out.labels[static_cast<std::size_t>(s + 1)];
        if (lo.role != WellRole::delocalized || hi.role != WellRole::delocalized) continue;
        if (lo.partner >= 0 || hi.energy - lo.energy > pair_splitting) continue;
        auto top_two = [](const std::vector<double>& w) {
            std::vector<std::size_t> idx(w.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return w[a] > w[b]; });
            return std::pair{std::min(idx[0], idx.size() > 1 ? idx[1] : idx[0]),
                             std::max(idx[0], idx.size() > 1 ? idx[1] : idx[0])};
        };
        if (wells < 2) continue;
        const auto pl = top_two(lo.weights);
        const auto ph = top_two(hi.weights);
        if (pl != ph || lo.weights[pl.first] + lo.weights[pl.second] < threshold) continue;
        const Vector vl = spectral.eigenvectors.col(s);
        const Vector vh = spectral.eigenvectors.col(s + 1);
        const double par_lo = vl.dot(parity * vl).real();
        const double par_hi = vh.dot(parity * vh).real();
        const bool lo_even = par_lo >= par_hi;
        lo.role = lo_even ? WellRole::symmetric : WellRole::antisymmetric;
        hi.role = lo_even ? WellRole::antisymmetric : WellRole::symmetric;
        lo.partner = static_cast<int>(s + 1);
        hi.partner = static_cast<int>(s);
    }

    // Ordinals by energy order within each well.
    std::vector<int> count(wells, 0);
    for (auto& l : out.labels) {
        if (l.role == WellRole::localized) {
            l.ordinal = count[static_cast<std::size_t>(l.well)]++;
        } else if ((l.role == WellRole::symmetric || l.role == WellRole::antisymmetric) &&
                   l.partner > static_cast<int>(l.state)) {
            // Pair: the lower member takes both wells' next ordinals.
            std::vector<std::size_t> idx(wells);
            for (std::size_t i = 0; i < wells; ++i) idx[i] = i;
            std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return l.weights[a] > l.weights[b]; });
            const std::size_t left = std::min(idx[0], idx[1]);
            const std::size_t right = std::max(idx[0], idx[1]);
            auto& partner = out.labels[static_cast<std::size_t>(l.partner)];
            l.well = partner.well = static_cast<int>(left);
            l.ordinal = partner.ordinal = count[left];
            ++count[left];
            ++count[right];
        }
    }
    return out;
}

/// Symmetric/antisymmetric pair with a reproducible sign convention: the
/// largest component of |s> is positive and |a> is signed so that
/// (|s> + |a>)/sqrt 2 sits at negative x (the left well).
struct TunnellingPair {
    FockState symmetric;
    FockState antisymmetric;
    double splitting = 0.0;  // E_a - E_s, hbar omega (may be negative)
    Index symmetric_index = 0;
    Index antisymmetric_index = 0;
};

inline TunnellingPair make_tunnelling_pair(const SpectralResult& spectral, Index first, Index second) {
    const FockState u = eigenstate(spectral, first);
    const FockState v = eigenstate(spectral, second);
    const Matrix parity = parity_operator(u.dim()).matrix();
    const bool first_even = u.expectation(parity).real() >= v.expectation(parity).real();
    TunnellingPair pair;
    pair.symmetric_index = first_even ? first : second;
    pair.antisymmetric_index = first_even ? second : first;
    const FockState& s = first_even ? u : v;
    FockState a = first_even ? v : u;
    const Matrix x = quadrature_operators(u.dim()).x.matrix();
    if (s.amplitudes().dot(x * a.amplitudes()).real() > 0.0) a = FockState(-a.amplitudes());
    pair.symmetric = s;
    pair.antisymmetric = a;
    pair.splitting = spectral.eigenvalues(pair.antisymmetric_index) - spectral.eigenvalues(pair.symmetric_index);
    return pair;
}

/// Among adjacent eigenstate pairs below the lowest barrier top, the one
/// whose members are most strongly shared between two wells (largest
/// minimum basin weight). Used to locate resonant tunnelling pairs in
/// asymmetric potentials.
inline std::optional<std::pair<Index, Index>> most_hybridized_pair(const WellClassification& c) {
    if (c.minima.size() < 2 || c.barriers.empty()) return std::nullopt;
    const double ceiling = *std::max_element(c.barriers.begin(), c.barriers.end());
    double best = 0.0;
    std::optional<std::pair<Index, Index>> out;
    for (std::size_t i = 0; i + 1 < c.labels.size(); ++i) {
        const auto& u = c.labels[i];
        const auto& v = c.labels[i + 1];
        if (v.energy >= ceiling) break;
        auto shared = [](const WellLabel& l) {
            std::vector<double> w = l.weights;
            std::sort(w.begin(), w.end(), std::greater<>());
            return w.size() > 1 ? w[1] : 0.0;
        };
        const double score = std::min(shared(u), shared(v));
        if (score > best) {
            best = score;
            out = std::pair{u.state, v.state};
        }
    }
    return out;
}

}  // namespace squid
