#pragma once

// Lindblad master equation for the ring coupled to a monochromatic thermal
// bath. Dimensionless convention: H in units of hbar*omega, time tau = omega*t,
// damping g = gamma / (hbar omega).
//
//   d rho / d tau = -i [H, rho]
//                   + (g/2)(M+1) (2 a rho a^dag - {a^dag a, rho})
//                   + (g/2) M    (2 a^dag rho a - {a a^dag, rho})

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "squidsim/density.hpp"

namespace squid {

struct BathParams {
    double temperature = 0.0;  // K
    double frequency = 0.0;    // rad/s
    double damping = 0.0;      // g, in units of omega

    void validate() const {
        if (!(temperature >= 0.0) || !std::isfinite(temperature)) throw ParameterError("bath temperature must be >= 0");
        if (!(frequency > 0.0) || !std::isfinite(frequency)) throw ParameterError("bath frequency must be positive");
        if (!(damping >= 0.0) || !std::isfinite(damping)) throw ParameterError("damping must be >= 0");
    }
};

/// Bose occupation M = 1 / (exp(hbar omega_b / k_B T) - 1); zero at T = 0.
inline double bath_occupation(const BathParams& bath,
                              const PhysicalConstants& k = PhysicalConstants::codata2018()) {
    bath.validate();
    if (bath.temperature == 0.0) return 0.0;
    const double ratio = k.hbar * bath.frequency / (k.boltzmann * bath.temperature);
    return 1.0 / std::expm1(ratio);
}

struct DissipationRates {
    double g = 0.0;
    double occupation = 0.0;  // M
};

inline DissipationRates dissipation_rates(const BathParams& bath,
                                          const PhysicalConstants& k = PhysicalConstants::codata2018()) {
    return {bath.damping, bath_occupation(bath, k)};
}

/// Operators the propagator needs, expressed in the working basis. The
/// working basis is either the truncated Fock basis itself or the lowest
/// eigenstates of a Fock-basis Hamiltonian (columns of `basis`).
struct OpenSystemModel {
    Matrix hamiltonian;
    Matrix annihilation;
    Matrix x, p, x2, p2, number;
    Matrix basis;  // Fock-space columns; empty for the Fock model
    Index fock_dim = 0;

    Index dim() const { return hamiltonian.rows(); }
    bool truncated() const { return basis.size() != 0; }

    static OpenSystemModel fock(const Matrix& h) {
        const Index n = h.rows();
        const auto [a, ad] = ladder_operators(n);
        const auto [x, p] = quadrature_operators(n);
        OpenSystemModel m;
        m.hamiltonian = h;
        m.annihilation = a.matrix();
        m.x = x.matrix();
        m.p = p.matrix();
        m.x2 = m.x * m.x;
        m.p2 = m.p * m.p;
        m.number = number_operator(n).matrix();
        m.fock_dim = n;
        return m;
    }

    /// Restriction to the `levels` lowest eigenstates of `h`. Quadrature
    /// moments are projected from the full Fock space.
    static OpenSystemModel energy_truncated(const Matrix& h, Index levels) {
        if (levels < 2 || levels > h.rows()) throw DomainError("energy truncation needs 2 <= levels <= dim");
        const SpectralResult spectral = eigensolve(h, levels);
        const Index n = h.rows();
        const auto [a, ad] = ladder_operators(n);
        const auto [x, p] = quadrature_operators(n);
        const Matrix& V = spectral.eigenvectors;
        auto project = [&](const Matrix& op) -> Matrix { return V.adjoint() * op * V; };
        OpenSystemModel m;
        m.hamiltonian = spectral.eigenvalues.cast<Complex>().asDiagonal();
        m.annihilation = project(a.matrix());
        m.x = project(x.matrix());
        m.p = project(p.matrix());
        m.x2 = project(x.matrix() * x.matrix());
        m.p2 = project(p.matrix() * p.matrix());
        m.number = project(number_operator(n).matrix());
        m.basis = V;
        m.fock_dim = n;
        return m;
    }

    /// Fraction of `psi` (Fock basis) captured by the working basis.
    double captured_weight(const FockState& psi) const {
        if (!truncated()) return 1.0;
        return (basis.adjoint() * psi.amplitudes()).squaredNorm();
    }

    Matrix from_fock(const FockState& psi) const {
        if (psi.dim() != fock_dim) throw DomainError("state dimension does not match the model");
        Vector v = truncated() ? Vector(basis.adjoint() * psi.amplitudes()) : psi.amplitudes();
        v /= v.norm();
        return v * v.adjoint();
    }

    Matrix from_fock(const DensityMatrix& rho) const {
        if (rho.dim() != fock_dim) throw DomainError("density dimension does not match the model");
        if (!truncated()) return rho.matrix();
        Matrix r = basis.adjoint() * rho.matrix() * basis;
        return r / r.trace();
    }

    DensityMatrix to_fock(const Matrix& rho) const {
        Matrix full = truncated() ? Matrix(basis * rho * basis.adjoint()) : rho;
        full = 0.5 * (full + full.adjoint()).eval();
        return DensityMatrix(full / full.trace());
    }
};

/// Direct evaluation of the master-equation right-hand side.
inline Matrix lindblad_generator(const Matrix& rho, const Matrix& h, const Matrix& a, const DissipationRates& r) {
    const Index n = rho.rows();
    if (rho.cols() != n || h.rows() != n || h.cols() != n || a.rows() != n || a.cols() != n)
        throw DomainError("lindblad_generator: dimension mismatch");
    const Matrix ad = a.adjoint();
    const Matrix ada = ad * a;
    const Matrix aad = a * ad;
    Matrix out = -kI * (h * rho - rho * h);
    out += 0.5 * r.g * (r.occupation + 1.0) * (2.0 * a * rho * ad - ada * rho - rho * ada);
    out += 0.5 * r.g * r.occupation * (2.0 * ad * rho * a - aad * rho - rho * aad);
    return out;
}

/// Factored form of the generator used by the integrator:
///   Heff = H - i (g/2) [(M+1) a^dag a + M a a^dag],  Y = -i Heff rho,
///   L(rho) = Y + Y^dag + g(M+1) a rho a^dag + g M a^dag rho a.
class LindbladGenerator {
public:
    LindbladGenerator(const Matrix& h, const Matrix& a, const DissipationRates& r)
        : a_(a), ad_(a.adjoint()), down_(r.g * (r.occupation + 1.0)), up_(r.g * r.occupation) {
        if (h.rows() != h.cols() || a.rows() != h.rows() || a.cols() != h.cols())
            throw DomainError("LindbladGenerator: dimension mismatch");
        if (r.g < 0.0 || r.occupation < 0.0) throw ParameterError("negative damping or occupation");
        const Matrix ada = ad_ * a_;
        const Matrix aad = a_ * ad_;
        // -i Heff
        minus_i_heff_ = -kI * h - 0.5 * (down_ * ada + up_ * aad);
        tmp_.resize(h.rows(), h.cols());
    }

    Index dim() const { return a_.rows(); }

    void operator()(const Matrix& rho, Matrix& out) const {
        out.noalias() = minus_i_heff_ * rho;
        out += out.adjoint().eval();
        if (down_ != 0.0) {
            tmp_.noalias() = a_ * rho;
            out.noalias() += down_ * tmp_ * ad_;
        }
        if (up_ != 0.0) {
            tmp_.noalias() = ad_ * rho;
            out.noalias() += up_ * tmp_ * a_;
        }
    }

    Matrix operator()(const Matrix& rho) const {
        Matrix out(rho.rows(), rho.cols());
        (*this)(rho, out);
        return out;
    }

private:
    Matrix a_, ad_, minus_i_heff_;
    double down_, up_;
    mutable Matrix tmp_;
};

struct ObservableRecord {
    double tau = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double var_x = 0.0;
    double var_p = 0.0;
    double occupation = 0.0;
    double trace = 0.0;
    double purity = 0.0;
};

inline ObservableRecord observe(const OpenSystemModel& m, const Matrix& rho, double tau = 0.0) {
    auto ev = [&](const Matrix& op) { return (op.transpose().cwiseProduct(rho)).sum().real(); };
    ObservableRecord r;
    r.tau = tau;
    r.trace = rho.trace().real();
    r.mean_x = ev(m.x);
    r.mean_p = ev(m.p);
    r.var_x = ev(m.x2) - r.mean_x * r.mean_x;
    r.var_p = ev(m.p2) - r.mean_p * r.mean_p;
    r.occupation = ev(m.number);
    r.purity = rho.cwiseAbs2().sum();
    return r;
}

/// Observables of a Fock-basis density matrix.
inline ObservableRecord state_observables(const DensityMatrix& rho) {
    require_dim(rho.dim());
    const auto [x, p] = quadrature_operators(rho.dim());
    OpenSystemModel m;
    m.x = x.matrix();
    m.p = p.matrix();
    m.x2 = m.x * m.x;
    m.p2 = m.p * m.p;
    m.number = number_operator(rho.dim()).matrix();
    return observe(m, rho.matrix());
}

struct PropagationSettings {
    double step = 0.005;     // d tau
    double duration = 1.0;   // tau_max
    Index sample_every = 1;  // steps between observable records
    Index snapshot_every = 0;  // steps between stored density matrices; 0 = none
};

struct DensitySnapshot {
    double tau = 0.0;
    Matrix rho;  // working basis
};

struct Trajectory {
    std::vector<ObservableRecord> records;
    std::vector<DensitySnapshot> snapshots;
    std::vector<std::string> warnings;
    double max_trace_correction = 0.0;  // largest per-step |Tr rho - 1| before renormalisation
    double max_hermiticity = 0.0;       // largest per-step max|rho - rho^dag| before symmetrisation
    double min_eigenvalue = 0.0;        // smallest eigenvalue seen at record times

    std::string to_csv() const {
        std::string out = "tau,mean_x,mean_p,var_x,var_p,occupation,trace,purity\n";
        char buf[256];
        for (const auto& r : records) {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.tau, r.mean_x,
                          r.mean_p, r.var_x, r.var_p, r.occupation, r.trace, r.purity);
            out += buf;
        }
        return out;
    }
};

/// Fixed-step classical RK4. Each step is followed by Hermitisation and
/// trace renormalisation; a per-step trace correction above 1e-6 raises
/// StepSizeError, above 1e-8 adds a warning.
inline Trajectory propagate(const OpenSystemModel& model, const Matrix& rho0, const DissipationRates& rates,
                            const PropagationSettings& s) {
    const Index n = model.dim();
    if (rho0.rows() != n || rho0.cols() != n) throw DomainError("initial density matrix does not match the model");
    if (!(s.step > 0.0) || !(s.duration >= 0.0) || s.sample_every < 1 || s.snapshot_every < 0)
        throw ParameterError("invalid propagation settings");
    const LindbladGenerator L(model.hamiltonian, model.annihilation, rates);
    const auto steps = static_cast<long>(std::llround(s.duration / s.step));

    Trajectory traj;
    Matrix rho = rho0;
    Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), work(n, n);
    bool warned_trace = false, warned_positivity = false;

    auto record = [&](long step) {
        const double tau = static_cast<double>(step) * s.step;
        if (step % s.sample_every == 0) {
            traj.records.push_back(observe(model, rho, tau));
            Eigen::SelfAdjointEigenSolver<Matrix> eig(rho, Eigen::EigenvaluesOnly);
            const double lo = eig.eigenvalues()(0);
            traj.min_eigenvalue = std::min(traj.min_eigenvalue, lo);
            if (lo < -1e-4 && !warned_positivity) {
                char msg[128];
                std::snprintf(msg, sizeof msg, "positivity: eigenvalue %.3g at tau = %.6g", lo, tau);
                traj.warnings.emplace_back(msg);
                warned_positivity = true;
            }
        }
        if (s.snapshot_every > 0 && step % s.snapshot_every == 0) traj.snapshots.push_back({tau, rho});
    };

    record(0);
    const double h = s.step;
    for (long step = 1; step <= steps; ++step) {
        L(rho, k1);
        work = rho + (0.5 * h) * k1;
        L(work, k2);
        work = rho + (0.5 * h) * k2;
        L(work, k3);
        work = rho + h * k3;
        L(work, k4);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        traj.max_hermiticity = std::max(traj.max_hermiticity, hermiticity_error(rho));
        rho = 0.5 * (rho + rho.adjoint()).eval();
        const double tr = rho.trace().real();
        const double correction = std::abs(tr - 1.0);
        traj.max_trace_correction = std::max(traj.max_trace_correction, correction);
        if (!std::isfinite(tr) || correction > 1e-6) {
            char msg[160];
            std::snprintf(msg, sizeof msg, "trace drifted by %.3g in one step at tau = %.6g; reduce the step size",
                          correction, static_cast<double>(step) * h);
            throw StepSizeError(msg);
        }
        if (correction > 1e-8 && !warned_trace) {
            traj.warnings.emplace_back("trace correction above 1e-8 in a single step");
            warned_trace = true;
        }
        rho /= tr;
        record(step);
    }
    return traj;
}

}  // namespace squid
