#pragma once

// Named scenarios and generic runs producing CSV datasets with JSON metadata.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "squidsim/config.hpp"
#include "squidsim/io.hpp"
#include "squidsim/open_system.hpp"
#include "squidsim/phase_space.hpp"

namespace squid {

inline constexpr const char* kCodeVersion = "0.1.0";

struct DatasetFile {
    std::string name;
    std::string content;
};

struct Dataset {
    std::string scenario;
    std::vector<DatasetFile> files;
    nlohmann::json metadata;

    const DatasetFile* find(const std::string& name) const {
        for (const auto& f : files)
            if (f.name == name) return &f;
        return nullptr;
    }
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"potential-wells", "level-sweep", "cat-049", "cat-phase",
                                                "friedman",        "decohere-cat", "squeeze"};
    return names;
}

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"spectrum", "eigenstates", "wigner", "weyl", "evolve", "squeeze"};
    return names;
}

/// Defaults for a named scenario or subcommand.
inline ScenarioSpec default_spec(const std::string& name) {
    constexpr double pi = std::numbers::pi;
    ScenarioSpec s;
    s.name = name;
    if (name == "potential-wells") {
        s.biases = {0.0, 0.49, 0.5};
    } else if (name == "level-sweep" || name == "spectrum") {
        s.sweep = {0.0, 1.0, 0.01, 10};
    } else if (name == "cat-049") {
        s.squid.bias_flux = 0.49;
        s.state.kind = StateKind::well_ground;
    } else if (name == "cat-phase") {
        s.squid.bias_flux = 0.5;
        s.state.kind = StateKind::pair;
        s.state.thetas = {0.0, 0.5 * pi, pi};
    } else if (name == "friedman") {
        s.squid = friedman_params();
        s.track_levels = 30;
        s.state_count = 16;
        s.state.kind = StateKind::hybridized;
        s.state.thetas = {0.0, 0.5 * pi, pi};
    } else if (name == "decohere-cat") {
        s.squid.bias_flux = 0.5;
        s.dampings = {0.01};
        s.evolve.write_fields = true;
    } else if (name == "squeeze") {
        s.squid = SquidParams::from_reduced_josephson(5e-15, 3e-10, 0.24, 0.0);
        s.state.kind = StateKind::coherent;
        s.state.alpha = {0.0, 1.0};
        s.dampings = {0.0, 0.001, 0.01, 0.1};
        s.evolve.duration = 50.0;
        s.evolve.snapshot_every = 0;
    } else if (name == "eigenstates" || name == "wigner" || name == "weyl") {
    } else if (name == "evolve") {
        s.evolve.snapshot_every = 0;
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }
    return s;
}

/// Defaults for `name` overlaid with `config`; a scenario.name key in the
/// config must agree with `name`.
inline ScenarioSpec make_spec(const std::string& name, const ConfigMap& config) {
    ScenarioSpec s = default_spec(name);
    apply_config(s, config);
    if (s.name != name) throw ConfigError("config scenario.name '" + s.name + "' does not match '" + name + "'");
    validate_spec(s);
    return s;
}

/// Spec reconstructed from a metadata JSON (or flat config) alone.
inline ScenarioSpec spec_from_config(const ConfigMap& config) {
    const auto it = config.find("scenario.name");
    if (it == config.end()) throw ConfigError("config has no scenario.name");
    return make_spec(it->second, config);
}

namespace detail {

inline std::string tag(double v, const char* fmt = "%.6g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

inline nlohmann::json scales_json(const DerivedScales& s, double bias) {
    return {{"omega_rad_s", s.omega},
            {"frequency_hz", s.frequency_hz()},
            {"nu_over_omega", s.nu_over_omega},
            {"c_omega_s", s.c_omega},
            {"cosine_scale_k", s.cosine_scale_k},
            {"x_per_weber", s.x_per_weber},
            {"p_per_coulomb", s.p_per_coulomb},
            {"lc_period_s", s.lc_period},
            {"hbar_omega_j", s.hbar_omega},
            {"flux_quantum_x", s.flux_quantum_x()},
            {"bias_offset_x", bias_offset_x(s, bias)}};
}

inline nlohmann::json grid_json(const PhaseSpaceGrid& g) {
    return {{"first", {{"min", g.first.min}, {"max", g.first.max}, {"points", g.first.count}}},
            {"second", {{"min", g.second.min}, {"max", g.second.max}, {"points", g.second.count}}}};
}

struct Resolved {
    Index dim = 0;
    double max_shift = 0.0;
    bool converged = false;
};

inline Resolved resolve_dim(const ScenarioSpec& spec, const DerivedScales& scales, double bias) {
    if (!spec.converge) return {spec.dim, 0.0, false};
    const ConvergedDimension c = converge_dimension(scales, bias, spec.dim, spec.track_levels, spec.converge_tol, 100, spec.max_dim);
    return {c.dim, c.max_shift, true};
}

struct PreparedStates {
    std::vector<FockState> states;  // one per theta (a single entry for eigen/coherent states)
    std::vector<double> thetas;
    nlohmann::json descriptor;
};

inline PreparedStates prepare_states(const ScenarioSpec& spec, const SpectralResult& spectral,
                                     const DerivedScales& scales, double bias) {
    PreparedStates out;
    const StateRecipe& r = spec.state;
    out.descriptor = {{"kind", to_string(r.kind)}};
    auto need = [&](Index i) {
        if (i >= spectral.size())
            throw ConfigError("state index " + std::to_string(i) + " exceeds the " + std::to_string(spectral.size()) +
                              " computed eigenstates");
    };
    auto superpose = [&](const FockState& u, const FockState& v) {
        for (double theta : r.thetas) {
            out.states.push_back(phase_superposition(u, v, theta));
            out.thetas.push_back(theta);
        }
        out.descriptor["thetas"] = r.thetas;
    };
    auto pair_states = [&](Index i, Index j) {
        need(std::max(i, j));
        const TunnellingPair p = make_tunnelling_pair(spectral, i, j);
        out.descriptor["symmetric_index"] = p.symmetric_index;
        out.descriptor["antisymmetric_index"] = p.antisymmetric_index;
        out.descriptor["splitting_hbar_omega"] = p.splitting;
        superpose(p.symmetric, p.antisymmetric);
    };
    switch (r.kind) {
        case StateKind::eigenstate:
            need(r.index);
            out.states.push_back(eigenstate(spectral, r.index));
            out.thetas.push_back(0.0);
            out.descriptor["index"] = r.index;
            out.descriptor["energy_hbar_omega"] = spectral.eigenvalues(r.index);
            break;
        case StateKind::coherent:
            out.states.push_back(coherent_state(r.alpha, spectral.eigenvectors.rows()));
            out.thetas.push_back(0.0);
            out.descriptor["alpha"] = {r.alpha.real(), r.alpha.imag()};
            break;
        case StateKind::pair:
            pair_states(r.first, r.second);
            break;
        case StateKind::well_ground: {
            const WellClassification c = classify_well_states(spectral, scales, bias);
            if (c.minima.size() < 2) throw DomainError("the potential has fewer than two wells at this bias");
            std::vector<int> wells(c.minima.size());
            for (std::size_t w = 0; w < wells.size(); ++w) wells[w] = static_cast<int>(w);
            std::sort(wells.begin(), wells.end(),
                      [&](int a, int b) { return c.minima[static_cast<std::size_t>(a)].value < c.minima[static_cast<std::size_t>(b)].value; });
            const int left = std::min(wells[0], wells[1]);
            const int right = std::max(wells[0], wells[1]);
            const auto a = c.lowest_in_well(left);
            const auto b = c.lowest_in_well(right);
            if (!a || !b) throw DomainError("no localized state in one of the two deepest wells");
            out.descriptor["left_index"] = *a;
            out.descriptor["right_index"] = *b;
            superpose(eigenstate(spectral, *a), eigenstate(spectral, *b));
            break;
        }
        case StateKind::hybridized: {
            const WellClassification c = classify_well_states(spectral, scales, bias);
            const auto p = most_hybridized_pair(c);
            if (!p) throw DomainError("no hybridized pair below the barrier");
            out.descriptor["ordinals"] = {c.labels[static_cast<std::size_t>(p->first)].ordinal,
                                          c.labels[static_cast<std::size_t>(p->second)].ordinal};
            pair_states(p->first, p->second);
            break;
        }
    }
    return out;
}

inline Index spectral_count(const ScenarioSpec& spec, Index dim) {
    Index n = std::max<Index>({40, spec.state_count, spec.state.index + 1, spec.state.first + 1, spec.state.second + 1});
    return std::min(n, dim);
}

struct RunContext {
    const ScenarioSpec& spec;
    Dataset& data;
    nlohmann::json& results;
    std::vector<std::string>& warnings;

    void add(std::string name, std::string content) { data.files.push_back({std::move(name), std::move(content)}); }
};

inline void emit_eigenstates(RunContext& ctx, double bias, const DerivedScales& scales, const SpectralResult& sp,
                             const std::string& suffix) {
    const ScenarioSpec& spec = ctx.spec;
    const WellClassification c = classify_well_states(sp, scales, bias);
    const double reach = std::min(spec.grid.first.edge(), basis_support_radius(sp.eigenvectors.rows()) - 8.0);
    const std::vector<double> xs = uniform_points(-reach, reach, spec.wavefunction_points);

    std::string pot = "x,U\n";
    for (double x : xs) pot += format_number(x) + ',' + format_number(reduced_potential(x, scales, bias)) + '\n';
    ctx.add("potential" + suffix + ".csv", std::move(pot));

    std::string levels = "level,energy,well,ordinal,role,mean_x,var_x,var_p\n";
    nlohmann::json wells = nlohmann::json::array();
    const Index count = std::min(spec.state_count, sp.size());
    for (Index n = 0; n < count; ++n) {
        const FockState psi = eigenstate(sp, n);
        const WellLabel& l = c.labels[static_cast<std::size_t>(n)];
        const QuadratureMoments m = quadrature_moments(psi);
        levels += std::to_string(n) + ',' + format_number(l.energy) + ',' + std::to_string(l.well) + ',' +
                  std::to_string(l.ordinal) + ',' + to_string(l.role) + ',' + format_number(l.mean_x) + ',' +
                  format_number(m.var_x) + ',' + format_number(m.var_p) + '\n';
        const SampledWavefunction w = position_wavefunction(psi, xs);
        if (w.warning && n == 0) ctx.warnings.push_back(*w.warning);
        ctx.add("wavefunction" + suffix + "_n" + std::to_string(n) + ".csv", wavefunction_csv(w));
    }
    ctx.add("levels" + suffix + ".csv", std::move(levels));
    for (std::size_t w = 0; w < c.minima.size(); ++w) {
        nlohmann::json entry = {{"x", c.minima[w].x}, {"u", c.minima[w].value}};
        if (const auto lo = c.lowest_in_well(static_cast<int>(w))) {
            const QuadratureMoments m = quadrature_moments(eigenstate(sp, *lo));
            entry["lowest_state"] = *lo;
            entry["lowest_var_x"] = m.var_x;
            entry["lowest_var_p"] = m.var_p;
        }
        wells.push_back(entry);
    }
    ctx.results["biases"][tag(bias)] = {{"energies", std::vector<double>(sp.eigenvalues.data(), sp.eigenvalues.data() + count)},
                                        {"wells", wells},
                                        {"barriers", c.barriers}};
}

inline nlohmann::json field_sidecar(const PhaseSpaceField& f, const nlohmann::json& state) {
    return {{"kind", to_string(f.kind)}, {"grid", grid_json(f.grid)}, {"state", state}};
}

inline void emit_fields(RunContext& ctx, const StateComponents& comp, const std::string& stem_suffix,
                        const nlohmann::json& state, bool wigner, bool weyl, const DerivedScales* scales = nullptr,
                        double separation = 0.0) {
    nlohmann::json summary = {{"state", state}};
    if (wigner) {
        const PhaseSpaceField f = wigner_function(comp, ctx.spec.grid);
        const PhaseSpaceDiagnostics d = phase_space_diagnostics(f, comp);
        const auto [left, right] = half_plane_weights(f, 0.0);
        nlohmann::json diag = {{"normalization", d.normalization},
                               {"max_x_marginal_error", d.max_x_marginal_error},
                               {"negativity_volume", d.negativity_volume},
                               {"lobe_positions", d.lobe_positions},
                               {"purity_estimate", d.purity_estimate},
                               {"purity", d.purity},
                               {"imaginary_residue", f.imaginary_residue},
                               {"weight_left", left},
                               {"weight_right", right}};
        if (d.fringe_amplitude) diag["fringe_amplitude"] = *d.fringe_amplitude;
        summary["wigner"] = diag;
        nlohmann::json side = field_sidecar(f, state);
        side["diagnostics"] = diag;
        ctx.add("wigner" + stem_suffix + ".csv", f.to_csv());
        ctx.add("wigner" + stem_suffix + ".json", side.dump(2) + '\n');
    }
    if (weyl) {
        const PhaseSpaceField f = weyl_function(comp, ctx.spec.grid);
        nlohmann::json diag;
        const Axis& xa = f.grid.first;
        const Index p0 = std::clamp<Index>(static_cast<Index>(std::lround(-f.grid.second.min / f.grid.second.step())), 0,
                                           f.grid.second.count - 1);
        const Index x0 = std::clamp<Index>(static_cast<Index>(std::lround(-xa.min / xa.step())), 0, xa.count - 1);
        diag["central_peak"] = std::abs(f.values(x0, p0));
        if (separation > 0.0) {
            double side_peak = 0.0;
            for (Index i = 0; i < xa.count; ++i)
                if (std::abs(std::abs(xa.at(i)) - separation) <= 1.0)
                    side_peak = std::max(side_peak, std::abs(f.values(i, p0)));
            diag["side_peak"] = side_peak;
            diag["side_peak_separation"] = separation;
        }
        summary["weyl"] = diag;
        nlohmann::json side = field_sidecar(f, state);
        side["diagnostics"] = diag;
        ctx.add("weyl" + stem_suffix + ".csv", f.to_csv());
        ctx.add("weyl" + stem_suffix + ".json", side.dump(2) + '\n');
    }
    (void)scales;
    ctx.results["fields"][stem_suffix.empty() ? std::string("main") : stem_suffix.substr(1)] = summary;
}

/// Separation of the two deepest potential minima, or 0 when there is one.
inline double well_separation(const DerivedScales& scales, double bias) {
    const auto minima = potential_minima(scales, bias, 4.0 * scales.nu_over_omega + 10.0);
    if (minima.size() < 2) return 0.0;
    std::vector<PotentialExtremum> m = minima;
    std::sort(m.begin(), m.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    return std::abs(m[1].x - m[0].x);
}

}  // namespace detail

/// Runs a named scenario or subcommand. Deterministic given `spec`.
inline Dataset run_scenario(const ScenarioSpec& spec) {
    validate_spec(spec);
    using detail::tag;
    Dataset data;
    data.scenario = spec.name;
    nlohmann::json results = nlohmann::json::object();
    std::vector<std::string> warnings;
    detail::RunContext ctx{spec, data, results, warnings};

    const std::string& name = spec.name;
    const double bias = spec.squid.bias_flux;
    const DerivedScales scales = derive_scales(spec.squid);
    nlohmann::json fock = nlohmann::json::object();
    nlohmann::json integrator = nlohmann::json::object();

    auto resolve = [&](double b) {
        const detail::Resolved r = detail::resolve_dim(spec, scales, b);
        fock[tag(b)] = {{"dim", r.dim}, {"converged", r.converged}, {"max_shift", r.max_shift}};
        return r.dim;
    };

    if (name == "potential-wells" || name == "eigenstates" || name == "friedman") {
        std::vector<double> biases = spec.biases.empty() ? std::vector<double>{bias} : spec.biases;
        for (double b : biases) {
            const Index dim = resolve(b);
            const SpectralResult sp = eigensolve(RingHamiltonian(scales, dim).at(b), detail::spectral_count(spec, dim));
            detail::emit_eigenstates(ctx, b, scales, sp, biases.size() > 1 || name != "eigenstates" ? "_phi" + tag(b) : "");
            if (name == "friedman") {
                const detail::PreparedStates ps = detail::prepare_states(spec, sp, scales, b);
                for (std::size_t i = 0; i < ps.states.size(); ++i) {
                    nlohmann::json st = ps.descriptor;
                    st["theta"] = ps.thetas[i];
                    detail::emit_fields(ctx, components(ps.states[i]), "_theta" + tag(ps.thetas[i]), st, true, false);
                }
            }
        }
    } else if (name == "level-sweep" || name == "spectrum") {
        const Index dim = resolve(bias);
        const FluxSweep sw = spectrum_sweep(scales, dim, spec.sweep.start, spec.sweep.stop, spec.sweep.step, spec.sweep.levels);
        data.files.push_back({"sweep.csv", sw.to_csv()});
        results["points"] = sw.bias.size();
        results["first_last_max_difference"] = (sw.levels.row(0) - sw.levels.row(sw.levels.rows() - 1)).cwiseAbs().maxCoeff();
    } else if (name == "cat-049" || name == "cat-phase" || name == "wigner" || name == "weyl") {
        const Index dim = resolve(bias);
        const SpectralResult sp = eigensolve(RingHamiltonian(scales, dim).at(bias), detail::spectral_count(spec, dim));
        const detail::PreparedStates ps = detail::prepare_states(spec, sp, scales, bias);
        const double separation = detail::well_separation(scales, bias);
        results["well_separation"] = separation;
        const bool many = ps.states.size() > 1;
        const std::vector<double> xs = uniform_points(-spec.grid.first.edge(), spec.grid.first.edge(), spec.wavefunction_points);
        for (std::size_t i = 0; i < ps.states.size(); ++i) {
            nlohmann::json st = ps.descriptor;
            st["theta"] = ps.thetas[i];
            const std::string suffix = many ? "_theta" + tag(ps.thetas[i]) : "";
            detail::emit_fields(ctx, components(ps.states[i]), suffix, st, name != "weyl", name == "weyl", &scales,
                                separation);
            data.files.push_back({"state" + suffix + "_wavefunction.csv", wavefunction_csv(position_wavefunction(ps.states[i], xs))});
        }
    } else if (name == "decohere-cat" || name == "evolve" || name == "squeeze") {
        const Index dim = resolve(bias);
        if (spec.evolve.basis_levels > dim)
            throw ConfigError("evolve.basis_levels exceeds the Fock dimension " + std::to_string(dim));
        const Matrix h = RingHamiltonian(scales, dim).at(bias).matrix();
        const SpectralResult sp = eigensolve(h, detail::spectral_count(spec, dim));
        const detail::PreparedStates ps = detail::prepare_states(spec, sp, scales, bias);
        const FockState& psi0 = ps.states.front();
        const OpenSystemModel model = spec.evolve.basis_levels > 0
                                          ? OpenSystemModel::energy_truncated(h, spec.evolve.basis_levels)
                                          : OpenSystemModel::fock(h);
        const double captured = model.captured_weight(psi0);
        if (1.0 - captured > 1e-8) {
            char msg[160];
            std::snprintf(msg, sizeof msg, "initial state weight %.3g lies outside the %ld-level working basis",
                          1.0 - captured, static_cast<long>(model.dim()));
            warnings.emplace_back(msg);
        }
        const Matrix rho0 = model.from_fock(psi0);
        const PropagationSettings set{spec.evolve.step, spec.evolve.duration, spec.evolve.sample_every,
                                      spec.evolve.snapshot_every};
        const double separation = detail::well_separation(scales, bias);
        integrator = {{"method", "rk4"},
                      {"step", set.step},
                      {"duration", set.duration},
                      {"sample_every", set.sample_every},
                      {"snapshot_every", set.snapshot_every},
                      {"basis", spec.evolve.basis_levels > 0 ? "energy" : "fock"},
                      {"basis_levels", model.dim()},
                      {"initial_weight_captured", captured},
                      {"runs", nlohmann::json::object()}};
        const bool many = spec.dampings.size() > 1;
        for (double g : spec.dampings) {
            const BathParams bath = spec.bath(g);
            const DissipationRates rates = dissipation_rates(bath);
            const Trajectory t = propagate(model, rho0, rates, set);
            const std::string gs = many ? "_g" + tag(g) : "";
            data.files.push_back({"trajectory" + gs + ".csv", t.to_csv()});
            auto min_it = std::min_element(t.records.begin(), t.records.end(),
                                           [](const auto& a, const auto& b) { return a.var_x < b.var_x; });
            integrator["runs"][tag(g)] = {{"damping", g},
                                          {"occupation", rates.occupation},
                                          {"max_trace_correction", t.max_trace_correction},
                                          {"max_hermiticity", t.max_hermiticity},
                                          {"min_eigenvalue", t.min_eigenvalue},
                                          {"min_var_x", min_it->var_x},
                                          {"min_var_x_tau", min_it->tau},
                                          {"final_var_x", t.records.back().var_x},
                                          {"final_purity", t.records.back().purity}};
            for (const auto& w : t.warnings) warnings.push_back("g=" + tag(g) + ": " + w);
            for (const auto& snap : t.snapshots) {
                const std::string ts = gs + "_tau" + tag(snap.tau, "%.2f");
                const DensityMatrix rho = model.to_fock(snap.rho);
                if (spec.evolve.write_fields) {
                    nlohmann::json st = ps.descriptor;
                    st["tau"] = snap.tau;
                    st["damping"] = g;
                    detail::emit_fields(ctx, components(rho), ts, st, true, true, &scales, separation);
                }
                if (spec.evolve.write_density) {
                    data.files.push_back({"rho" + ts + "_re.csv", matrix_part_csv(rho.matrix(), false)});
                    data.files.push_back({"rho" + ts + "_im.csv", matrix_part_csv(rho.matrix(), true)});
                }
            }
        }
        results["well_separation"] = separation;
        results["state"] = ps.descriptor;
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }

    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : data.files) files.push_back(f.name);
    const ConfigMap config = spec_to_config(spec);
    data.metadata = {{"scenario", spec.name},
                     {"code_version", kCodeVersion},
                     {"config", config},
                     {"derived_scales", detail::scales_json(scales, bias)},
                     {"fock", fock},
                     {"integrator", integrator},
                     {"results", results},
                     {"warnings", warnings},
                     {"files", files}};
    return data;
}

/// Writes the dataset below `dir`: every file plus metadata.json (csv), or a
/// single bundle.json holding metadata and file contents (json-bundle).
inline std::vector<std::filesystem::path> emit_dataset(const Dataset& data, const std::string& format,
                                                       const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    if (format == "csv") {
        for (const auto& f : data.files) {
            write_file_atomic(dir / f.name, f.content);
            written.push_back(dir / f.name);
        }
        write_file_atomic(dir / "metadata.json", data.metadata.dump(2) + '\n');
        written.push_back(dir / "metadata.json");
    } else if (format == "json-bundle") {
        nlohmann::json bundle = data.metadata;
        nlohmann::json payload = nlohmann::json::object();
        for (const auto& f : data.files) payload[f.name] = f.content;
        bundle["payload"] = payload;
        write_file_atomic(dir / "bundle.json", bundle.dump(2) + '\n');
        written.push_back(dir / "bundle.json");
    } else {
        throw ConfigError("unknown output format '" + format + "'");
    }
    return written;
}

}  // namespace squid
