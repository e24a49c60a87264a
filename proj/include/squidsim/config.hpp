#pragma once

// Flat key-value configuration with dotted keys, e.g.
//
//   # comment
//   scenario.name = cat-049
//   squid.capacitance_f = 5e-15
//   squid.bias_flux = 0.49
//
// A dataset's metadata JSON is accepted as well: its "config" object holds
// the same keys.

#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "squidsim/io.hpp"
#include "squidsim/open_system.hpp"
#include "squidsim/phase_space.hpp"

namespace squid {

using ConfigMap = std::map<std::string, std::string>;

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace detail

inline ConfigMap parse_config(std::string_view text) {
    ConfigMap out;
    const std::string_view body = detail::trim(text);
    if (!body.empty() && body.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("invalid JSON configuration: ") + e.what());
        }
        const auto it = j.find("config");
        if (it == j.end() || !it->is_object()) throw ConfigError("JSON configuration has no \"config\" object");
        for (const auto& [key, value] : it->items()) {
            if (!value.is_string()) throw ConfigError("config value for " + key + " must be a string");
            out[key] = value.get<std::string>();
        }
        return out;
    }
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (out.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + key);
        out[key] = value;
    }
    return out;
}

inline ConfigMap load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text);
}

inline std::string render_config(const ConfigMap& m) {
    std::string out;
    for (const auto& [k, v] : m) out += k + " = " + v + '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Scenario settings

enum class StateKind {
    eigenstate,   // state.index
    coherent,     // state.alpha_re, state.alpha_im
    pair,         // tunnelling pair (state.first, state.second): (|s> + e^{i theta}|a>)/sqrt2
    well_ground,  // lowest states of the two deepest wells: (|A> + e^{i theta}|B>)/sqrt2
    hybridized,   // most strongly shared adjacent pair below the barrier, as `pair`
};

inline const char* to_string(StateKind k) {
    switch (k) {
        case StateKind::eigenstate: return "eigenstate";
        case StateKind::coherent: return "coherent";
        case StateKind::pair: return "pair";
        case StateKind::well_ground: return "well-ground";
        case StateKind::hybridized: return "hybridized";
    }
    return "?";
}

struct StateRecipe {
    StateKind kind = StateKind::eigenstate;
    Index index = 0;
    Complex alpha{0.0, 0.0};
    Index first = 0;
    Index second = 1;
    std::vector<double> thetas{0.0};
};

struct SweepSpec {
    double start = 0.0;
    double stop = 1.0;
    double step = 0.01;
    Index levels = 10;
};

struct EvolveSpec {
    double step = 0.005;
    double duration = 40.0;
    Index sample_every = 20;
    Index snapshot_every = 1000;
    Index basis_levels = 40;  // 0 = full Fock model
    bool write_density = false;
    bool write_fields = false;  // Wigner and Weyl field per snapshot
};

struct ScenarioSpec {
    std::string name = "eigenstates";
    SquidParams squid = standard_params();
    std::vector<double> biases;  // scanned biases; empty = squid.bias_flux only
    Index dim = 400;
    bool converge = true;
    Index track_levels = 10;
    double converge_tol = 1e-8;  // hbar omega
    Index max_dim = 0;           // 0 = fock.dim + 400
    double temperature = 1.0;
    double bath_frequency = 0.0;  // 0 = ring frequency
    std::vector<double> dampings{0.01};
    StateRecipe state;
    Index state_count = 6;
    PhaseSpaceGrid grid = PhaseSpaceGrid::square();
    Index wavefunction_points = 641;
    SweepSpec sweep;
    EvolveSpec evolve;
    std::string out_dir = "out";
    std::string format = "csv";

    BathParams bath(double damping) const {
        const double freq = bath_frequency > 0.0 ? bath_frequency : derive_scales(squid).omega;
        return {temperature, freq, damping};
    }
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || !std::isfinite(out))
        throw ConfigError("value for " + key + " is not a finite number: '" + v + "'");
    return out;
}

inline Index parse_index(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("value for " + key + " is not an integer: '" + v + "'");
    return static_cast<Index>(out);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("value for " + key + " is not a boolean: '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const std::size_t end = std::min(v.find(',', pos), v.size());
        const std::string item(trim(std::string_view(v).substr(pos, end - pos)));
        if (!item.empty()) out.push_back(parse_double(key, item));
        pos = end + 1;
    }
    return out;
}

inline std::string render_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_exact(v[i]);
    return out;
}

inline StateKind parse_state_kind(const std::string& v) {
    for (StateKind k : {StateKind::eigenstate, StateKind::coherent, StateKind::pair, StateKind::well_ground,
                        StateKind::hybridized})
        if (v == to_string(k)) return k;
    throw ConfigError("unknown state.kind '" + v + "'");
}

}  // namespace detail

/// Applies `m` on top of `spec`. Josephson coupling may be given as
/// squid.josephson_energy_j, squid.josephson_phi0sq_over_l or
/// squid.critical_current_a (at most one).
inline void apply_config(ScenarioSpec& spec, const ConfigMap& m) {
    using namespace detail;
    int josephson_keys = 0;
    double phi0sq_over_l = -1.0, critical_current = -1.0;
    for (const auto& [key, v] : m) {
        if (key == "scenario.name") spec.name = v;
        else if (key == "squid.capacitance_f") spec.squid.capacitance = parse_double(key, v);
        else if (key == "squid.inductance_h") spec.squid.inductance = parse_double(key, v);
        else if (key == "squid.josephson_energy_j") spec.squid.josephson_energy = parse_double(key, v), ++josephson_keys;
        else if (key == "squid.josephson_phi0sq_over_l") phi0sq_over_l = parse_double(key, v), ++josephson_keys;
        else if (key == "squid.critical_current_a") critical_current = parse_double(key, v), ++josephson_keys;
        else if (key == "squid.bias_flux") spec.squid.bias_flux = parse_double(key, v);
        else if (key == "scan.biases") spec.biases = parse_list(key, v);
        else if (key == "fock.dim") spec.dim = parse_index(key, v);
        else if (key == "fock.converge") spec.converge = parse_bool(key, v);
        else if (key == "fock.track_levels") spec.track_levels = parse_index(key, v);
        else if (key == "fock.tolerance") spec.converge_tol = parse_double(key, v);
        else if (key == "fock.max_dim") spec.max_dim = parse_index(key, v);
        else if (key == "bath.temperature_k") spec.temperature = parse_double(key, v);
        else if (key == "bath.frequency_rad_s") spec.bath_frequency = parse_double(key, v);
        else if (key == "bath.dampings") spec.dampings = parse_list(key, v);
        else if (key == "state.kind") spec.state.kind = parse_state_kind(v);
        else if (key == "state.index") spec.state.index = parse_index(key, v);
        else if (key == "state.alpha_re") spec.state.alpha.real(parse_double(key, v));
        else if (key == "state.alpha_im") spec.state.alpha.imag(parse_double(key, v));
        else if (key == "state.first") spec.state.first = parse_index(key, v);
        else if (key == "state.second") spec.state.second = parse_index(key, v);
        else if (key == "state.thetas") spec.state.thetas = parse_list(key, v);
        else if (key == "state.count") spec.state_count = parse_index(key, v);
        else if (key == "grid.x_min") spec.grid.first.min = parse_double(key, v);
        else if (key == "grid.x_max") spec.grid.first.max = parse_double(key, v);
        else if (key == "grid.x_points") spec.grid.first.count = parse_index(key, v);
        else if (key == "grid.p_min") spec.grid.second.min = parse_double(key, v);
        else if (key == "grid.p_max") spec.grid.second.max = parse_double(key, v);
        else if (key == "grid.p_points") spec.grid.second.count = parse_index(key, v);
        else if (key == "grid.wavefunction_points") spec.wavefunction_points = parse_index(key, v);
        else if (key == "sweep.start") spec.sweep.start = parse_double(key, v);
        else if (key == "sweep.stop") spec.sweep.stop = parse_double(key, v);
        else if (key == "sweep.step") spec.sweep.step = parse_double(key, v);
        else if (key == "sweep.levels") spec.sweep.levels = parse_index(key, v);
        else if (key == "evolve.step") spec.evolve.step = parse_double(key, v);
        else if (key == "evolve.duration") spec.evolve.duration = parse_double(key, v);
        else if (key == "evolve.sample_every") spec.evolve.sample_every = parse_index(key, v);
        else if (key == "evolve.snapshot_every") spec.evolve.snapshot_every = parse_index(key, v);
        else if (key == "evolve.basis_levels") spec.evolve.basis_levels = parse_index(key, v);
        else if (key == "evolve.write_density") spec.evolve.write_density = parse_bool(key, v);
        else if (key == "evolve.write_fields") spec.evolve.write_fields = parse_bool(key, v);
        else if (key == "output.dir") spec.out_dir = v;
        else if (key == "output.format") spec.format = v;
        else throw ConfigError("unknown configuration key '" + key + "'");
    }
    if (josephson_keys > 1) throw ConfigError("give at most one of the squid.josephson_* / critical_current keys");
    if (phi0sq_over_l >= 0.0)
        spec.squid = SquidParams::from_reduced_josephson(spec.squid.capacitance, spec.squid.inductance, phi0sq_over_l,
                                                         spec.squid.bias_flux);
    if (critical_current >= 0.0)
        spec.squid = SquidParams::from_critical_current(spec.squid.capacitance, spec.squid.inductance,
                                                        critical_current, spec.squid.bias_flux);
}

/// Complete echo of `spec`; doubles are written with 17 significant digits.
inline ConfigMap spec_to_config(const ScenarioSpec& s) {
    using detail::render_list;
    ConfigMap m;
    auto idx = [](Index v) { return std::to_string(v); };
    auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
    m["scenario.name"] = s.name;
    m["squid.capacitance_f"] = format_exact(s.squid.capacitance);
    m["squid.inductance_h"] = format_exact(s.squid.inductance);
    m["squid.josephson_energy_j"] = format_exact(s.squid.josephson_energy);
    m["squid.bias_flux"] = format_exact(s.squid.bias_flux);
    m["scan.biases"] = render_list(s.biases);
    m["fock.dim"] = idx(s.dim);
    m["fock.converge"] = flag(s.converge);
    m["fock.track_levels"] = idx(s.track_levels);
    m["fock.tolerance"] = format_exact(s.converge_tol);
    m["fock.max_dim"] = idx(s.max_dim);
    m["bath.temperature_k"] = format_exact(s.temperature);
    m["bath.frequency_rad_s"] = format_exact(s.bath_frequency);
    m["bath.dampings"] = render_list(s.dampings);
    m["state.kind"] = to_string(s.state.kind);
    m["state.index"] = idx(s.state.index);
    m["state.alpha_re"] = format_exact(s.state.alpha.real());
    m["state.alpha_im"] = format_exact(s.state.alpha.imag());
    m["state.first"] = idx(s.state.first);
    m["state.second"] = idx(s.state.second);
    m["state.thetas"] = render_list(s.state.thetas);
    m["state.count"] = idx(s.state_count);
    m["grid.x_min"] = format_exact(s.grid.first.min);
    m["grid.x_max"] = format_exact(s.grid.first.max);
    m["grid.x_points"] = idx(s.grid.first.count);
    m["grid.p_min"] = format_exact(s.grid.second.min);
    m["grid.p_max"] = format_exact(s.grid.second.max);
    m["grid.p_points"] = idx(s.grid.second.count);
    m["grid.wavefunction_points"] = idx(s.wavefunction_points);
    m["sweep.start"] = format_exact(s.sweep.start);
    m["sweep.stop"] = format_exact(s.sweep.stop);
    m["sweep.step"] = format_exact(s.sweep.step);
    m["sweep.levels"] = idx(s.sweep.levels);
    m["evolve.step"] = format_exact(s.evolve.step);
    m["evolve.duration"] = format_exact(s.evolve.duration);
    m["evolve.sample_every"] = idx(s.evolve.sample_every);
    m["evolve.snapshot_every"] = idx(s.evolve.snapshot_every);
    m["evolve.basis_levels"] = idx(s.evolve.basis_levels);
    m["evolve.write_density"] = flag(s.evolve.write_density);
    m["evolve.write_fields"] = flag(s.evolve.write_fields);
    m["output.dir"] = s.out_dir;
    m["output.format"] = s.format;
    return m;
}

/// Checks every precondition that can be checked without computing.
inline void validate_spec(const ScenarioSpec& s) {
    try {
        s.squid.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    if (s.dim < 2) throw ConfigError("fock.dim must be at least 2");
    if (s.track_levels < 1 || s.track_levels > s.dim) throw ConfigError("fock.track_levels must lie in [1, fock.dim]");
    if (!(s.converge_tol > 0.0)) throw ConfigError("fock.tolerance must be positive");
    if (s.max_dim < 0) throw ConfigError("fock.max_dim must be >= 0");
    if (!(s.temperature >= 0.0)) throw ConfigError("bath.temperature_k must be >= 0");
    if (s.bath_frequency < 0.0) throw ConfigError("bath.frequency_rad_s must be >= 0");
    for (double g : s.dampings)
        if (!(g >= 0.0)) throw ConfigError("bath.dampings must be >= 0");
    if (s.state.index < 0 || s.state.first < 0 || s.state.second < 0 || s.state.first == s.state.second)
        throw ConfigError("state indices must be non-negative and distinct");
    if (s.state.thetas.empty()) throw ConfigError("state.thetas must not be empty");
    if (s.state_count < 1) throw ConfigError("state.count must be positive");
    for (const Axis* a : {&s.grid.first, &s.grid.second})
        if (a->count < 2 || !(a->max > a->min)) throw ConfigError("grid axes need max > min and at least 2 points");
    if (s.wavefunction_points < 2) throw ConfigError("grid.wavefunction_points must be >= 2");
    if (!(s.sweep.step > 0.0) || !(s.sweep.stop >= s.sweep.start)) throw ConfigError("sweep range is invalid");
    if (s.sweep.levels < 1 || s.sweep.levels > s.dim) throw ConfigError("sweep.levels must lie in [1, fock.dim]");
    if (!(s.evolve.step > 0.0) || !(s.evolve.duration >= 0.0)) throw ConfigError("evolve step/duration invalid");
    if (s.evolve.sample_every < 1 || s.evolve.snapshot_every < 0) throw ConfigError("evolve strides invalid");
    if (s.evolve.basis_levels == 1 || s.evolve.basis_levels < 0)
        throw ConfigError("evolve.basis_levels must be 0 or at least 2");
    if (s.format != "csv" && s.format != "json-bundle") throw ConfigError("output.format must be csv or json-bundle");
    if (s.out_dir.empty()) throw ConfigError("output.dir must not be empty");
}

}  // namespace squid
