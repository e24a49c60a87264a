#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "squidsim/scenarios.hpp"

using namespace squid;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("squidsim_test_" + name);
    fs::remove_all(dir);
    return dir;
}

ScenarioSpec small(const std::string& name) {
    ScenarioSpec s = default_spec(name);
    s.dim = 200;
    s.converge = false;
    s.grid = PhaseSpaceGrid::square(10.0, 101);
    s.wavefunction_points = 101;
    return s;
}

std::vector<std::vector<double>> read_rows(const std::string& csv, std::string* header = nullptr) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    if (header) *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST(Config, ParsesFlatKeyValueText) {
    const ConfigMap m = parse_config("# comment\n\n  squid.bias_flux = 0.49  \nfock.dim=300\n");
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m.at("squid.bias_flux"), "0.49");
    EXPECT_EQ(m.at("fock.dim"), "300");
}

TEST(Config, RejectsMalformedLines) {
    EXPECT_THROW(parse_config("fock.dim 300\n"), ConfigError);
    EXPECT_THROW(parse_config("fock.dim = 1\nfock.dim = 2\n"), ConfigError);
    EXPECT_THROW(parse_config(" = 2\n"), ConfigError);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    ScenarioSpec s;
    EXPECT_THROW(apply_config(s, {{"fock.dimension", "10"}}), ConfigError);
    EXPECT_THROW(apply_config(s, {{"fock.dim", "ten"}}), ConfigError);
    EXPECT_THROW(apply_config(s, {{"squid.bias_flux", "0.5x"}}), ConfigError);
    EXPECT_THROW(apply_config(s, {{"state.kind", "squeezed"}}), ConfigError);
    EXPECT_THROW(apply_config(s, {{"squid.josephson_energy_j", "1e-24"}, {"squid.critical_current_a", "1e-6"}}),
                 ConfigError);
}

TEST(Config, ValidationCatchesInconsistentSpecs) {
    ScenarioSpec s = default_spec("evolve");
    s.evolve.step = 0.0;
    EXPECT_THROW(validate_spec(s), ConfigError);
    s = default_spec("evolve");
    s.format = "xml";
    EXPECT_THROW(validate_spec(s), ConfigError);
    s = default_spec("spectrum");
    s.sweep.step = -0.1;
    EXPECT_THROW(validate_spec(s), ConfigError);
}

TEST(Config, UnknownScenarioIsAConfigError) {
    EXPECT_THROW(default_spec("cat-050"), ConfigError);
    EXPECT_THROW(make_spec("wigner", {{"scenario.name", "weyl"}}), ConfigError);
}

TEST(Config, SpecEchoRoundTripsThroughText) {
    ScenarioSpec s = default_spec("cat-phase");
    s.squid.bias_flux = 0.4999999999999999;
    s.dim = 321;
    s.state.thetas = {0.1, 1.0 / 3.0};
    s.dampings = {0.0, 1e-3};
    s.evolve.write_density = true;
    s.grid = PhaseSpaceGrid{{-7.5, 8.25, 99}, {-3.0, 3.0, 51}};
    const ConfigMap echo = spec_to_config(s);
    const ConfigMap reparsed = parse_config(render_config(echo));
    ScenarioSpec back = spec_from_config(reparsed);
    EXPECT_EQ(spec_to_config(back), echo);
    EXPECT_EQ(back.squid.bias_flux, s.squid.bias_flux);
    EXPECT_EQ(back.state.thetas, s.state.thetas);
    EXPECT_EQ(back.grid.first.count, 99);
}

TEST(Config, EveryScenarioDefaultIsValidAndRoundTrips) {
    for (const auto& n : scenario_names()) {
        const ScenarioSpec s = default_spec(n);
        EXPECT_NO_THROW(validate_spec(s)) << n;
        EXPECT_EQ(spec_to_config(spec_from_config(spec_to_config(s))), spec_to_config(s)) << n;
    }
}

TEST(Io, AtomicWriteLeavesNoTemporary) {
    const fs::path dir = scratch("atomic");
    const fs::path file = dir / "nested" / "a.csv";
    write_file_atomic(file, "x,y\n1,2\n");
    write_file_atomic(file, "x,y\n3,4\n");
    EXPECT_EQ(read_file(file), "x,y\n3,4\n");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "nested")) ++entries;
    EXPECT_EQ(entries, 1u);
    fs::remove_all(dir);
}

TEST(Io, UnwritableTargetRaisesIoError) {
    const fs::path dir = scratch("blocked");
    write_file_atomic(dir / "file", "");
    EXPECT_THROW(write_file_atomic(dir / "file" / "child.csv", "x"), IoError);
    EXPECT_THROW(read_file(dir / "absent"), IoError);
    fs::remove_all(dir);
}

TEST(Io, NumbersUseTwelveSignificantDigits) {
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(-2.5e-20), "-2.5e-20");
    EXPECT_EQ(std::stod(format_exact(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Scenarios, RunsAreByteIdentical) {
    ScenarioSpec s = small("cat-049");
    const Dataset a = run_scenario(s);
    const Dataset b = run_scenario(s);
    ASSERT_EQ(a.files.size(), b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
        EXPECT_EQ(a.files[i].name, b.files[i].name);
        EXPECT_EQ(a.files[i].content, b.files[i].content) << a.files[i].name;
    }
    EXPECT_EQ(a.metadata.dump(), b.metadata.dump());

    const fs::path d1 = scratch("det1"), d2 = scratch("det2");
    emit_dataset(a, "csv", d1);
    emit_dataset(b, "csv", d2);
    for (const auto& f : a.files) EXPECT_EQ(read_file(d1 / f.name), read_file(d2 / f.name));
    EXPECT_EQ(read_file(d1 / "metadata.json"), read_file(d2 / "metadata.json"));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST(Scenarios, MetadataEchoReproducesTheRun) {
    ScenarioSpec s = small("wigner");
    s.squid.bias_flux = 0.5;
    s.state.kind = StateKind::pair;
    const Dataset a = run_scenario(s);
    const fs::path dir = scratch("echo");
    emit_dataset(a, "csv", dir);
    const ScenarioSpec back = spec_from_config(load_config(dir / "metadata.json"));
    const Dataset b = run_scenario(back);
    ASSERT_EQ(a.files.size(), b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) EXPECT_EQ(a.files[i].content, b.files[i].content);
    EXPECT_EQ(a.metadata.dump(), b.metadata.dump());
    fs::remove_all(dir);
}

TEST(Scenarios, MetadataRecordsProvenance) {
    const Dataset d = run_scenario(small("cat-049"));
    const auto& m = d.metadata;
    EXPECT_EQ(m.at("code_version"), kCodeVersion);
    EXPECT_EQ(m.at("scenario"), "cat-049");
    EXPECT_NEAR(m.at("derived_scales").at("nu_over_omega").get<double>(), 7.779959779680027, 1e-9);
    EXPECT_EQ(m.at("fock").at("0.49").at("dim"), 200);
    EXPECT_EQ(m.at("files").size(), d.files.size());
    EXPECT_TRUE(m.at("warnings").is_array());
    EXPECT_EQ(m.dump().find("time"), std::string::npos);
}

TEST(Scenarios, JsonBundleCarriesEveryFile) {
    const Dataset d = run_scenario(small("cat-049"));
    const fs::path dir = scratch("bundle");
    const auto written = emit_dataset(d, "json-bundle", dir);
    ASSERT_EQ(written.size(), 1u);
    const auto bundle = nlohmann::json::parse(read_file(dir / "bundle.json"));
    for (const auto& f : d.files) EXPECT_EQ(bundle.at("payload").at(f.name).get<std::string>(), f.content);
    EXPECT_EQ(spec_to_config(spec_from_config(parse_config(read_file(dir / "bundle.json")))),
              d.metadata.at("config").get<ConfigMap>());
    EXPECT_THROW(emit_dataset(d, "hdf5", dir), ConfigError);
    fs::remove_all(dir);
}

TEST(Scenarios, PotentialWellsWritesPerBiasFiles) {
    ScenarioSpec s = small("potential-wells");
    s.state_count = 3;
    const Dataset d = run_scenario(s);
    for (const char* b : {"0", "0.49", "0.5"}) {
        const std::string tag = std::string("_phi") + b;
        ASSERT_NE(d.find("potential" + tag + ".csv"), nullptr) << b;
        ASSERT_NE(d.find("levels" + tag + ".csv"), nullptr) << b;
        for (int n = 0; n < 3; ++n) EXPECT_NE(d.find("wavefunction" + tag + "_n" + std::to_string(n) + ".csv"), nullptr);
    }
    std::string header;
    const auto pot = read_rows(d.find("potential_phi0.5.csv")->content, &header);
    EXPECT_EQ(header, "x,U");
    const DerivedScales sc = derive_scales(standard_params());
    for (const auto& row : pot) EXPECT_NEAR(row[1], row[0] * row[0] / 2 - sc.nu_over_omega * std::cos(std::sqrt(2.0) * sc.cosine_scale_k * row[0] + std::numbers::pi), 1e-9);
    const auto wf = read_rows(d.find("wavefunction_phi0_n0.csv")->content, &header);
    EXPECT_EQ(header, "x,re_psi,im_psi,density");
    double norm = 0.0;
    for (std::size_t i = 1; i < wf.size(); ++i) norm += 0.5 * (wf[i][3] + wf[i - 1][3]) * (wf[i][0] - wf[i - 1][0]);
    EXPECT_NEAR(norm, 1.0, 1e-4);
}

TEST(Scenarios, LevelSweepIsPeriodicInBias) {
    ScenarioSpec s = small("level-sweep");
    s.sweep = {0.0, 1.0, 0.125, 6};
    const Dataset d = run_scenario(s);
    std::string header;
    const auto rows = read_rows(d.find("sweep.csv")->content, &header);
    EXPECT_EQ(header, "phi_x,E0,E1,E2,E3,E4,E5");
    ASSERT_EQ(rows.size(), 9u);
    for (std::size_t j = 1; j < rows.front().size(); ++j) EXPECT_NEAR(rows.front()[j], rows.back()[j], 1e-9);
}

TEST(Scenarios, CatPhaseQuarterTurnSplitsWeightEvenly) {
    ScenarioSpec s = small("cat-phase");
    s.grid = PhaseSpaceGrid::square(12.0, 121);
    const Dataset d = run_scenario(s);
    ASSERT_NE(d.find("wigner_theta0.csv"), nullptr);
    ASSERT_NE(d.find("wigner_theta1.5708.csv"), nullptr);
    ASSERT_NE(d.find("wigner_theta3.14159.csv"), nullptr);
    const auto& f = d.metadata.at("results").at("fields");
    const auto& quarter = f.at("theta1.5708").at("wigner");
    EXPECT_NEAR(quarter.at("weight_left").get<double>(), 0.5, 0.01);
    EXPECT_NEAR(quarter.at("weight_right").get<double>(), 0.5, 0.01);
    EXPECT_GT(f.at("theta0").at("wigner").at("weight_left").get<double>(), 0.99);
    EXPECT_GT(f.at("theta3.14159").at("wigner").at("weight_right").get<double>(), 0.99);
}

TEST(Scenarios, DecohereCatWritesTrajectoryAndSnapshots) {
    ScenarioSpec s = small("decohere-cat");
    s.evolve.duration = 2.0;
    s.evolve.snapshot_every = 200;
    s.evolve.basis_levels = 30;
    s.evolve.write_density = true;
    const Dataset d = run_scenario(s);
    EXPECT_EQ(d.files.size(), 1u + 3u * 6u);
    for (const char* t : {"0.00", "1.00", "2.00"}) {
        EXPECT_NE(d.find(std::string("wigner_tau") + t + ".csv"), nullptr);
        EXPECT_NE(d.find(std::string("weyl_tau") + t + ".json"), nullptr);
        EXPECT_NE(d.find(std::string("rho_tau") + t + "_im.csv"), nullptr);
    }
    std::string header;
    const auto traj = read_rows(d.find("trajectory.csv")->content, &header);
    EXPECT_EQ(header, "tau,mean_x,mean_p,var_x,var_p,occupation,trace,purity");
    EXPECT_NEAR(traj.back()[0], 2.0, 1e-12);
    const auto& fields = d.metadata.at("results").at("fields");
    EXPECT_LT(fields.at("tau2.00").at("wigner").at("negativity_volume").get<double>(),
              fields.at("tau0.00").at("wigner").at("negativity_volume").get<double>());
    EXPECT_NEAR(fields.at("tau2.00").at("weyl").at("central_peak").get<double>(), 0.5 / std::numbers::pi, 1e-9);
}

TEST(Scenarios, SqueezeDipsBelowVacuumVariance) {
    ScenarioSpec s = default_spec("squeeze");
    s.converge = false;
    s.dim = 300;
    s.evolve.duration = 1.0;
    s.dampings = {0.0, 0.1};
    const Dataset d = run_scenario(s);
    ASSERT_NE(d.find("trajectory_g0.csv"), nullptr);
    ASSERT_NE(d.find("trajectory_g0.1.csv"), nullptr);
    for (const char* g : {"0", "0.1"}) {
        const auto& run = d.metadata.at("integrator").at("runs").at(g);
        EXPECT_LT(run.at("min_var_x").get<double>(), 0.5) << g;
    }
}

TEST(Scenarios, OversizedWorkingBasisIsRejected) {
    ScenarioSpec s = small("evolve");
    s.evolve.basis_levels = 500;
    EXPECT_THROW(run_scenario(s), ConfigError);
}

TEST(Configs, ShippedConfigsLoad) {
    std::size_t count = 0;
    for (const auto& e : fs::directory_iterator(SQUIDSIM_CONFIG_DIR)) {
        if (e.path().extension() != ".cfg") continue;
        ++count;
        EXPECT_NO_THROW(spec_from_config(load_config(e.path()))) << e.path();
    }
    EXPECT_GE(count, 1u);
    const ScenarioSpec sq = spec_from_config(load_config(fs::path(SQUIDSIM_CONFIG_DIR) / "squeeze.cfg"));
    EXPECT_NEAR(derive_scales(sq.squid).nu_over_omega, derive_scales(default_spec("squeeze").squid).nu_over_omega, 1e-9);
}
