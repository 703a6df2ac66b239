#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "qsw/qsw.hpp"

using namespace qsw;
namespace fs = std::filesystem;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t;
    for (int i = 0; i < n; ++i) t.push_back(a + (b - a) * i / (n - 1));
    return t;
}

RunConfig small_run(const fs::path& out) {
    RunConfig c;
    c.grid = {2, 32, 16.0};
    c.solver.t_end = 0.5;
    c.solver.dt = 0.01;
    c.diagnostics.snapshot_every = 0.1;
    c.initial.eps = 1e-3;
    c.out_dir = out.string();
    return c;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(QSW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(FitDecay, ExactPowerLaw) {
    const auto t = linspace(0.0, 30.0, 61);
    std::vector<double> v;
    for (double x : t) v.push_back(3.0 * std::pow(1.0 + x, -1.5));
    FloorOptions none;
    none.mode = FloorMode::none;
    const auto r = fit_decay(t, v, "synthetic", {2.0, 20.0}, 1.5, 0.2, none);
    EXPECT_NEAR(r.fitted, 1.5, 1e-3);
    EXPECT_TRUE(r.pass);
}

TEST(FitDecay, TailMeanFloorIsRemoved) {
    const auto t = linspace(0.0, 400.0, 801);
    std::vector<double> v;
    for (double x : t) v.push_back(std::pow(1.0 + x, -1.0) + 1e-3);
    FloorOptions f;
    f.mode = FloorMode::fixed;
    f.value = 1e-3;
    const auto r = fit_decay(t, v, "rho", {2.0, 20.0}, 1.0, 0.15, f);
    EXPECT_NEAR(r.fitted, 1.0, 1e-9);
    FloorOptions tail;
    tail.tail_start = 350.0;
    const auto q = fit_decay(t, v, "rho", {2.0, 20.0}, 1.0, 0.15, tail);
    EXPECT_NEAR(q.floor, 1e-3 + 1.0 / 376.0, 1e-4);
}

TEST(FitDecay, PassFlagFollowsTolerance) {
    const auto t = linspace(0.0, 30.0, 61);
    std::vector<double> v;
    for (double x : t) v.push_back(std::pow(1.0 + x, -1.2));
    FloorOptions none;
    none.mode = FloorMode::none;
    EXPECT_FALSE(fit_decay(t, v, "u", {2.0, 20.0}, 1.5, 0.19, none).pass);
    EXPECT_TRUE(fit_decay(t, v, "u", {2.0, 20.0}, 1.5, 0.21, none).pass);
}

TEST(FitDecay, Errors) {
    const auto t = linspace(0.0, 30.0, 61);
    std::vector<double> v(t.size(), 1.0);
    FloorOptions f;
    f.mode = FloorMode::fixed;
    f.value = 2.0;
    EXPECT_THROW(fit_decay(t, v, "x", {2.0, 20.0}, 1.0, 0.1, f), DiagnosticError);
    f.value = 0.0;
    EXPECT_THROW(fit_decay(t, v, "x", {2.0, 2.8}, 1.0, 0.1, f), DiagnosticError);
    EXPECT_THROW(fit_decay(t, v, "x", {3.0, 2.0}, 1.0, 0.1, f), ConfigError);
}

TEST(RunConfig, JsonRoundTrip) {
    RunConfig c;
    c.grid = {2, 128, 32.0};
    c.solver.mode = Mode::friction;
    c.solver.mu = 0.5;
    c.solver.Fr = 2.0;
    c.solver.r_fric = 0.5;
    c.solver.stepping = Stepping::heun;
    c.initial.seed = 42;
    c.diagnostics.window = {1.0, 8.0};
    c.suite = "quasi";
    const auto j = to_json(c);
    const auto d = run_config_from_json(j);
    EXPECT_EQ(to_json(d), j);
    EXPECT_EQ(d.solver.mode, Mode::friction);
    EXPECT_EQ(d.initial.seed, 42u);
}

TEST(RunConfig, RejectsUnknownKeys) {
    auto j = to_json(RunConfig{});
    j["solver"]["viscosity"] = 1.0;
    EXPECT_THROW(run_config_from_json(j), ConfigError);
    j = to_json(RunConfig{});
    j["extra"] = 1;
    EXPECT_THROW(run_config_from_json(j), ConfigError);
    j = to_json(RunConfig{});
    j["grid"]["n"] = "big";
    EXPECT_THROW(run_config_from_json(j), ConfigError);
    j = to_json(RunConfig{});
    j["suite"] = "nope";
    EXPECT_THROW(run_config_from_json(j), ConfigError);
}

TEST(RunConfig, SampleConfigsLoad) {
    for (const auto& e : fs::directory_iterator(fs::path(QSW_SOURCE_DIR) / "configs")) {
        EXPECT_NO_THROW(load_run_config(e.path().string())) << e.path();
    }
}

TEST(Run, CsvIsBitIdenticalAcrossRuns) {
    const auto dir = fs::temp_directory_path() / "qsw_det";
    fs::remove_all(dir);
    auto a = small_run(dir / "a");
    auto b = small_run(dir / "b");
    write_artifacts(a, run_simulation(a));
    write_artifacts(b, run_simulation(b));
    const auto ca = slurp(dir / "a" / "series.csv");
    EXPECT_FALSE(ca.empty());
    EXPECT_EQ(ca, slurp(dir / "b" / "series.csv"));
    EXPECT_EQ(ca.substr(0, ca.find('\n')), csv_header);
    const auto rows = read_csv(dir / "a" / "series.csv");
    EXPECT_EQ(rows.size(), 6u);
    const auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
    EXPECT_EQ(summary["config"], to_json(a));
    fs::remove_all(dir);
}

TEST(Run, HeatOnlyLinfColumnDecreases) {
    auto c = small_run(fs::temp_directory_path() / "qsw_heat");
    c.solver.mode = Mode::heat_only;
    c.initial.eps = 0.0;
    c.solver.t_end = 2.0;
    const auto r = run_simulation(c);
    ASSERT_EQ(r.status, RunStatus::completed);
    for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_LT(r.rows[i].linf_rho_minus_1, r.rows[i - 1].linf_rho_minus_1);
}

TEST(Run, FrictionResidualStaysAtRoundOff) {
    auto c = small_run(fs::temp_directory_path() / "qsw_fric");
    c.grid = {2, 64, 16.0};
    c.solver.mode = Mode::friction;
    c.solver.mu = 1.0;
    c.solver.Fr = 1.0;
    c.solver.r_fric = 1.0;
    c.initial.eps = 0.0;
    const auto r = run_simulation(c);
    ASSERT_EQ(r.status, RunStatus::completed);
    for (const auto& row : r.rows) EXPECT_LE(std::max(row.res_mass, row.res_mom), 1e-8) << row.t;
}

TEST(Run, ShallowWaterForcingMovesU2) {
    auto c = small_run(fs::temp_directory_path() / "qsw_sw");
    c.initial.eps = 0.0;
    const auto r = run_simulation(c);
    ASSERT_EQ(r.status, RunStatus::completed);
    ASSERT_TRUE(r.final_state.has_value());
    EXPECT_GT(r.final_state->u2.max_abs(), 0.0);
    EXPECT_GT(r.rows.back().ft_norm, 0.0);
}

TEST(Verify, ReportJson) {
    const auto r = verify_lp();
    EXPECT_TRUE(r.pass());
    const auto j = to_json(r);
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_EQ(j["checks"].size(), r.checks.size());
}

TEST(Cli, ExitCodes) {
    const auto dir = fs::temp_directory_path() / "qsw_cli";
    fs::remove_all(dir);
    EXPECT_EQ(cli("verify --suite lp --out " + dir.string()), 0);
    EXPECT_TRUE(fs::exists(dir / "verify.json"));
    EXPECT_EQ(cli("run --grid 5x5"), 3);
    EXPECT_EQ(cli("run --suite nope"), 3);
    EXPECT_EQ(cli("run --bogus"), 3);
    EXPECT_EQ(cli("run --config /nonexistent.json"), 3);
    EXPECT_EQ(cli("run --grid 32x32@16 --t-end 0.2 --dt 0.01 --out " + (dir / "run").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "run" / "series.csv"));
    EXPECT_TRUE(fs::exists(dir / "run" / "summary.json"));
    // Too short a series to fit: a diagnostic failure, not a config error.
    EXPECT_EQ(cli("fit --out " + (dir / "run").string()), 1);
    fs::remove_all(dir);
}

TEST(Cli, BlowupExitCode) {
    const auto dir = fs::temp_directory_path() / "qsw_blowup";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto c = small_run(dir / "out");
    c.initial.eps = 1.0;
    auto j = to_json(c);
    j["solver"]["cfl_max"] = 1e-9;
    std::ofstream(dir / "cfg.json") << j.dump();
    EXPECT_EQ(cli("run --config " + (dir / "cfg.json").string()), 2);
    fs::remove_all(dir);
}
