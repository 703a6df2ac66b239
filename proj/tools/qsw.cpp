// Command-line driver: run a simulation, run verification suites, or fit the
// decay exponents of a recorded series.
//
// Exit codes: 0 all pass, 1 verification failure, 2 blowup, 3 config error.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsw/qsw.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_blowup = 2;
constexpr int exit_config = 3;

struct Overrides {
    std::string config;
    std::optional<std::string> mode, grid, out, suite;
    std::optional<double> mu, a, fr, rfric, dt, t_end, eps;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--mode", o.mode, "shallow_water, friction or heat_only");
    cmd->add_option("--grid", o.grid, "Grid as NxN[@period], e.g. 512x512@64");
    cmd->add_option("--mu", o.mu, "Viscosity coefficient");
    cmd->add_option("--a", o.a, "Pressure coefficient");
    cmd->add_option("--fr", o.fr, "Froude number");
    cmd->add_option("--rfric", o.rfric, "Friction coefficient");
    cmd->add_option("--dt", o.dt, "Time step");
    cmd->add_option("--t-end", o.t_end, "Final time");
    cmd->add_option("--eps", o.eps, "Perturbation size");
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--suite", o.suite, "lp, besov, paraproduct, quasi, solver, decay or all");
}

/// Parses NxN...[@period]: the number of factors is the dimension.
void apply_grid(const std::string& spec, qsw::GridConfig& g) {
    std::string dims = spec;
    const auto at = spec.find('@');
    if (at != std::string::npos) {
        dims = spec.substr(0, at);
        const std::string p = spec.substr(at + 1);
        const auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), g.period);
        if (ec != std::errc{} || end != p.data() + p.size()) throw qsw::ConfigError("bad grid period in '" + spec + "'");
    }
    int dim = 0;
    int n = -1;
    std::size_t pos = 0;
    while (pos <= dims.size()) {
        const auto x = dims.find('x', pos);
        const std::string part = dims.substr(pos, x == std::string::npos ? std::string::npos : x - pos);
        int v = 0;
        const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc{} || end != part.data() + part.size()) throw qsw::ConfigError("bad grid '" + spec + "'");
        if (n >= 0 && v != n) throw qsw::ConfigError("grids must be cubic, got '" + spec + "'");
        n = v;
        ++dim;
        if (x == std::string::npos) break;
        pos = x + 1;
    }
    g.dim = dim;
    g.n = n;
}

qsw::RunConfig resolve(const Overrides& o) {
    qsw::RunConfig c = o.config.empty() ? qsw::RunConfig{} : qsw::load_run_config(o.config);
    if (o.mode) c.solver.mode = qsw::parse_mode(*o.mode);
    if (o.grid) apply_grid(*o.grid, c.grid);
    if (o.mu) c.solver.mu = *o.mu;
    if (o.a) c.solver.a = *o.a;
    if (o.fr) c.solver.Fr = *o.fr;
    if (o.rfric) c.solver.r_fric = *o.rfric;
    if (o.dt) c.solver.dt = *o.dt;
    if (o.t_end) c.solver.t_end = *o.t_end;
    if (o.eps) c.initial.eps = *o.eps;
    if (o.seed) c.initial.seed = *o.seed;
    if (o.out) c.out_dir = *o.out;
    if (o.suite) c.suite = *o.suite;
    c.validate();
    return c;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw qsw::ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

int cmd_run(const qsw::RunConfig& c) {
    std::cerr << "run: " << to_string(c.solver.mode) << ", " << c.grid.n << "^" << c.grid.dim << ", t_end "
              << c.solver.t_end << ", out " << c.out_dir << '\n';
    const auto r = qsw::run_simulation(c, c.diagnostics.dump_every > 0.0,
                                       [](const qsw::SeriesRow& row, const qsw::SimState&) {
                                           std::fprintf(stderr, "  t = %8.3f  |rho-1|_inf = %.4e  res = %.2e\n",
                                                        row.t, row.linf_rho_minus_1,
                                                        std::max(row.res_mass, row.res_mom));
                                       });
    qsw::write_artifacts(c, r);
    if (r.status == qsw::RunStatus::blowup) {
        std::cerr << "blowup: " << r.message << '\n';
        return exit_blowup;
    }
    std::cerr << "completed " << r.steps << " steps in " << r.wall_seconds << " s\n";
    return exit_pass;
}

int cmd_verify(const qsw::RunConfig& c) {
    const auto report = qsw::verify_suite(c.suite, c);
    bool blowup = false;
    for (const auto& ch : report.checks) {
        std::printf("%s  %-12s %-36s %.4e %s %.3e\n", ch.pass ? "PASS" : "FAIL", ch.suite.c_str(), ch.name.c_str(),
                    ch.value, ch.relation.c_str(), ch.threshold);
        if (ch.name == "no_blowup" && !ch.pass) blowup = true;
    }
    write_json(std::filesystem::path(c.out_dir) / "verify.json", qsw::to_json(report));
    if (blowup) return exit_blowup;
    return report.pass() ? exit_pass : exit_fail;
}

int cmd_fit(const qsw::RunConfig& c, const std::string& series) {
    const std::filesystem::path path =
        series.empty() ? std::filesystem::path(c.out_dir) / "series.csv" : std::filesystem::path(series);
    const auto rows = qsw::read_csv(path);
    nlohmann::json out = nlohmann::json::array();
    bool pass = true;
    for (const auto& rep : qsw::decay_reports(rows, c.grid, c.diagnostics)) {
        out.push_back(qsw::to_json(rep));
        pass = pass && rep.pass;
    }
    std::cout << out.dump(2) << '\n';
    return pass ? exit_pass : exit_fail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-solution shallow-water harness"};
    app.require_subcommand(1);
    Overrides o;
    std::string series;
    auto* run = app.add_subcommand("run", "Run a simulation and write series.csv and summary.json");
    auto* verify = app.add_subcommand("verify", "Run verification suites and write verify.json");
    auto* fit = app.add_subcommand("fit", "Fit decay exponents of a recorded series");
    for (auto* cmd : {run, verify, fit}) add_common(cmd, o);
    fit->add_option("series", series, "series.csv (default: <out>/series.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        const auto c = resolve(o);
        if (run->parsed()) return cmd_run(c);
        if (verify->parsed()) return cmd_verify(c);
        return cmd_fit(c, series);
    } catch (const qsw::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_fail;
    }
}
