#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "flocksim/config.hpp"
#include "flocksim/export.hpp"

namespace fs = std::filesystem;
using namespace flocksim;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string scenario;
    long seed = -1;
    std::string out = "";
    std::vector<std::string> formats;
    double t_end = -1.0;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "config file path");
    cmd->add_option("--scenario", o.scenario, "preset scenario name");
    cmd->add_option("--seed", o.seed, "RNG seed for generated initial data");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.formats, "csv and/or json")->delimiter(',');
    cmd->add_option("--t-end", o.t_end, "override the simulation horizon");
    cmd->add_flag("--quiet", o.quiet, "suppress progress output");
}

RunConfig make_run_config(const CommonOpts& o) {
    RunConfig rc;
    if (!o.config_path.empty()) rc = load_config_file(o.config_path);
    if (!o.scenario.empty()) {
        const auto& names = scenario_names();
        if (std::find(names.begin(), names.end(), o.scenario) == names.end())
            throw ValidationError("unknown scenario: " + o.scenario);
        rc.scenario = o.scenario;
    }
    if (o.seed >= 0) rc.seed = static_cast<std::uint64_t>(o.seed);
    if (!o.out.empty()) rc.out_dir = o.out;
    if (!o.formats.empty()) {
        rc.formats.clear();
        for (const auto& f : o.formats) {
            if (f == "csv")
                rc.formats.push_back(OutputFormat::Csv);
            else if (f == "json")
                rc.formats.push_back(OutputFormat::Json);
            else
                throw ValidationError("unknown format: " + f);
        }
    }
    if (!rc.scenario && !rc.params)
        throw ValidationError("nothing to run: pass --scenario or --config");
    return rc;
}

Scenario resolve_with_overrides(const RunConfig& rc, const CommonOpts& o) {
    Scenario sc = rc.resolve();
    if (o.t_end > 0.0) {
        sc.sim.t_end = o.t_end;
        if (!sc.sim.output_times.empty()) {
            // regenerate a uniform grid of the same density
            const std::size_t pts = sc.sim.output_times.size();
            sc.sim.output_times.resize(pts);
            for (std::size_t i = 0; i < pts; ++i)
                sc.sim.output_times[i] = o.t_end * i / (pts - 1);
            sc.sim.output_times.back() = o.t_end;
        }
        sc.sim.validate();
    }
    return sc;
}

void export_run(const Scenario& sc, const Trajectory& traj, const RunConfig& rc,
                const fs::path& dir, bool quiet) {
    const DiagnosticSeries diag = compute_diagnostics(traj, sc.weight);
    fs::create_directories(dir);
    for (OutputFormat f : rc.formats) {
        if (f == OutputFormat::Csv) {
            write_states_csv(traj, dir / "states.csv");
            write_diagnostics_csv(traj, diag, dir / "diagnostics.csv");
        } else {
            write_trajectory_json(traj, diag, dir / "trajectory.json");
        }
    }
    if (!quiet)
        std::cout << "wrote " << dir.string() << " (" << traj.samples.size() << " samples, "
                  << traj.events.size() << " events)\n";
}

int cmd_simulate(const CommonOpts& o) {
    const RunConfig rc = make_run_config(o);
    const Scenario sc = resolve_with_overrides(rc, o);
    const Trajectory traj = integrate(sc.initial, sc.params, sc.weight, sc.sim);
    const fs::path dir = rc.out_dir.empty() ? fs::path("out") / sc.name : rc.out_dir;
    export_run(sc, traj, rc, dir, o.quiet);
    return 0;
}

int cmd_check(const CommonOpts& o, std::vector<std::string> checks) {
    RunConfig rc = make_run_config(o);
    if (!checks.empty()) {
        rc.checks.clear();
        const auto& known = known_check_names();
        for (const auto& c : checks) {
            if (std::find(known.begin(), known.end(), c) == known.end())
                throw ValidationError("unknown check identifier: " + c);
            rc.checks.push_back(c);
        }
    }
    if (rc.checks.empty()) rc.checks = {"all"};

    const Scenario sc = resolve_with_overrides(rc, o);
    const Trajectory traj = integrate(sc.initial, sc.params, sc.weight, sc.sim);
    const CheckResults res = run_checks(sc, traj, rc.checks);

    std::cout << render_reports_text(res.conditions, res.properties);
    if (!rc.out_dir.empty()) {
        fs::create_directories(rc.out_dir);
        write_reports_json(res.conditions, res.properties, rc.out_dir / "report.json");
        export_run(sc, traj, rc, rc.out_dir, o.quiet);
    }
    return res.all_passed() ? 0 : 1;
}

int cmd_sweep(const CommonOpts& o, const std::vector<std::string>& grid_specs) {
    const RunConfig rc = make_run_config(o);
    if (grid_specs.empty()) throw ValidationError("sweep needs at least one --grid key=v1,v2");

    struct Axis {
        std::string key;
        std::vector<double> values;
    };
    std::vector<Axis> axes;
    for (const auto& spec : grid_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw ValidationError("grid spec must be key=v1,v2,... got: " + spec);
        Axis ax;
        ax.key = spec.substr(0, eq);
        static const std::vector<std::string> keys = {"p", "q", "r", "a", "b",
                                                      "beta", "coupling_scale", "seed"};
        if (std::find(keys.begin(), keys.end(), ax.key) == keys.end())
            throw ValidationError("unsupported grid key: " + ax.key);
        std::stringstream ss(spec.substr(eq + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) ax.values.push_back(std::stod(tok));
        if (ax.values.empty()) throw ValidationError("empty grid axis: " + ax.key);
        axes.push_back(std::move(ax));
    }

    long total = 1;
    for (const auto& ax : axes) total *= static_cast<long>(ax.values.size());
    const fs::path base = rc.out_dir.empty() ? fs::path("out") / "sweep" : rc.out_dir;

    std::vector<std::string> failures(total);
#pragma omp parallel for schedule(dynamic)
    for (long idx = 0; idx < total; ++idx) {
        try {
            long rem = idx;
            RunConfig point = rc;
            std::string label;
            for (const auto& ax : axes) {
                const double v = ax.values[rem % ax.values.size()];
                rem /= static_cast<long>(ax.values.size());
                label += (label.empty() ? "" : "_") + ax.key + "=" + format_double(v);
                Scenario probe = point.resolve();
                ModelParams m = point.params ? *point.params : probe.params;
                CommWeight w = point.weight ? *point.weight : probe.weight;
                if (ax.key == "p") m.p = v;
                else if (ax.key == "q") m.q = v;
                else if (ax.key == "r") m.r = v;
                else if (ax.key == "a") m.a.setConstant(v);
                else if (ax.key == "b") m.b.setConstant(v);
                else if (ax.key == "coupling_scale") m.coupling_scale = v;
                else if (ax.key == "beta") w.beta = v;
                else if (ax.key == "seed") point.seed = static_cast<std::uint64_t>(v);
                m.validate();
                w.validate();
                point.params = m;
                point.weight = w;
            }
            Scenario sc = point.resolve();
            const Trajectory traj = integrate(sc.initial, sc.params, sc.weight, sc.sim);
            export_run(sc, traj, point, base / ("point_" + label), true);
        } catch (const std::exception& e) {
            failures[idx] = e.what();
        }
    }

    int bad = 0;
    for (long idx = 0; idx < total; ++idx)
        if (!failures[idx].empty()) {
            ++bad;
            std::cerr << "point " << idx << " failed: " << failures[idx] << "\n";
        }
    if (!o.quiet) std::cout << "sweep: " << (total - bad) << "/" << total << " points ok\n";
    return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlinear flocking simulator and condition checker"};
    app.require_subcommand(1);

    CommonOpts sim_opts, check_opts, sweep_opts;
    std::vector<std::string> check_names, grid_specs;

    CLI::App* simulate = app.add_subcommand("simulate", "integrate and export a run");
    add_common(simulate, sim_opts);

    CLI::App* check = app.add_subcommand("check", "run a simulation and evaluate checks");
    add_common(check, check_opts);
    check->add_option("--checks", check_names, "check identifiers (or 'all')")->delimiter(',');

    CLI::App* sweep = app.add_subcommand("sweep", "cartesian parameter sweep");
    add_common(sweep, sweep_opts);
    sweep->add_option("--grid", grid_specs, "axis spec key=v1,v2,... (repeatable)");

    CLI::App* scenario = app.add_subcommand("scenario", "scenario utilities");
    CLI::App* list = scenario->add_subcommand("list", "print preset names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(sim_opts);
        if (check->parsed()) return cmd_check(check_opts, check_names);
        if (sweep->parsed()) return cmd_sweep(sweep_opts, grid_specs);
        if (scenario->parsed() && list->parsed()) {
            for (const auto& name : scenario_names()) std::cout << name << "\n";
            return 0;
        }
        std::cerr << "missing subcommand\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
