// arrowlab command line: run scenarios, arrow-experiment pairs, echo sweeps,
// white-hole attempts, and re-render stored trajectories.
//
// Exit codes: 0 success, 1 scenario assertion failed, 2 usage/config error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "arrowlab/config_io.hpp"
#include "arrowlab/svg.hpp"

namespace fs = std::filesystem;
using namespace arrowlab;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

fs::path resolve_out_dir(const std::string& out_dir_flag) {
    if (!out_dir_flag.empty()) return out_dir_flag;
    if (const char* env = std::getenv("ARROWLAB_OUT_DIR")) return env;
    return ".";
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

ScenarioConfig load_config(const CommonOpts& opts) {
    ScenarioConfig cfg = parse_config(read_file(opts.config_path));
    if (opts.seed_set) {
        cfg.seed = opts.seed;
        cfg = cfg.with_defaults();
        cfg.validate();
    }
    return cfg;
}

/// Artifact basename: <command>_<config-hash>_<seed>; every file names the
/// config hash and the seed that produced it.
std::string artifact_base(const char* command, const ScenarioConfig& cfg) {
    std::ostringstream os;
    os << command << "_" << config_hash_hex(cfg) << "_" << cfg.seed;
    return os.str();
}

void write_report_artifacts(const fs::path& dir, const std::string& base,
                            const ScenarioReport& report, const std::string& format) {
    write_file(dir / (base + ".report.json"), report_to_json(report).dump(2) + "\n");
    write_file(dir / (base + ".summary.txt"), report_summary_text(report));
    write_file(dir / (base + ".config.json"), canonical_config_text(report.config));
    if (format == "json") {
        write_file(dir / (base + ".trace.json"), trace_to_json(report.trace).dump(2) + "\n");
    } else {
        write_file(dir / (base + ".trace.csv"), write_trace_csv(report.trace));
    }
    write_file(dir / (base + ".initial.svg"), render_snapshot_svg(report.initial_state, true));
    write_file(dir / (base + ".final.svg"), render_snapshot_svg(report.final_state, true));
    if (report.trajectory) {
        write_file(dir / (base + ".trajectory.csv"), write_trajectory_csv(*report.trajectory));
        write_file(dir / (base + ".spacetime.svg"), render_spacetime_svg(*report.trajectory, 'x'));
    }
}

int cmd_run(const CommonOpts& opts) {
    const ScenarioConfig cfg = load_config(opts);
    const ScenarioReport report = run_scenario(cfg);
    const fs::path dir = resolve_out_dir(opts.out_dir);
    fs::create_directories(dir);
    const std::string base = artifact_base("run", cfg);
    write_report_artifacts(dir, base, report, opts.format);
    std::cout << report_summary_text(report);
    std::cout << "artifacts: " << (dir / base).string() << ".*\n";
    return 0;
}

int cmd_arrow(const CommonOpts& opts) {
    const ScenarioConfig cfg = load_config(opts);
    const auto [fwd, rev] = run_arrow_experiment(cfg);
    const fs::path dir = resolve_out_dir(opts.out_dir);
    fs::create_directories(dir);
    write_report_artifacts(dir, artifact_base("arrow_forward", fwd.config), fwd, opts.format);
    write_report_artifacts(dir, artifact_base("arrow_reversed", rev.config), rev, opts.format);
    std::cout << "forward arm:  verdict " << verdict_name(fwd.verdict) << "\n";
    std::cout << "reversed arm: verdict " << verdict_name(rev.verdict) << "\n";
    if (fwd.verdict != Verdict::forward || rev.verdict != Verdict::realigned) {
        std::cerr << "arrow: expected forward/realigned, got " << verdict_name(fwd.verdict) << "/"
                  << verdict_name(rev.verdict) << "\n";
        return 1;
    }
    return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& param, const std::string& values_arg) {
    const ScenarioConfig cfg = load_config(opts);
    SweepParam sp;
    if (param == "K") sp = SweepParam::reversal_depth;
    else if (param == "delta") sp = SweepParam::delta;
    else throw ConfigError("param", "must be K or delta");

    std::vector<double> values;
    std::stringstream vs(values_arg);
    std::string tok;
    while (std::getline(vs, tok, ',')) values.push_back(std::stod(tok));

    const SweepResult sweep = echo_sweep(cfg, sp, values);

    std::string csv = "param,dist_pos,dist_vel,exact\n";
    for (const SweepPoint& p : sweep.points) {
        csv += format_g17(p.value) + "," + format_g17(p.echo.pos_rms) + "," +
               format_g17(p.echo.vel_rms) + "," + (p.exact ? "1" : "0") + "\n";
    }
    nlohmann::ordered_json fit;
    fit["param"] = param;
    fit["defined"] = sweep.fit.defined;
    if (sweep.fit.defined) {
        fit["rate"] = sweep.fit.rate;
        fit["rate_stderr"] = sweep.fit.rate_stderr;
        fit["rate_lower95"] = sweep.fit.rate_lower95;
        fit["points_used"] = sweep.fit.points_used;
    } else {
        fit["note"] = "exact echo, rate undefined";
    }

    const fs::path dir = resolve_out_dir(opts.out_dir);
    fs::create_directories(dir);
    const std::string base = artifact_base("sweep", cfg);
    write_file(dir / (base + ".sweep.csv"), csv);
    write_file(dir / (base + ".fit.json"), fit.dump(2) + "\n");
    std::cout << csv;
    std::cout << (sweep.fit.defined
                      ? "divergence rate " + format_g17(sweep.fit.rate) + " (lower95 " +
                            format_g17(sweep.fit.rate_lower95) + ")"
                      : std::string("exact echo, rate undefined"))
              << "\n";
    return 0;
}

int cmd_whitehole(const CommonOpts& opts) {
    const ScenarioConfig cfg = load_config(opts);
    const WhiteHoleReport wh = run_white_hole_attempt(cfg);
    const fs::path dir = resolve_out_dir(opts.out_dir);
    fs::create_directories(dir);
    write_report_artifacts(dir, artifact_base("whitehole", wh.report.config), wh.report,
                           opts.format);
    std::cout << "min entropy fraction: " << format_g17(wh.min_entropy_fraction) << "\n";
    if (!wh.no_order_emerged) {
        std::cerr << "whitehole: entropy dropped below the configured fraction -- order emerged\n";
        return 1;
    }
    std::cout << "no ordered macrostate emerged\n";
    return 0;
}

int cmd_render(const std::string& input, const std::string& axis, const std::string& out_dir) {
    const TrajectoryTrace traj = read_trajectory_csv(read_file(input));
    const fs::path dir = resolve_out_dir(out_dir);
    fs::create_directories(dir);
    const fs::path out = dir / (fs::path(input).stem().string() + ".spacetime_" + axis + ".svg");
    write_file(out, render_spacetime_svg(traj, axis.at(0)));
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"arrowlab: reversible billiard-gas experiments"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string param = "K", values, axis = "x", render_input;

    const auto add_common = [&](CLI::App* sub, bool with_config = true) {
        if (with_config)
            sub->add_option("config", opts.config_path, "scenario config (JSON)")->required();
        sub->add_option("--out-dir", opts.out_dir, "artifact directory (or $ARROWLAB_OUT_DIR)");
        sub->add_option("--format", opts.format, "trace format: csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", opts.seed, "override the config seed")
            ->each([&](const std::string&) { opts.seed_set = true; });
    };

    add_common(app.add_subcommand("run", "run a single scenario"));
    add_common(app.add_subcommand("arrow", "run the forward/reversed annihilation pair"));
    auto* sweep = app.add_subcommand("sweep", "echo sweep over K or delta");
    add_common(sweep);
    sweep->add_option("--param", param, "swept parameter: K|delta")
        ->check(CLI::IsMember({"K", "delta"}));
    sweep->add_option("--values", values, "comma-separated parameter values")->required();
    add_common(app.add_subcommand("whitehole", "reverse a thermal state, expect no order"));
    auto* render = app.add_subcommand("render", "re-render a stored trajectory as SVG");
    render->add_option("trace", render_input, "trajectory CSV")->required();
    render->add_option("--axis", axis, "spatial axis: x|y")->check(CLI::IsMember({"x", "y"}));
    render->add_option("--out-dir", opts.out_dir, "artifact directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("run")) return cmd_run(opts);
        if (app.got_subcommand("arrow")) return cmd_arrow(opts);
        if (app.got_subcommand("sweep")) return cmd_sweep(opts, param, values);
        if (app.got_subcommand("whitehole")) return cmd_whitehole(opts);
        if (app.got_subcommand("render")) return cmd_render(render_input, axis, opts.out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
