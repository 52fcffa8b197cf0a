#include "arrowlab/config_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

namespace arrowlab {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
    }
}

template <typename T>
T get_or(const json& j, const char* key, const std::string& path, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(path.empty() ? key : path + "." + key, e.what());
    }
}

template <typename T>
T require(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key))
        throw ConfigError(path.empty() ? key : path + "." + key, "required field missing");
    return get_or<T>(j, key, path, T{});
}

Vec2 vec_from(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(path, "expected a [x, y] pair");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("", "config must be a JSON object");

    check_keys(j, "", {"engine", "disks", "table", "radius", "mass", "initial", "seed", "run",
                       "reverse_at", "reverse_at_collisions", "perturbation", "annihilation",
                       "grid", "velocity_bins", "thresholds", "bitrev", "log_events",
                       "record_trajectory", "equilibrium_reference"});

    ScenarioConfig cfg;

    const std::string engine = require<std::string>(j, "engine", "");
    if (engine == "event") cfg.engine = EngineKind::event;
    else if (engine == "bitrev") cfg.engine = EngineKind::bitrev;
    else throw ConfigError("engine", "must be \"event\" or \"bitrev\"");

    cfg.n_disks = require<int>(j, "disks", "");
    cfg.seed = require<std::uint64_t>(j, "seed", "");

    if (j.contains("table")) {
        const Vec2 t = vec_from(j.at("table"), "table");
        cfg.table_w = t.x;
        cfg.table_h = t.y;
    }
    cfg.radius = get_or<double>(j, "radius", "", cfg.radius);
    cfg.mass = get_or<double>(j, "mass", "", cfg.mass);

    if (j.contains("initial")) {
        const json& init = j.at("initial");
        check_keys(init, "initial", {"kind", "incident_speed", "energy", "jitter", "disks"});
        const std::string kind = get_or<std::string>(init, "kind", "initial", "ordered-cluster");
        if (kind == "ordered-cluster") cfg.initial = InitialKind::ordered_cluster;
        else if (kind == "thermal") cfg.initial = InitialKind::thermal;
        else if (kind == "explicit") cfg.initial = InitialKind::explicit_list;
        else throw ConfigError("initial.kind", "must be ordered-cluster, thermal or explicit");
        cfg.incident_speed = get_or<double>(init, "incident_speed", "initial", cfg.incident_speed);
        cfg.thermal_energy = get_or<double>(init, "energy", "initial", cfg.thermal_energy);
        cfg.init_jitter = get_or<double>(init, "jitter", "initial", cfg.init_jitter);
        if (init.contains("disks")) {
            int id = 0;
            for (const json& dj : init.at("disks")) {
                check_keys(dj, "initial.disks", {"position", "velocity", "radius", "mass"});
                Disk d;
                d.id = id++;
                d.position = vec_from(dj.at("position"), "initial.disks.position");
                d.velocity = vec_from(dj.at("velocity"), "initial.disks.velocity");
                d.radius = get_or<double>(dj, "radius", "initial.disks", 0.01);
                d.mass = get_or<double>(dj, "mass", "initial.disks", 1.0);
                cfg.explicit_disks.push_back(d);
            }
        }
    }

    if (j.contains("run")) {
        const json& run = j.at("run");
        check_keys(run, "run", {"length", "sampling_interval"});
        cfg.run_length = get_or<double>(run, "length", "run", cfg.run_length);
        cfg.sampling_interval = get_or<double>(run, "sampling_interval", "run", cfg.sampling_interval);
    }

    if (j.contains("reverse_at")) cfg.reverse_at = j.at("reverse_at").get<double>();
    if (j.contains("reverse_at_collisions"))
        cfg.reverse_at_collisions = j.at("reverse_at_collisions").get<long>();

    if (j.contains("perturbation") && !j.at("perturbation").is_null()) {
        const json& p = j.at("perturbation");
        check_keys(p, "perturbation", {"disk", "delta", "time"});
        Perturbation pert;
        pert.disk = require<int>(p, "disk", "perturbation");
        pert.delta = require<double>(p, "delta", "perturbation");
        pert.time = require<double>(p, "time", "perturbation");
        cfg.perturbation = pert;
    }

    if (j.contains("annihilation") && !j.at("annihilation").is_null()) {
        const json& a = j.at("annihilation");
        check_keys(a, "annihilation", {"time", "region", "seed"});
        AnnihilationEvent ev;
        ev.time = require<double>(a, "time", "annihilation");
        ev.seed = require<std::uint64_t>(a, "seed", "annihilation");
        const json& r = a.at("region");
        if (!r.is_array() || r.size() != 4)
            throw ConfigError("annihilation.region", "expected [x0, y0, x1, y1]");
        ev.x0 = r.at(0).get<double>();
        ev.y0 = r.at(1).get<double>();
        ev.x1 = r.at(2).get<double>();
        ev.y1 = r.at(3).get<double>();
        cfg.annihilation = ev;
    }

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (!g.is_array() || g.size() != 2) throw ConfigError("grid", "expected [cells_x, cells_y]");
        cfg.grid_x = g.at(0).get<int>();
        cfg.grid_y = g.at(1).get<int>();
    }
    cfg.velocity_bins = get_or<int>(j, "velocity_bins", "", cfg.velocity_bins);

    if (j.contains("thresholds")) {
        const json& t = j.at("thresholds");
        check_keys(t, "thresholds",
                   {"echo_tolerance", "reversed_entropy_frac", "realigned_entropy_frac",
                    "white_hole_entropy_frac", "equilibration_cv"});
        cfg.thresholds.echo_tolerance =
            get_or<double>(t, "echo_tolerance", "thresholds", cfg.thresholds.echo_tolerance);
        cfg.thresholds.reversed_entropy_frac = get_or<double>(
            t, "reversed_entropy_frac", "thresholds", cfg.thresholds.reversed_entropy_frac);
        cfg.thresholds.realigned_entropy_frac = get_or<double>(
            t, "realigned_entropy_frac", "thresholds", cfg.thresholds.realigned_entropy_frac);
        cfg.thresholds.white_hole_entropy_frac = get_or<double>(
            t, "white_hole_entropy_frac", "thresholds", cfg.thresholds.white_hole_entropy_frac);
        cfg.thresholds.equilibration_cv =
            get_or<double>(t, "equilibration_cv", "thresholds", cfg.thresholds.equilibration_cv);
    }

    if (j.contains("bitrev")) {
        const json& b = j.at("bitrev");
        check_keys(b, "bitrev", {"k", "force_shift", "quantum_bits"});
        cfg.bitrev.k = get_or<std::int64_t>(b, "k", "bitrev", cfg.bitrev.k);
        cfg.bitrev.force_shift = get_or<int>(b, "force_shift", "bitrev", cfg.bitrev.force_shift);
        cfg.bitrev.quantum_bits = get_or<int>(b, "quantum_bits", "bitrev", cfg.bitrev.quantum_bits);
    }

    cfg.log_events = get_or<bool>(j, "log_events", "", cfg.log_events);
    cfg.record_trajectory = get_or<bool>(j, "record_trajectory", "", cfg.record_trajectory);

    if (j.contains("equilibrium_reference")) {
        const json& e = j.at("equilibrium_reference");
        check_keys(e, "equilibrium_reference", {"runs", "run_length", "override"});
        cfg.eqref_runs = get_or<int>(e, "runs", "equilibrium_reference", cfg.eqref_runs);
        cfg.eqref_run_length =
            get_or<double>(e, "run_length", "equilibrium_reference", cfg.eqref_run_length);
        cfg.eqref_override = get_or<double>(e, "override", "equilibrium_reference", cfg.eqref_override);
    }

    ScenarioConfig resolved = cfg.with_defaults();
    resolved.validate();
    return resolved;
}

ordered_json config_to_json(const ScenarioConfig& raw) {
    const ScenarioConfig cfg = raw.with_defaults();
    ordered_json j;
    j["engine"] = engine_name(cfg.engine);
    j["disks"] = cfg.n_disks;
    j["seed"] = cfg.seed;
    j["table"] = {cfg.table_w, cfg.table_h};
    j["radius"] = cfg.radius;
    j["mass"] = cfg.mass;
    ordered_json init;
    init["kind"] = initial_name(cfg.initial);
    init["incident_speed"] = cfg.incident_speed;
    init["energy"] = cfg.thermal_energy;
    init["jitter"] = cfg.init_jitter;
    if (cfg.initial == InitialKind::explicit_list) {
        ordered_json disks = ordered_json::array();
        for (const Disk& d : cfg.explicit_disks) {
            ordered_json dj;
            dj["position"] = {d.position.x, d.position.y};
            dj["velocity"] = {d.velocity.x, d.velocity.y};
            dj["radius"] = d.radius;
            dj["mass"] = d.mass;
            disks.push_back(dj);
        }
        init["disks"] = disks;
    }
    j["initial"] = init;
    j["run"] = {{"length", cfg.run_length}, {"sampling_interval", cfg.sampling_interval}};
    if (cfg.reverse_at) j["reverse_at"] = *cfg.reverse_at;
    if (cfg.reverse_at_collisions) j["reverse_at_collisions"] = *cfg.reverse_at_collisions;
    if (cfg.perturbation) {
        j["perturbation"] = {{"disk", cfg.perturbation->disk},
                             {"delta", cfg.perturbation->delta},
                             {"time", cfg.perturbation->time}};
    }
    if (cfg.annihilation) {
        j["annihilation"] = {
            {"time", cfg.annihilation->time},
            {"region", {cfg.annihilation->x0, cfg.annihilation->y0, cfg.annihilation->x1,
                        cfg.annihilation->y1}},
            {"seed", cfg.annihilation->seed}};
    }
    j["grid"] = {cfg.grid_x, cfg.grid_y};
    j["velocity_bins"] = cfg.velocity_bins;
    j["thresholds"] = {{"echo_tolerance", cfg.echo_tolerance()},
                       {"reversed_entropy_frac", cfg.thresholds.reversed_entropy_frac},
                       {"realigned_entropy_frac", cfg.thresholds.realigned_entropy_frac},
                       {"white_hole_entropy_frac", cfg.thresholds.white_hole_entropy_frac},
                       {"equilibration_cv", cfg.thresholds.equilibration_cv}};
    if (cfg.engine == EngineKind::bitrev) {
        j["bitrev"] = {{"k", cfg.bitrev.k},
                       {"force_shift", cfg.bitrev.force_shift},
                       {"quantum_bits", cfg.bitrev.quantum_bits}};
    }
    j["log_events"] = cfg.log_events;
    j["record_trajectory"] = cfg.record_trajectory;
    j["equilibrium_reference"] = {{"runs", cfg.eqref_runs},
                                  {"run_length", cfg.eqref_run_length},
                                  {"override", cfg.eqref_override}};
    return j;
}

std::string canonical_config_text(const ScenarioConfig& cfg) {
    return config_to_json(cfg).dump(2) + "\n";
}

std::string config_hash_hex(const ScenarioConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(canonical_config_text(cfg)));
    return buf;
}

std::string write_trace_csv(const EntropyTrace& trace) {
    std::string out = "t,S_pos,S_vel,cv,dist_pos,dist_vel\n";
    for (const TraceSample& s : trace.samples) {
        out += format_g17(s.time) + "," + format_g17(s.s_pos) + "," + format_g17(s.s_vel) + "," +
               format_g17(s.cv) + ",";
        if (s.dist_to_reference) {
            out += format_g17(s.dist_to_reference->pos_rms) + "," +
                   format_g17(s.dist_to_reference->vel_rms);
        } else {
            out += ",";
        }
        out += "\n";
    }
    return out;
}

ordered_json trace_to_json(const EntropyTrace& trace) {
    ordered_json rows = ordered_json::array();
    for (const TraceSample& s : trace.samples) {
        ordered_json row;
        row["t"] = s.time;
        row["S_pos"] = s.s_pos;
        row["S_vel"] = s.s_vel;
        row["cv"] = s.cv;
        if (s.dist_to_reference) {
            row["dist_pos"] = s.dist_to_reference->pos_rms;
            row["dist_vel"] = s.dist_to_reference->vel_rms;
        }
        rows.push_back(row);
    }
    return rows;
}

std::string write_trajectory_csv(const TrajectoryTrace& traj) {
    std::string out = "# table " + format_g17(traj.table_w) + " " + format_g17(traj.table_h) + "\n";
    out += "# markers";
    for (double m : traj.markers) out += " " + format_g17(m);
    out += "\n";
    out += "t";
    const std::size_t n = traj.positions.empty() ? 0 : traj.positions.front().size();
    for (std::size_t i = 0; i < n; ++i)
        out += ",x" + std::to_string(i) + ",y" + std::to_string(i);
    out += "\n";
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        out += format_g17(traj.times[s]);
        for (const Vec2& p : traj.positions[s])
            out += "," + format_g17(p.x) + "," + format_g17(p.y);
        out += "\n";
    }
    return out;
}

TrajectoryTrace read_trajectory_csv(const std::string& text) {
    TrajectoryTrace traj;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# table", 0) == 0) {
            std::istringstream ls(line.substr(7));
            ls >> traj.table_w >> traj.table_h;
            continue;
        }
        if (line.rfind("# markers", 0) == 0) {
            std::istringstream ls(line.substr(9));
            double m;
            while (ls >> m) traj.markers.push_back(m);
            continue;
        }
        if (!header_seen) {  // column header
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(ls, cell, ',')) values.push_back(std::stod(cell));
        if (values.size() < 3 || values.size() % 2 == 0)
            throw ConfigError("trajectory", "malformed row: expected t,x0,y0,...");
        traj.times.push_back(values[0]);
        std::vector<Vec2> pos;
        for (std::size_t i = 1; i + 1 < values.size(); i += 2)
            pos.push_back({values[i], values[i + 1]});
        traj.positions.push_back(std::move(pos));
    }
    if (traj.times.empty()) throw ConfigError("trajectory", "no samples in trajectory input");
    return traj;
}

namespace {

ordered_json state_to_json(const SimState& s) {
    ordered_json j;
    j["time"] = s.time;
    j["collision_count"] = s.collision_count;
    ordered_json disks = ordered_json::array();
    for (const Disk& d : s.disks) {
        ordered_json dj;
        dj["position"] = {d.position.x, d.position.y};
        dj["velocity"] = {d.velocity.x, d.velocity.y};
        disks.push_back(dj);
    }
    j["disks"] = disks;
    return j;
}

}  // namespace

ordered_json report_to_json(const ScenarioReport& report) {
    ordered_json j;
    j["config"] = config_to_json(report.config);
    j["config_hash"] = config_hash_hex(report.config);
    j["seed"] = report.config.seed;
    j["verdict"] = verdict_name(report.verdict);
    j["entropy"] = {{"final", report.final_entropy},
                    {"equilibrium_reference", report.equilibrium_entropy},
                    {"min", report.min_entropy}};
    if (report.echo) {
        j["echo"] = {{"pos_rms", report.echo->distance.pos_rms},
                     {"vel_rms", report.echo->distance.vel_rms},
                     {"exact", report.echo->exact}};
    } else {
        j["echo"] = nullptr;
    }
    j["reversal_time"] = report.reversal_time ? ordered_json(*report.reversal_time) : ordered_json(nullptr);
    if (report.annihilation_outcome) {
        j["annihilation"] = {{"affected", report.annihilation_outcome->affected},
                             {"empty_region", report.annihilation_outcome->empty_region},
                             {"single_disk_unchanged",
                              report.annihilation_outcome->single_disk_unchanged}};
    } else {
        j["annihilation"] = nullptr;
    }
    j["events"] = {{"total_collisions", report.events.total_collisions},
                   {"pair", report.events.pair_events},
                   {"wall", report.events.wall_events}};
    j["divergence"] = report.divergence ? ordered_json(*report.divergence) : ordered_json(nullptr);

    const auto& t = report.trace.samples;
    double s_max = t.empty() ? 0.0 : t.front().s_pos;
    for (const TraceSample& s : t) s_max = std::max(s_max, s.s_pos);
    j["trace"] = {{"samples", t.size()},
                  {"s_pos_initial", t.empty() ? 0.0 : t.front().s_pos},
                  {"s_pos_final", report.final_entropy},
                  {"s_pos_min", report.min_entropy},
                  {"s_pos_max", s_max}};

    j["snapshots"]["initial"] = state_to_json(report.initial_state);
    j["snapshots"]["final"] = state_to_json(report.final_state);
    j["snapshots"]["reversal"] =
        report.reversal_state ? state_to_json(*report.reversal_state) : ordered_json(nullptr);
    return j;
}

std::string report_summary_text(const ScenarioReport& report) {
    std::ostringstream os;
    os << "scenario " << engine_name(report.config.engine) << "/"
       << initial_name(report.config.initial) << "  seed " << report.config.seed << "  config "
       << config_hash_hex(report.config) << "\n";
    os << "  verdict: " << verdict_name(report.verdict) << "\n";
    os << "  entropy: final " << format_g17(report.final_entropy) << "  equilibrium ref "
       << format_g17(report.equilibrium_entropy) << "  min " << format_g17(report.min_entropy)
       << "\n";
    if (report.echo) {
        os << "  echo: pos_rms " << format_g17(report.echo->distance.pos_rms) << "  vel_rms "
           << format_g17(report.echo->distance.vel_rms)
           << (report.echo->exact ? "  (exact)" : "") << "\n";
    }
    if (report.reversal_time) os << "  reversal at " << format_g17(*report.reversal_time) << "\n";
    if (report.annihilation_outcome) {
        os << "  annihilation: affected " << report.annihilation_outcome->affected;
        if (report.annihilation_outcome->empty_region) os << " (empty region)";
        if (report.annihilation_outcome->single_disk_unchanged) os << " (single disk, unchanged)";
        os << "\n";
    }
    os << "  collisions: " << report.events.total_collisions << "\n";
    return os.str();
}

}  // namespace arrowlab
