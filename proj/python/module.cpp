#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "arrowlab/config_io.hpp"
#include "arrowlab/svg.hpp"

namespace py = pybind11;
using namespace arrowlab;

namespace {

ScenarioConfig config_from_json_str(const std::string& text) { return parse_config(text); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Reversible billiard-gas laboratory: event-driven and bit-reversible "
              "engines, entropy observables, and time-arrow scenarios.";

    py::register_exception<CorruptStateError>(m, "CorruptStateError", PyExc_RuntimeError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<>())
        .def(py::init([](double x, double y) { return Vec2{x, y}; }), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("__repr__", [](Vec2 v) {
            return "Vec2(" + format_g17(v.x) + ", " + format_g17(v.y) + ")";
        });

    py::class_<Disk>(m, "Disk")
        .def(py::init<>())
        .def_readwrite("id", &Disk::id)
        .def_readwrite("position", &Disk::position)
        .def_readwrite("velocity", &Disk::velocity)
        .def_readwrite("radius", &Disk::radius)
        .def_readwrite("mass", &Disk::mass);

    py::class_<Table>(m, "Table")
        .def(py::init<>())
        .def_readwrite("width", &Table::width)
        .def_readwrite("height", &Table::height);

    py::class_<SimState>(m, "SimState")
        .def(py::init<>())
        .def_readwrite("time", &SimState::time)
        .def_readwrite("table", &SimState::table)
        .def_readwrite("disks", &SimState::disks)
        .def_readwrite("collision_count", &SimState::collision_count)
        .def_readwrite("log_events", &SimState::log_events)
        .def("kinetic_energy", &SimState::kinetic_energy)
        .def("total_momentum", &SimState::total_momentum);

    py::class_<Budget>(m, "Budget")
        .def(py::init<>())
        .def_readwrite("max_time", &Budget::max_time)
        .def_readwrite("max_collisions", &Budget::max_collisions);

    m.def("predict_pair_collision", &predict_pair_collision, py::arg("d1"), py::arg("d2"),
          py::arg("t_max"));
    m.def("predict_wall_collision",
          [](const Disk& d, const Table& t) -> py::object {
              const auto hit = predict_wall_collision(d, t);
              if (!hit) return py::none();
              return py::make_tuple(hit->first, wall_name(hit->second));
          });
    m.def("resolve_pair_collision", &resolve_pair_collision);
    m.def("advance", [](SimState& s, const Budget& b) { advance(s, b); });
    m.def("reverse_momenta", [](SimState& s) { reverse_momenta(s); });
    m.def("validate_state", &validate_state);

    py::class_<BitrevParams>(m, "BitrevParams")
        .def(py::init<>())
        .def_readwrite("table_w", &BitrevParams::table_w)
        .def_readwrite("table_h", &BitrevParams::table_h)
        .def_readwrite("sigma", &BitrevParams::sigma)
        .def_readwrite("k", &BitrevParams::k)
        .def_readwrite("force_shift", &BitrevParams::force_shift)
        .def_readwrite("quantum_bits", &BitrevParams::quantum_bits);

    py::class_<IVec2>(m, "IVec2")
        .def(py::init([](std::int64_t x, std::int64_t y) { return IVec2{x, y}; }), py::arg("x"),
             py::arg("y"))
        .def_readwrite("x", &IVec2::x)
        .def_readwrite("y", &IVec2::y);

    py::class_<BitrevState>(m, "BitrevState")
        .def(py::init<>())
        .def_readwrite("params", &BitrevState::params)
        .def_readwrite("x_prev", &BitrevState::x_prev)
        .def_readwrite("x_cur", &BitrevState::x_cur)
        .def_readwrite("step", &BitrevState::step);

    m.def("make_bitrev_state", &make_bitrev_state);
    m.def("force_at", &force_at);
    m.def("step_forward", [](BitrevState& s) { step_forward(s); });
    m.def("reverse", [](BitrevState& s) { reverse(s); });
    m.def("bitwise_equal", &bitwise_equal);
    m.def("to_simstate", &to_simstate);
    m.def("potential_energy", &potential_energy);

    py::class_<OccupancyGrid>(m, "OccupancyGrid")
        .def_readonly("cells_x", &OccupancyGrid::cells_x)
        .def_readonly("cells_y", &OccupancyGrid::cells_y)
        .def_readonly("counts", &OccupancyGrid::counts)
        .def_readonly("total", &OccupancyGrid::total);

    py::class_<PhaseDistance>(m, "PhaseDistance")
        .def_readonly("pos_rms", &PhaseDistance::pos_rms)
        .def_readonly("vel_rms", &PhaseDistance::vel_rms);

    m.def("coarse_grain", &coarse_grain);
    m.def("boltzmann_entropy", &boltzmann_entropy);
    m.def("velocity_entropy", &velocity_entropy, py::arg("state"), py::arg("bins_per_axis"),
          py::arg("vmax") = 0.0);
    m.def("equipartition_index", &equipartition_index);
    m.def("phase_distance", &phase_distance);

    py::enum_<Verdict>(m, "Verdict")
        .value("forward", Verdict::forward)
        .value("reversed", Verdict::reversed)
        .value("realigned", Verdict::realigned);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_static("from_json", &config_from_json_str, py::arg("text"))
        .def("to_json", [](const ScenarioConfig& c) { return canonical_config_text(c); })
        .def_readwrite("seed", &ScenarioConfig::seed)
        .def_readwrite("n_disks", &ScenarioConfig::n_disks)
        .def_readwrite("run_length", &ScenarioConfig::run_length);

    py::class_<EchoResult>(m, "EchoResult")
        .def_readonly("distance", &EchoResult::distance)
        .def_readonly("exact", &EchoResult::exact);

    py::class_<ScenarioReport>(m, "ScenarioReport")
        .def_readonly("verdict", &ScenarioReport::verdict)
        .def_readonly("final_entropy", &ScenarioReport::final_entropy)
        .def_readonly("equilibrium_entropy", &ScenarioReport::equilibrium_entropy)
        .def_readonly("min_entropy", &ScenarioReport::min_entropy)
        .def_readonly("echo", &ScenarioReport::echo)
        .def_readonly("initial_state", &ScenarioReport::initial_state)
        .def_readonly("final_state", &ScenarioReport::final_state)
        .def("to_json", [](const ScenarioReport& r) { return report_to_json(r).dump(2); });

    m.def("build_initial_event", &build_initial_event);
    m.def("build_initial_bitrev", &build_initial_bitrev);
    m.def("run_scenario", &run_scenario);
    m.def("run_arrow_experiment", &run_arrow_experiment);
    m.def("equilibrium_reference", &equilibrium_reference);
    m.def("run_scenario_json", [](const std::string& text) {
        return report_to_json(run_scenario(parse_config(text))).dump(2);
    });

    m.def("write_trace_csv", &write_trace_csv);
    m.def("render_snapshot_svg", &render_snapshot_svg, py::arg("state"),
          py::arg("velocity_arrows") = false);
}
