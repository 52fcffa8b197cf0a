#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "arrowlab/bitrev_engine.hpp"
#include "arrowlab/event_engine.hpp"
#include "arrowlab/observables.hpp"
#include "arrowlab/rng.hpp"

namespace arrowlab {

enum class EngineKind { event, bitrev };
enum class InitialKind { ordered_cluster, thermal, explicit_list };
enum class Verdict { forward, reversed, realigned };

const char* engine_name(EngineKind k);
const char* initial_name(InitialKind k);
const char* verdict_name(Verdict v);

/// Information-annihilating event: disks inside the region are replaced by a
/// thermal resample that preserves only their count, total momentum and total
/// kinetic energy (the classical stand-in for the mass/charge/angular-momentum
/// triple; angular momentum is deliberately excluded, the walled table does
/// not conserve it).
struct AnnihilationEvent {
    double time = 0.0;           // simulated time (steps for the bitrev engine)
    double x0 = 0.0, y0 = 0.0;   // region rectangle, table lengths
    double x1 = 0.0, y1 = 0.0;
    std::uint64_t seed = 0;
};

struct Perturbation {
    int disk = 0;
    double delta = 0.0;  // table lengths
    double time = 0.0;
};

struct Thresholds {
    /// Echo tolerance defaults per engine: 1e-6 table lengths (event),
    /// exactly 0 (bitrev). Negative means "engine default".
    double echo_tolerance = -1.0;
    double reversed_entropy_frac = 0.5;
    double realigned_entropy_frac = 0.9;
    double white_hole_entropy_frac = 0.9;
    double equilibration_cv = 1.5;
};

struct BitrevSettings {
    std::int64_t k = 1;
    int force_shift = 7;
    int quantum_bits = 32;
};

/// Declarative experiment description; a report is a pure function of it.
/// Negative values on the tunables mean "engine-appropriate default" and are
/// resolved by with_defaults().
struct ScenarioConfig {
    EngineKind engine = EngineKind::event;
    int n_disks = 26;
    double table_w = 1.0;
    double table_h = 1.0;
    double radius = -1.0;
    double mass = 1.0;
    InitialKind initial = InitialKind::ordered_cluster;
    double incident_speed = -1.0;    // table lengths per time unit (per step for bitrev)
    double thermal_energy = -1.0;    // total kinetic energy; default matches the cluster scenario
    double init_jitter = 1e-6;       // seeded jitter of the incident ball, table lengths
    std::vector<Disk> explicit_disks;

    std::uint64_t seed = 1;
    double run_length = -1.0;        // time units (steps for bitrev)
    double sampling_interval = -1.0;

    std::optional<double> reverse_at;            // momentum reversal time / step
    std::optional<long> reverse_at_collisions;   // event engine: reverse after K collisions
    std::optional<Perturbation> perturbation;
    std::optional<AnnihilationEvent> annihilation;

    int grid_x = 8;
    int grid_y = 8;
    int velocity_bins = 8;
    Thresholds thresholds;
    BitrevSettings bitrev;
    bool log_events = false;
    bool record_trajectory = false;

    int eqref_runs = 20;
    double eqref_run_length = -1.0;
    double eqref_override = -1.0;  // >0: skip the reference computation and use this

    ScenarioConfig with_defaults() const;
    double echo_tolerance() const;
    void validate() const;  // throws ConfigError
};

using EngineState = std::variant<SimState, BitrevState>;

/// Initial state per config: ordered-cluster (square block of resting disks
/// plus one incident ball aimed at its center), thermal (seeded non-
/// overlapping uniform positions, isotropic Gaussian velocities with zero
/// total momentum rescaled to the target energy), or an explicit list.
EngineState build_initial(const ScenarioConfig& cfg);
SimState build_initial_event(const ScenarioConfig& cfg);
BitrevState build_initial_bitrev(const ScenarioConfig& cfg);

/// Offsets one disk's position by delta along a seeded random direction
/// (event) or by max(1, round(delta * scale)) quanta on one seeded coordinate
/// (bitrev). delta = 0 is the identity.
void perturb(SimState& state, int disk, double delta, SplitMix64& rng);
void perturb(BitrevState& state, int disk, double delta, SplitMix64& rng);

struct AnnihilationOutcome {
    int affected = 0;
    bool empty_region = false;
    bool single_disk_unchanged = false;
};

AnnihilationOutcome apply_annihilation(SimState& state, const AnnihilationEvent& event);
AnnihilationOutcome apply_annihilation(BitrevState& state, const AnnihilationEvent& event);

struct EventSummary {
    long total_collisions = 0;
    long pair_events = -1;  // -1 when event logging was off
    long wall_events = -1;
    double first_time = 0.0;
    double last_time = 0.0;
};

struct TrajectoryTrace {
    std::vector<double> times;
    std::vector<std::vector<Vec2>> positions;  // positions[sample][disk]
    std::vector<double> markers;               // reversal/perturbation/annihilation times
    double table_w = 1.0;
    double table_h = 1.0;
};

struct EchoResult {
    PhaseDistance distance;
    bool exact = false;  // bitrev: configuration pair matched bitwise
};

struct ScenarioReport {
    ScenarioConfig config;  // defaults resolved
    EntropyTrace trace;
    SimState initial_state;
    std::optional<SimState> reversal_state;
    SimState final_state;
    std::optional<EchoResult> echo;
    Verdict verdict = Verdict::forward;
    double final_entropy = 0.0;
    double equilibrium_entropy = 0.0;
    double min_entropy = 0.0;  // over the trace
    std::optional<double> reversal_time;
    std::optional<AnnihilationOutcome> annihilation_outcome;
    EventSummary events;
    std::optional<TrajectoryTrace> trajectory;
    std::optional<double> divergence;  // filled by echo_sweep
};

/// Mean final positional entropy of `eqref_runs` thermal runs at matched
/// N / energy / table / grid, on fixed label-derived seeds. The scale the
/// paper's "entropy has increased" lacks.
double equilibrium_reference(const ScenarioConfig& cfg);

/// Builds, advances, applies perturbation / reversal / annihilation at their
/// configured times, samples observables, and classifies the outcome:
/// "reversed" when the run retraced to low entropy within echo tolerance,
/// "realigned" when a disturbance or annihilation inside a reversed run left
/// it at equilibrium entropy, "forward" otherwise.
ScenarioReport run_scenario(const ScenarioConfig& cfg);

/// The Fig-3 experiment: the same closed system with the same annihilation
/// event, run with a forward arrow and with a reversed one.
std::pair<ScenarioReport, ScenarioReport> run_arrow_experiment(const ScenarioConfig& cfg);

/// Reverses a thermal (information-free) state and checks that no ordered
/// macrostate emerges: positional entropy stays above the configured fraction
/// of its initial value.
struct WhiteHoleReport {
    ScenarioReport report;
    double min_entropy_fraction = 1.0;
    bool no_order_emerged = true;
};
WhiteHoleReport run_white_hole_attempt(const ScenarioConfig& cfg);

enum class SweepParam { reversal_depth, delta };

struct SweepPoint {
    double value = 0.0;
    PhaseDistance echo;
    bool exact = false;
};

struct SweepResult {
    SweepParam param = SweepParam::reversal_depth;
    std::vector<SweepPoint> points;
    DivergenceFit fit;
};

/// Repeats the echo experiment across reversal depths (collisions for the
/// event engine, steps for bitrev) or perturbation magnitudes, and fits the
/// divergence rate of ln(echo distance).
SweepResult echo_sweep(const ScenarioConfig& cfg, SweepParam param,
                       const std::vector<double>& values);

}  // namespace arrowlab
