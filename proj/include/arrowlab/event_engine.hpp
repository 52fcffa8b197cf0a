#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arrowlab/errors.hpp"
#include "arrowlab/vec2.hpp"

namespace arrowlab {

/// Contact / overlap tolerance in table lengths. A pair is "in contact" when
/// the center distance is within this of r1+r2, and "overlapping" (corrupt)
/// when it is more than this inside.
constexpr double kOverlapTolerance = 1e-9;
constexpr double kContactTolerance = 1e-9;

struct Disk {
    int id = 0;
    Vec2 position;
    Vec2 velocity;
    double radius = 0.01;
    double mass = 1.0;
};

struct Table {
    double width = 1.0;
    double height = 1.0;
};

enum class Wall : int { left = 0, right = 1, bottom = 2, top = 3 };

const char* wall_name(Wall w);

enum class EventKind : int { pair = 0, wall = 1 };

struct LoggedEvent {
    double time = 0.0;
    EventKind kind = EventKind::pair;
    int a = -1;
    int b = -1;            // second disk for pair events, -1 otherwise
    Wall wall = Wall::left;  // meaningful for wall events only
};

/// Continuous phase-space state for the event-driven engine.
struct SimState {
    double time = 0.0;
    Table table;
    std::vector<Disk> disks;
    long collision_count = 0;
    bool log_events = false;
    std::vector<LoggedEvent> event_log;

    double kinetic_energy() const;
    Vec2 total_momentum() const;
};

/// Throws CorruptStateError if any disk is outside the table (beyond
/// tolerance) or any pair overlaps beyond tolerance.
void validate_state(const SimState& state);

/// Earliest t in (0, t_max] at which the pair comes into contact with
/// approaching relative velocity, or nullopt. Uses the cancellation-free
/// quadratic root (product-of-roots form) so forward and backward
/// predictions mirror as closely as doubles allow.
/// Throws CorruptStateError if the disks already overlap beyond tolerance.
std::optional<double> predict_pair_collision(const Disk& d1, const Disk& d2, double t_max);

/// Earliest time the disk surface reaches any wall, with the wall hit.
/// nullopt for a disk at rest. Throws CorruptStateError if the disk is
/// outside the table.
std::optional<std::pair<double, Wall>> predict_wall_collision(const Disk& d, const Table& table);

/// Elastic collision of two contacting, approaching disks: normal components
/// exchange per the (unequal-mass) elastic formulas, tangential components
/// pass through. Returns the new velocity pair; throws ContractViolation for
/// a non-contacting or receding pair.
std::pair<Vec2, Vec2> resolve_pair_collision(const Disk& d1, const Disk& d2);

/// Specular wall reflection. Grazing contact (zero normal velocity) is
/// returned unchanged; a receding disk is a contract violation.
Vec2 resolve_wall_collision(const Disk& d, Wall wall);

/// Stop condition for advance(); either or both limits may be set.
struct Budget {
    std::optional<double> max_time;       // advance until state.time reaches this
    std::optional<long> max_collisions;   // ... or until this many total collisions
};

/// Event-driven advance: repeatedly pops the earliest predicted event, drifts
/// every disk ballistically to it, resolves, and re-predicts the touched
/// disks. Simultaneous events (bitwise-equal times) resolve pair before wall,
/// then by lowest participant id. If no event lies ahead, drifts to the time
/// budget (or returns, for a pure collision budget).
void advance(SimState& state, const Budget& budget);

/// Negates every velocity; positions, time and log untouched. Involution.
void reverse_momenta(SimState& state);

}  // namespace arrowlab
