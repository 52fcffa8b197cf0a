#pragma once

#include <string>

#include "arrowlab/scenario.hpp"

namespace arrowlab {

/// Spacetime diagram: one polyline per disk of the chosen coordinate against
/// time, with reversal/perturbation/annihilation times as vertical markers.
/// axis is 'x' or 'y'. Deterministic text output.
std::string render_spacetime_svg(const TrajectoryTrace& traj, char axis = 'x');

/// Table snapshot: disks as circles to scale, optional velocity arrows.
std::string render_snapshot_svg(const SimState& state, bool velocity_arrows = false);

}  // namespace arrowlab
