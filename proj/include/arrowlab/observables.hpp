#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "arrowlab/event_engine.hpp"

namespace arrowlab {

/// Occupancy macrostate of a spatial (or velocity) grid; the W in S = ln W.
struct OccupancyGrid {
    int cells_x = 1;
    int cells_y = 1;
    std::vector<long> counts;  // row-major, counts[y * cells_x + x]
    long total = 0;
};

/// Bins disk centers onto a cells_x x cells_y grid over the table. Centers
/// exactly on a gridline count toward the lower-index cell.
OccupancyGrid coarse_grain(const SimState& state, int cells_x, int cells_y);

/// S = ln(N! / prod n_i!) by exact log-factorial summation, k == 1.
/// Zero when every particle shares one cell, maximal for balanced counts.
double boltzmann_entropy(const OccupancyGrid& grid);

/// Same ln W applied to a velocity-space histogram on [-vmax, vmax]^2.
/// vmax <= 0 selects the smallest symmetric range covering the state.
double velocity_entropy(const SimState& state, int bins_per_axis, double vmax = 0.0);

/// Coefficient of variation (population std / mean) of per-disk kinetic
/// energies; 0 at perfect equipartition, sqrt(N-1) when one disk has it all.
double equipartition_index(const SimState& state);

struct PhaseDistance {
    double pos_rms = 0.0;
    double vel_rms = 0.0;
};

/// RMS position and velocity distances between two states of identical disk
/// count and ordering.
PhaseDistance phase_distance(const SimState& a, const SimState& b);

struct TraceSample {
    double time = 0.0;
    double s_pos = 0.0;
    double s_vel = 0.0;
    double cv = 0.0;
    std::optional<PhaseDistance> dist_to_reference;
};

struct EntropyTrace {
    std::vector<TraceSample> samples;
};

struct DivergenceFit {
    bool defined = false;       // false: exact echo everywhere, rate undefined
    double rate = 0.0;          // least-squares slope of ln(distance) vs parameter
    double intercept = 0.0;
    double rate_stderr = 0.0;
    double rate_lower95 = 0.0;  // one-sided 95% lower confidence bound
    int points_used = 0;
};

/// Finite-time Lyapunov-style rate from (parameter, distance) samples.
/// Zero-distance samples (exact echoes) are excluded; if none remain the fit
/// is flagged undefined.
DivergenceFit divergence_rate(const std::vector<std::pair<double, double>>& samples);

}  // namespace arrowlab
