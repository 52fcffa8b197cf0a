#pragma once

#include <cstdint>
#include <vector>

#include "arrowlab/event_engine.hpp"

namespace arrowlab {

struct IVec2 {
    std::int64_t x = 0;
    std::int64_t y = 0;
    friend bool operator==(IVec2 a, IVec2 b) { return a.x == b.x && a.y == b.y; }
};

/// Fixed-point scales and force law for the integer leapfrog engine.
/// Positions are int64 quanta with 2^quantum_bits quanta per table length;
/// one leapfrog step is one time unit. The penalty stiffness is the rational
/// k / 2^force_shift, kept as an integer pair so every force evaluation is a
/// pure function of integers.
struct BitrevParams {
    std::int64_t table_w = std::int64_t{1} << 32;
    std::int64_t table_h = std::int64_t{1} << 32;
    std::int64_t sigma = (std::int64_t{1} << 32) / 50;  // interaction diameter, quanta
    std::int64_t k = 1;
    int force_shift = 5;
    int quantum_bits = 32;
};

void validate_params(const BitrevParams& params);

/// Integer configuration pair (positions at step n-1 and n). The implicit
/// velocity is x_cur - x_prev per step; reversal swaps the two frames and
/// never negates a number, so no information is ever lost to rounding.
struct BitrevState {
    BitrevParams params;
    std::vector<IVec2> x_prev;
    std::vector<IVec2> x_cur;
    std::int64_t step = 0;  // total steps taken (does not rewind on reverse)
};

/// State with given positions and per-step velocities, both in quanta.
BitrevState make_bitrev_state(const BitrevParams& params, const std::vector<IVec2>& positions,
                              const std::vector<IVec2>& velocities);

/// Total integer force on disk i as a function of x_cur only: harmonic
/// repulsion k*(sigma-d)/2^shift along the center line for every neighbor
/// closer than sigma, plus wall penalty k*depth/2^shift for surface
/// penetration. Each term is rounded half-away-from-zero exactly (256-bit
/// integer comparisons decide the floor and the half), so the result is
/// bit-identical on every platform.
IVec2 force_at(const BitrevState& s, std::size_t i);

/// x_next = 2*x_cur - x_prev + force_at(x_cur), all in exact integer
/// arithmetic; the map is exactly invertible. Throws on (unreachable at
/// default scales) integer overflow.
void step_forward(BitrevState& s);

/// Swaps x_prev and x_cur: the implicit velocities negate. Involution.
void reverse(BitrevState& s);

/// True when the configuration pairs match exactly (step counters ignored).
bool bitwise_equal(const BitrevState& a, const BitrevState& b);

/// Fixed-point -> continuous view: positions and velocities in table
/// lengths (per step), radius sigma/2, unit masses, time = step index.
SimState to_simstate(const BitrevState& s);

/// Harmonic + wall penalty potential in continuous units, for energy-drift
/// measurements (kinetic side comes from to_simstate).
double potential_energy(const BitrevState& s);

namespace bitrev_detail {
/// round-half-away-from-zero of k*|w|*(sigma-sqrt(S))/(sqrt(S)*2^shift),
/// exact. Exposed for the rational-arithmetic oracle tests.
std::int64_t round_pair_term(std::int64_t k, std::int64_t w_abs, std::int64_t sigma,
                             unsigned __int128 dist_sq, int shift);
/// round-half-away-from-zero of n / 2^shift for n >= 0.
std::int64_t round_shift(__int128 n, int shift);
}  // namespace bitrev_detail

}  // namespace arrowlab
