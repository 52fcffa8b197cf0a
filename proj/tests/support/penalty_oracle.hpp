#pragma once

// Brute-force reference integrator for the event-driven engine: steep quartic
// penalty force (C2-smooth at the contact boundary, so fixed-step velocity
// Verlet keeps its order through contact) at a fixed small timestep.
//
// Error model, for picking parameters: a soft collision at relative normal
// speed u and turnaround depth d* = (2 u^2 / kappa)^(1/4) lags the hard
// collision by ~2.6 d* of path, and the d* must be budgeted against the
// number of collisions in the scenario. Comparisons are only meaningful on
// non-chaotic scenarios (collinear chains, wall bounces, single scatterings):
// chaotic amplification would blow any soft/hard difference past any
// tolerance within a handful of collisions.

#include <cmath>
#include <vector>

#include "arrowlab/event_engine.hpp"

namespace arrowlab::oracle {

struct PenaltyOracle {
    double kappa = 2e28;  // quartic stiffness: F = kappa * overlap^3
    double dt = 1e-8;

    void accumulate_forces(const SimState& s, std::vector<Vec2>& f) const {
        f.assign(s.disks.size(), Vec2{});
        for (std::size_t i = 0; i < s.disks.size(); ++i) {
            for (std::size_t j = i + 1; j < s.disks.size(); ++j) {
                const Disk& a = s.disks[i];
                const Disk& b = s.disks[j];
                const Vec2 dx = a.position - b.position;
                const double sep = a.radius + b.radius;
                const double dist_sq = norm_sq(dx);
                if (dist_sq >= sep * sep || dist_sq == 0.0) continue;  // contact is rare
                const double dist = std::sqrt(dist_sq);
                const double overlap = sep - dist;
                const Vec2 push = dx * (kappa * overlap * overlap * overlap / dist);
                f[i] += push;
                f[j] -= push;
            }
            const Disk& d = s.disks[i];
            const auto wall = [&](double depth, Vec2 inward) {
                if (depth > 0.0) f[i] += inward * (kappa * depth * depth * depth);
            };
            wall(d.radius - d.position.x, {1.0, 0.0});
            wall(d.position.x - (s.table.width - d.radius), {-1.0, 0.0});
            wall(d.radius - d.position.y, {0.0, 1.0});
            wall(d.position.y - (s.table.height - d.radius), {0.0, -1.0});
        }
    }

    SimState run(SimState s, double duration) const {
        const long steps = std::lround(duration / dt);
        const double h = duration / static_cast<double>(steps);
        std::vector<Vec2> f, f_new;
        accumulate_forces(s, f);
        for (long n = 0; n < steps; ++n) {
            for (std::size_t i = 0; i < s.disks.size(); ++i) {
                Disk& d = s.disks[i];
                d.velocity += f[i] * (0.5 * h / d.mass);
                d.position += d.velocity * h;
            }
            accumulate_forces(s, f_new);
            for (std::size_t i = 0; i < s.disks.size(); ++i)
                s.disks[i].velocity += f_new[i] * (0.5 * h / s.disks[i].mass);
            f.swap(f_new);
        }
        s.time += duration;
        return s;
    }
};

}  // namespace arrowlab::oracle
