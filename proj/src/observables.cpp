#include "arrowlab/observables.hpp"

#include <algorithm>
#include <cmath>

#include "arrowlab/stats.hpp"

namespace arrowlab {

namespace {

/// ln(n!) by direct summation; memoized. Exact to double roundoff, no
/// Stirling truncation at the occupancies we care about (N < 10^3).
double log_factorial(long n) {
    static std::vector<double> table{0.0, 0.0};  // ln 0! = ln 1! = 0
    while (static_cast<long>(table.size()) <= n)
        table.push_back(table.back() + std::log(static_cast<double>(table.size())));
    return table[static_cast<std::size_t>(n)];
}

double entropy_of_counts(const std::vector<long>& counts, long total) {
    double s = log_factorial(total);
    for (long c : counts) s -= log_factorial(c);
    return s;
}

}  // namespace

OccupancyGrid coarse_grain(const SimState& state, int cells_x, int cells_y) {
    if (cells_x < 1 || cells_y < 1)
        throw ContractViolation("coarse_grain: grid dimensions must be >= 1");
    OccupancyGrid g;
    g.cells_x = cells_x;
    g.cells_y = cells_y;
    g.counts.assign(static_cast<std::size_t>(cells_x) * static_cast<std::size_t>(cells_y), 0);
    for (const Disk& d : state.disks) {
        if (d.position.x < 0.0 || d.position.x > state.table.width ||
            d.position.y < 0.0 || d.position.y > state.table.height)
            throw CorruptStateError("coarse_grain: disk " + std::to_string(d.id) + " outside table");
        // Gridline ties go to the lower-index cell: scale, then nudge exact
        // boundary hits down by flooring (x * cx / w) and clamping; a center
        // exactly on an interior line yields the integer itself, which we
        // decrement via the strict comparison below.
        auto cell_of = [](double pos, double extent, int cells) {
            const double scaled = pos / extent * static_cast<double>(cells);
            int c = static_cast<int>(std::floor(scaled));
            if (static_cast<double>(c) == scaled && c > 0) --c;  // boundary -> lower cell
            return std::clamp(c, 0, cells - 1);
        };
        const int cx = cell_of(d.position.x, state.table.width, cells_x);
        const int cy = cell_of(d.position.y, state.table.height, cells_y);
        ++g.counts[static_cast<std::size_t>(cy) * static_cast<std::size_t>(cells_x) +
                   static_cast<std::size_t>(cx)];
    }
    g.total = static_cast<long>(state.disks.size());
    return g;
}

double boltzmann_entropy(const OccupancyGrid& grid) {
    return entropy_of_counts(grid.counts, grid.total);
}

double velocity_entropy(const SimState& state, int bins_per_axis, double vmax) {
    if (state.disks.empty())
        throw ContractViolation("velocity_entropy: empty state");
    if (bins_per_axis < 1)
        throw ContractViolation("velocity_entropy: bins must be >= 1");
    if (vmax <= 0.0) {
        for (const Disk& d : state.disks)
            vmax = std::max({vmax, std::abs(d.velocity.x), std::abs(d.velocity.y)});
        if (vmax == 0.0) vmax = 1.0;  // all at rest: any range puts them in one bin
    }
    const int b = bins_per_axis;
    std::vector<long> counts(static_cast<std::size_t>(b) * static_cast<std::size_t>(b), 0);
    auto bin_of = [&](double v) {
        const double scaled = (v + vmax) / (2.0 * vmax) * static_cast<double>(b);
        return std::clamp(static_cast<int>(std::floor(scaled)), 0, b - 1);
    };
    for (const Disk& d : state.disks)
        ++counts[static_cast<std::size_t>(bin_of(d.velocity.y)) * static_cast<std::size_t>(b) +
                 static_cast<std::size_t>(bin_of(d.velocity.x))];
    return entropy_of_counts(counts, static_cast<long>(state.disks.size()));
}

double equipartition_index(const SimState& state) {
    if (state.disks.size() < 2)
        throw ContractViolation("equipartition_index: need at least 2 disks");
    std::vector<double> energies;
    energies.reserve(state.disks.size());
    for (const Disk& d : state.disks) energies.push_back(0.5 * d.mass * norm_sq(d.velocity));
    const double mu = stats::mean(energies);
    if (mu <= 0.0)
        throw ContractViolation("equipartition_index: zero total kinetic energy");
    return std::sqrt(stats::population_variance(energies)) / mu;
}

PhaseDistance phase_distance(const SimState& a, const SimState& b) {
    if (a.disks.size() != b.disks.size())
        throw ContractViolation("phase_distance: disk counts differ");
    if (a.disks.empty()) return {};
    double dp = 0.0, dv = 0.0;
    for (std::size_t i = 0; i < a.disks.size(); ++i) {
        dp += norm_sq(a.disks[i].position - b.disks[i].position);
        dv += norm_sq(a.disks[i].velocity - b.disks[i].velocity);
    }
    const double n = static_cast<double>(a.disks.size());
    return {std::sqrt(dp / n), std::sqrt(dv / n)};
}

DivergenceFit divergence_rate(const std::vector<std::pair<double, double>>& samples) {
    std::vector<double> xs, ys;
    for (const auto& [k, dist] : samples) {
        if (dist > 0.0) {
            xs.push_back(k);
            ys.push_back(std::log(dist));
        }
    }
    DivergenceFit fit;
    fit.points_used = static_cast<int>(xs.size());
    if (xs.size() < 3) return fit;  // all-zero (or near-empty): exact echo, rate undefined
    const auto [x_min, x_max] = std::minmax_element(xs.begin(), xs.end());
    if (*x_min == *x_max) return fit;  // degenerate sweep, rate undefined

    const auto line = stats::linear_fit(xs, ys);
    fit.defined = true;
    fit.rate = line.slope;
    fit.intercept = line.intercept;
    fit.rate_stderr = line.slope_stderr;
    // One-sided 95% lower bound via Student t with n-2 dof.
    const double tcrit = stats::student_t_quantile(0.95, static_cast<int>(xs.size()) - 2);
    fit.rate_lower95 = line.slope - tcrit * line.slope_stderr;
    return fit;
}

}  // namespace arrowlab
