#include "arrowlab/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace arrowlab {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

/// A small fixed palette; disk i wears color i mod 12. Disk 0 (the incident
/// ball in cluster scenarios) is red.
const char* palette(std::size_t i) {
    static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
                                   "#17becf", "#ff7f0e", "#aec7e8", "#98df8a"};
    return colors[i % 12];
}

}  // namespace

std::string render_spacetime_svg(const TrajectoryTrace& traj, char axis) {
    if (traj.times.empty()) throw ContractViolation("render_spacetime_svg: empty trajectory");
    if (axis != 'x' && axis != 'y') throw ContractViolation("render_spacetime_svg: axis must be x or y");

    constexpr double W = 900.0, H = 520.0, M = 40.0;
    const double t0 = traj.times.front(), t1 = traj.times.back();
    const double t_span = t1 > t0 ? t1 - t0 : 1.0;
    const double c_span = axis == 'x' ? traj.table_w : traj.table_h;

    const auto sx = [&](double t) { return M + (t - t0) / t_span * (W - 2.0 * M); };
    const auto sy = [&](double c) { return H - M - c / c_span * (H - 2.0 * M); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
       << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect x=\"" << num(M) << "\" y=\"" << num(M) << "\" width=\"" << num(W - 2 * M)
       << "\" height=\"" << num(H - 2 * M) << "\" fill=\"white\" stroke=\"black\"/>\n";

    const std::size_t n = traj.positions.front().size();
    for (std::size_t d = 0; d < n; ++d) {
        os << "<polyline fill=\"none\" stroke=\"" << palette(d) << "\" stroke-width=\"1\" points=\"";
        for (std::size_t s = 0; s < traj.times.size(); ++s) {
            const double c = axis == 'x' ? traj.positions[s][d].x : traj.positions[s][d].y;
            os << num(sx(traj.times[s])) << "," << num(sy(c)) << " ";
        }
        os << "\"/>\n";
    }
    for (double m : traj.markers) {
        os << "<line x1=\"" << num(sx(m)) << "\" y1=\"" << num(M) << "\" x2=\"" << num(sx(m))
           << "\" y2=\"" << num(H - M)
           << "\" stroke=\"black\" stroke-dasharray=\"6,4\" stroke-width=\"1\"/>\n";
    }
    os << "<text x=\"" << num(W / 2) << "\" y=\"" << num(H - 8.0)
       << "\" font-size=\"14\" text-anchor=\"middle\">t</text>\n";
    os << "<text x=\"12\" y=\"" << num(H / 2) << "\" font-size=\"14\" text-anchor=\"middle\">"
       << axis << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string render_snapshot_svg(const SimState& state, bool velocity_arrows) {
    constexpr double W = 520.0, M = 10.0;
    const double scale = (W - 2.0 * M) / state.table.width;
    const double H = state.table.height * scale + 2.0 * M;

    const auto sx = [&](double x) { return M + x * scale; };
    const auto sy = [&](double y) { return H - M - y * scale; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
       << "\" height=\"" << num(H) << "\" viewBox=\"0 0 " << W << " " << num(H) << "\">\n";
    os << "<rect x=\"" << num(M) << "\" y=\"" << num(M) << "\" width=\"" << num(W - 2 * M)
       << "\" height=\"" << num(H - 2 * M) << "\" fill=\"white\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < state.disks.size(); ++i) {
        const Disk& d = state.disks[i];
        os << "<circle cx=\"" << num(sx(d.position.x)) << "\" cy=\"" << num(sy(d.position.y))
           << "\" r=\"" << num(d.radius * scale) << "\" fill=\"" << palette(i)
           << "\" fill-opacity=\"0.8\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
        if (velocity_arrows && (d.velocity.x != 0.0 || d.velocity.y != 0.0)) {
            const double speed = norm(d.velocity);
            const Vec2 tip = d.position + d.velocity * (4.0 * d.radius / speed);
            os << "<line x1=\"" << num(sx(d.position.x)) << "\" y1=\"" << num(sy(d.position.y))
               << "\" x2=\"" << num(sx(tip.x)) << "\" y2=\"" << num(sy(tip.y))
               << "\" stroke=\"black\" stroke-width=\"0.8\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace arrowlab
