#include "arrowlab/event_engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace arrowlab {

namespace {

double contact_distance(const Disk& a, const Disk& b) { return a.radius + b.radius; }

/// One entry in the event queue. Predictions carry per-disk stamps; a popped
/// event is stale (and skipped) if any participant collided since it was
/// predicted.
struct PendingEvent {
    double time;
    EventKind kind;
    int a;
    int b;     // -1 for wall events
    Wall wall;
    std::uint64_t stamp_a;
    std::uint64_t stamp_b;
};

/// Strict weak order for the min-heap. Ties in time (bitwise equal, which the
/// symmetric cluster scenarios do produce) resolve pair before wall, then by
/// lowest participant ids, keeping runs reproducible.
struct EventLater {
    bool operator()(const PendingEvent& x, const PendingEvent& y) const {
        if (x.time != y.time) return x.time > y.time;
        if (x.kind != y.kind) return static_cast<int>(x.kind) > static_cast<int>(y.kind);
        const int xlo = (x.b >= 0) ? std::min(x.a, x.b) : x.a;
        const int ylo = (y.b >= 0) ? std::min(y.a, y.b) : y.a;
        if (xlo != ylo) return xlo > ylo;
        const int xhi = (x.b >= 0) ? std::max(x.a, x.b) : static_cast<int>(x.wall);
        const int yhi = (y.b >= 0) ? std::max(y.a, y.b) : static_cast<int>(y.wall);
        return xhi > yhi;
    }
};

}  // namespace

const char* wall_name(Wall w) {
    switch (w) {
        case Wall::left: return "left";
        case Wall::right: return "right";
        case Wall::bottom: return "bottom";
        case Wall::top: return "top";
    }
    return "?";
}

double SimState::kinetic_energy() const {
    double e = 0.0;
    for (const Disk& d : disks) e += 0.5 * d.mass * norm_sq(d.velocity);
    return e;
}

Vec2 SimState::total_momentum() const {
    Vec2 p;
    for (const Disk& d : disks) p += d.mass * d.velocity;
    return p;
}

void validate_state(const SimState& state) {
    for (const Disk& d : state.disks) {
        if (!(d.radius > 0.0) || !(d.mass > 0.0))
            throw CorruptStateError("disk " + std::to_string(d.id) + ": radius and mass must be positive");
        if (!std::isfinite(d.position.x) || !std::isfinite(d.position.y) ||
            !std::isfinite(d.velocity.x) || !std::isfinite(d.velocity.y))
            throw CorruptStateError("disk " + std::to_string(d.id) + ": non-finite phase-space values");
        if (d.position.x < d.radius - kOverlapTolerance ||
            d.position.x > state.table.width - d.radius + kOverlapTolerance ||
            d.position.y < d.radius - kOverlapTolerance ||
            d.position.y > state.table.height - d.radius + kOverlapTolerance)
            throw CorruptStateError("disk " + std::to_string(d.id) + " outside table");
    }
    for (std::size_t i = 0; i < state.disks.size(); ++i) {
        for (std::size_t j = i + 1; j < state.disks.size(); ++j) {
            const Disk& a = state.disks[i];
            const Disk& b = state.disks[j];
            const double gap = norm(a.position - b.position) - contact_distance(a, b);
            if (gap < -kOverlapTolerance) {
                std::ostringstream os;
                os << "disks " << a.id << " and " << b.id << " overlap by " << -gap;
                throw CorruptStateError(os.str());
            }
        }
    }
}

std::optional<double> predict_pair_collision(const Disk& d1, const Disk& d2, double t_max) {
    const Vec2 dx = d2.position - d1.position;
    const Vec2 dv = d2.velocity - d1.velocity;
    const double sep = contact_distance(d1, d2);
    const double c = norm_sq(dx) - sep * sep;

    if (c < -2.0 * sep * kOverlapTolerance)
        throw CorruptStateError("predict_pair_collision: disks " + std::to_string(d1.id) + " and " +
                                std::to_string(d2.id) + " overlap beyond tolerance");

    const double b = dot(dx, dv);
    if (b >= 0.0) return std::nullopt;  // not approaching

    if (c <= 0.0) return 0.0;  // touching (within tolerance) and approaching

    const double a = norm_sq(dv);
    const double disc = b * b - a * c;
    if (disc < 0.0) return std::nullopt;  // closest approach misses contact; == 0 is a tangent graze

    // Smaller positive root of a t^2 + 2 b t + c = 0 in the stable
    // product-of-roots form: no cancellation since -b and sqrt(disc) are
    // both positive here.
    const double t = c / (-b + std::sqrt(disc));
    if (t > t_max) return std::nullopt;
    return t;
}

std::optional<std::pair<double, Wall>> predict_wall_collision(const Disk& d, const Table& table) {
    if (d.position.x < d.radius - kOverlapTolerance ||
        d.position.x > table.width - d.radius + kOverlapTolerance ||
        d.position.y < d.radius - kOverlapTolerance ||
        d.position.y > table.height - d.radius + kOverlapTolerance)
        throw CorruptStateError("predict_wall_collision: disk " + std::to_string(d.id) + " outside table");

    std::optional<std::pair<double, Wall>> best;
    const auto consider = [&](double gap, double v, Wall w) {
        if (v <= 0.0) return;
        const double t = std::max(gap, 0.0) / v;
        if (!best || t < best->first) best = {t, w};
    };
    consider(d.position.x - d.radius, -d.velocity.x, Wall::left);
    consider(table.width - d.radius - d.position.x, d.velocity.x, Wall::right);
    consider(d.position.y - d.radius, -d.velocity.y, Wall::bottom);
    consider(table.height - d.radius - d.position.y, d.velocity.y, Wall::top);
    return best;
}

std::pair<Vec2, Vec2> resolve_pair_collision(const Disk& d1, const Disk& d2) {
    const Vec2 dx = d2.position - d1.position;
    const double dist = norm(dx);
    const double sep = contact_distance(d1, d2);
    if (std::abs(dist - sep) > kContactTolerance)
        throw ContractViolation("resolve_pair_collision: disks not in contact (gap " +
                                std::to_string(dist - sep) + ")");
    const Vec2 n = dx / dist;
    const double approach = dot(d1.velocity - d2.velocity, n);
    if (approach < 0.0)
        throw ContractViolation("resolve_pair_collision: pair receding");
    // approach == 0 is a tangent graze: zero impulse, velocities unchanged.

    // Elastic exchange of the normal components for general masses.
    const double m1 = d1.mass, m2 = d2.mass;
    const double impulse = 2.0 * m1 * m2 / (m1 + m2) * approach;
    return {d1.velocity - (impulse / m1) * n, d2.velocity + (impulse / m2) * n};
}

Vec2 resolve_wall_collision(const Disk& d, Wall wall) {
    Vec2 v = d.velocity;
    double* normal = (wall == Wall::left || wall == Wall::right) ? &v.x : &v.y;
    const double outward = (wall == Wall::right || wall == Wall::top) ? *normal : -*normal;
    if (outward < 0.0)
        throw ContractViolation("resolve_wall_collision: disk receding from wall");
    // outward == 0 is the grazing degenerate: reflection is the identity.
    *normal = -*normal;
    return v;
}

namespace {

void drift_all(SimState& state, double dt) {
    if (dt == 0.0) return;
    for (Disk& d : state.disks) d.position += d.velocity * dt;
    state.time += dt;
}

class EventQueue {
public:
    EventQueue(const SimState& state, double horizon)
        : stamps_(state.disks.size(), 0), horizon_(horizon) {
        for (std::size_t i = 0; i < state.disks.size(); ++i) predict_for(state, static_cast<int>(i), false);
        for (std::size_t i = 0; i < state.disks.size(); ++i)
            for (std::size_t j = i + 1; j < state.disks.size(); ++j)
                predict_pair(state, static_cast<int>(i), static_cast<int>(j));
    }

    /// Recompute predictions involving disk `a` (after it was touched).
    void predict_for(const SimState& state, int a, bool pairs = true) {
        const Disk& d = state.disks[static_cast<std::size_t>(a)];
        if (auto hit = predict_wall_collision(d, state.table))
            queue_.push({state.time + hit->first, EventKind::wall, a, -1, hit->second, stamps_[static_cast<std::size_t>(a)], 0});
        if (!pairs) return;
        for (std::size_t j = 0; j < state.disks.size(); ++j)
            if (static_cast<int>(j) != a) predict_pair(state, a, static_cast<int>(j));
    }

    std::optional<PendingEvent> pop_valid() {
        while (!queue_.empty()) {
            PendingEvent ev = queue_.top();
            queue_.pop();
            if (ev.stamp_a != stamps_[static_cast<std::size_t>(ev.a)]) continue;
            if (ev.b >= 0 && ev.stamp_b != stamps_[static_cast<std::size_t>(ev.b)]) continue;
            return ev;
        }
        return std::nullopt;
    }

    void touch(int i) { ++stamps_[static_cast<std::size_t>(i)]; }

private:
    void predict_pair(const SimState& state, int i, int j) {
        const std::size_t ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
        if (auto t = predict_pair_collision(state.disks[ui], state.disks[uj], horizon_)) {
            const int lo = std::min(i, j), hi = std::max(i, j);
            queue_.push({state.time + *t, EventKind::pair, lo, hi, Wall::left,
                         stamps_[static_cast<std::size_t>(lo)], stamps_[static_cast<std::size_t>(hi)]});
        }
    }

    std::priority_queue<PendingEvent, std::vector<PendingEvent>, EventLater> queue_;
    std::vector<std::uint64_t> stamps_;
    double horizon_;
};

}  // namespace

void advance(SimState& state, const Budget& budget) {
    const double t_end = budget.max_time ? *budget.max_time : std::numeric_limits<double>::infinity();
    const long c_end = budget.max_collisions
                           ? state.collision_count + *budget.max_collisions
                           : std::numeric_limits<long>::max();
    if (t_end < state.time)
        throw ContractViolation("advance: time budget lies in the past");
    if (state.disks.empty() || (t_end <= state.time && !budget.max_collisions)) {
        if (budget.max_time) state.time = t_end;
        return;
    }

    const double horizon = std::isinf(t_end) ? std::numeric_limits<double>::infinity()
                                             : (t_end - state.time) * (1.0 + 1e-12) + 1e-300;
    EventQueue queue(state, horizon);

    while (state.collision_count < c_end) {
        const auto ev = queue.pop_valid();
        if (!ev || ev->time > t_end) {
            // Event starvation within the horizon: ballistic drift to the
            // time budget; a pure collision budget simply stops here.
            if (budget.max_time) drift_all(state, t_end - state.time);
            return;
        }

        drift_all(state, ev->time - state.time);

        if (ev->kind == EventKind::pair) {
            Disk& a = state.disks[static_cast<std::size_t>(ev->a)];
            Disk& b = state.disks[static_cast<std::size_t>(ev->b)];
            auto [va, vb] = resolve_pair_collision(a, b);
            a.velocity = va;
            b.velocity = vb;
            queue.touch(ev->a);
            queue.touch(ev->b);
            queue.predict_for(state, ev->a);
            queue.predict_for(state, ev->b);
            if (state.log_events)
                state.event_log.push_back({state.time, EventKind::pair, a.id, b.id, Wall::left});
        } else {
            Disk& a = state.disks[static_cast<std::size_t>(ev->a)];
            a.velocity = resolve_wall_collision(a, ev->wall);
            queue.touch(ev->a);
            queue.predict_for(state, ev->a);
            if (state.log_events)
                state.event_log.push_back({state.time, EventKind::wall, a.id, -1, ev->wall});
        }
        ++state.collision_count;
    }
    // Collision budget exhausted; leave time at the last event.
}

void reverse_momenta(SimState& state) {
    for (Disk& d : state.disks) d.velocity = -d.velocity;
}

}  // namespace arrowlab
