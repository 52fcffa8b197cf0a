#include "arrowlab/bitrev_engine.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace arrowlab {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i128 = __int128;

/// 256-bit unsigned integer; enough headroom for (k*w*sigma)^2 * S at the
/// validated parameter bounds.
struct U256 {
    u64 limb[4] = {0, 0, 0, 0};  // little-endian

    friend bool operator<(const U256& a, const U256& b) {
        for (int i = 3; i >= 0; --i)
            if (a.limb[i] != b.limb[i]) return a.limb[i] < b.limb[i];
        return false;
    }
    friend bool operator<=(const U256& a, const U256& b) { return !(b < a); }
};

U256 mul_u128(u128 a, u128 b) {
    const u64 a0 = static_cast<u64>(a), a1 = static_cast<u64>(a >> 64);
    const u64 b0 = static_cast<u64>(b), b1 = static_cast<u64>(b >> 64);
    const u128 p00 = static_cast<u128>(a0) * b0;
    const u128 p01 = static_cast<u128>(a0) * b1;
    const u128 p10 = static_cast<u128>(a1) * b0;
    const u128 p11 = static_cast<u128>(a1) * b1;
    U256 r;
    r.limb[0] = static_cast<u64>(p00);
    const u128 c1 = (p00 >> 64) + static_cast<u64>(p01) + static_cast<u64>(p10);
    r.limb[1] = static_cast<u64>(c1);
    const u128 c2 = (c1 >> 64) + (p01 >> 64) + (p10 >> 64) + static_cast<u64>(p11);
    r.limb[2] = static_cast<u64>(c2);
    r.limb[3] = static_cast<u64>((c2 >> 64) + (p11 >> 64));
    return r;
}

U256 mul_small(const U256& a, u64 s) {
    U256 r;
    u128 carry = 0;
    for (int i = 0; i < 4; ++i) {
        const u128 v = static_cast<u128>(a.limb[i]) * s + carry;
        r.limb[i] = static_cast<u64>(v);
        carry = v >> 64;
    }
    if (carry != 0) throw std::overflow_error("bitrev force comparison overflowed 256 bits");
    return r;
}

}  // namespace

void validate_params(const BitrevParams& p) {
    const auto fail = [](const std::string& what) { throw ContractViolation("BitrevParams: " + what); };
    if (p.table_w <= 0 || p.table_h <= 0) fail("table bounds must be positive");
    if (p.table_w > (std::int64_t{1} << 40) || p.table_h > (std::int64_t{1} << 40))
        fail("table bounds limited to 2^40 quanta");
    if (p.sigma <= 0 || p.sigma > (std::int64_t{1} << 31)) fail("sigma must be in (0, 2^31]");
    if (p.k < 1 || p.k > (std::int64_t{1} << 20)) fail("k must be in [1, 2^20]");
    if (p.force_shift < 0 || p.force_shift > 40) fail("force_shift must be in [0, 40]");
    if (p.quantum_bits < 1 || p.quantum_bits > 40) fail("quantum_bits must be in [1, 40]");
}

BitrevState make_bitrev_state(const BitrevParams& params, const std::vector<IVec2>& positions,
                              const std::vector<IVec2>& velocities) {
    validate_params(params);
    if (positions.size() != velocities.size())
        throw ContractViolation("make_bitrev_state: positions/velocities size mismatch");
    BitrevState s;
    s.params = params;
    s.x_cur = positions;
    s.x_prev.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        s.x_prev[i] = {positions[i].x - velocities[i].x, positions[i].y - velocities[i].y};
    return s;
}

namespace bitrev_detail {

std::int64_t round_shift(i128 n, int shift) {
    if (n < 0) return -round_shift(-n, shift);
    if (shift == 0) return static_cast<std::int64_t>(n);
    const i128 half = i128{1} << (shift - 1);
    return static_cast<std::int64_t>((n + half) >> shift);
}

/// T = k*w*(sigma - sqrt(S)) / (sqrt(S) * 2^shift), with 0 < S < sigma^2.
/// floor(T) and the half-point are decided by the exact predicate
///   T >= q  <=>  (A*sigma)^2 >= (q*2^shift + A)^2 * S,   A = k*w,
/// evaluated in 256-bit integers; a long-double estimate seeds the search.
std::int64_t round_pair_term(std::int64_t k, std::int64_t w_abs, std::int64_t sigma,
                             u128 dist_sq, int shift) {
    if (w_abs == 0) return 0;
    if (dist_sq == 0 || dist_sq >= (u128{1} << 62))
        throw ContractViolation("round_pair_term: S out of range");
    const u64 s_small = static_cast<u64>(dist_sq);
    const u128 a = static_cast<u128>(k) * static_cast<u128>(w_abs);
    const u128 a_sigma = a * static_cast<u128>(sigma);

    const auto t_at_least = [&](u128 q) {
        const u128 x = (q << shift) + a;
        return mul_small(mul_u128(x, x), s_small) <= mul_u128(a_sigma, a_sigma);
    };

    const long double root = sqrtl(static_cast<long double>(dist_sq));
    const long double est = static_cast<long double>(a) *
                            (static_cast<long double>(sigma) - root) / root /
                            static_cast<long double>(u128{1} << shift);
    u128 m = est <= 0.0L ? 0 : static_cast<u128>(est);
    while (m > 0 && !t_at_least(m)) --m;
    while (t_at_least(m + 1)) ++m;

    // T >= m + 1/2  <=>  (2*A*sigma)^2 >= ((2m+1)*2^shift + 2A)^2 * S
    const u128 x_half = ((2 * m + 1) << shift) + 2 * a;
    const bool half_up =
        mul_small(mul_u128(x_half, x_half), s_small) <= mul_u128(2 * a_sigma, 2 * a_sigma);
    const u128 result = half_up ? m + 1 : m;
    if (result > static_cast<u128>(std::numeric_limits<std::int64_t>::max()))
        throw std::overflow_error("bitrev pair force term exceeds int64");
    return static_cast<std::int64_t>(result);
}

}  // namespace bitrev_detail

IVec2 force_at(const BitrevState& s, std::size_t i) {
    const BitrevParams& p = s.params;
    const IVec2 xi = s.x_cur[i];
    const u128 sigma_sq = static_cast<u128>(p.sigma) * static_cast<u128>(p.sigma);

    i128 fx = 0, fy = 0;
    for (std::size_t j = 0; j < s.x_cur.size(); ++j) {
        if (j == i) continue;
        const std::int64_t dx = xi.x - s.x_cur[j].x;
        const std::int64_t dy = xi.y - s.x_cur[j].y;
        const u128 dist_sq = static_cast<u128>(static_cast<i128>(dx) * dx) +
                             static_cast<u128>(static_cast<i128>(dy) * dy);
        if (dist_sq == 0 || dist_sq >= sigma_sq) continue;
        const std::int64_t mx = bitrev_detail::round_pair_term(p.k, std::abs(dx), p.sigma,
                                                               dist_sq, p.force_shift);
        const std::int64_t my = bitrev_detail::round_pair_term(p.k, std::abs(dy), p.sigma,
                                                               dist_sq, p.force_shift);
        fx += dx >= 0 ? mx : -static_cast<i128>(mx);
        fy += dy >= 0 ? my : -static_cast<i128>(my);
    }

    // Wall penalty: engages when the disk surface (radius sigma/2) crosses a
    // bound, pushing back along the wall normal.
    const std::int64_t rad = p.sigma / 2;
    const auto wall_term = [&](std::int64_t depth) -> i128 {
        if (depth <= 0) return 0;
        return bitrev_detail::round_shift(static_cast<i128>(p.k) * depth, p.force_shift);
    };
    fx += wall_term(rad - xi.x);                // left wall pushes +x
    fx -= wall_term(xi.x - (p.table_w - rad));  // right wall pushes -x
    fy += wall_term(rad - xi.y);                // bottom wall pushes +y
    fy -= wall_term(xi.y - (p.table_h - rad));  // top wall pushes -y

    constexpr i128 kMax = std::numeric_limits<std::int64_t>::max();
    if (fx > kMax || fx < -kMax || fy > kMax || fy < -kMax)
        throw std::overflow_error("force_at: accumulated force exceeds int64");
    return {static_cast<std::int64_t>(fx), static_cast<std::int64_t>(fy)};
}

void step_forward(BitrevState& s) {
    const std::size_t n = s.x_cur.size();
    std::vector<IVec2> x_next(n);
    const i128 bound = static_cast<i128>(std::max(s.params.table_w, s.params.table_h)) +
                       (i128{1} << 45);
    for (std::size_t i = 0; i < n; ++i) {
        const IVec2 f = force_at(s, i);
        const i128 nx = 2 * static_cast<i128>(s.x_cur[i].x) - s.x_prev[i].x + f.x;
        const i128 ny = 2 * static_cast<i128>(s.x_cur[i].y) - s.x_prev[i].y + f.y;
        if (nx > bound || nx < -bound || ny > bound || ny < -bound) {
            std::ostringstream os;
            os << "step_forward: disk " << i << " coordinate overflow at step " << s.step
               << " (next position " << static_cast<double>(nx) << ", " << static_cast<double>(ny)
               << " quanta)";
            throw std::overflow_error(os.str());
        }
        x_next[i] = {static_cast<std::int64_t>(nx), static_cast<std::int64_t>(ny)};
    }
    s.x_prev = std::move(s.x_cur);
    s.x_cur = std::move(x_next);
    ++s.step;
}

void reverse(BitrevState& s) { std::swap(s.x_prev, s.x_cur); }

bool bitwise_equal(const BitrevState& a, const BitrevState& b) {
    return a.x_prev == b.x_prev && a.x_cur == b.x_cur;
}

SimState to_simstate(const BitrevState& s) {
    const double scale = std::ldexp(1.0, -s.params.quantum_bits);
    SimState out;
    out.time = static_cast<double>(s.step);
    out.table.width = static_cast<double>(s.params.table_w) * scale;
    out.table.height = static_cast<double>(s.params.table_h) * scale;
    out.disks.resize(s.x_cur.size());
    for (std::size_t i = 0; i < s.x_cur.size(); ++i) {
        Disk& d = out.disks[i];
        d.id = static_cast<int>(i);
        d.position = {static_cast<double>(s.x_cur[i].x) * scale,
                      static_cast<double>(s.x_cur[i].y) * scale};
        d.velocity = {static_cast<double>(s.x_cur[i].x - s.x_prev[i].x) * scale,
                      static_cast<double>(s.x_cur[i].y - s.x_prev[i].y) * scale};
        d.radius = static_cast<double>(s.params.sigma) * 0.5 * scale;
        d.mass = 1.0;
    }
    return out;
}

double potential_energy(const BitrevState& s) {
    const BitrevParams& p = s.params;
    const double scale = std::ldexp(1.0, -p.quantum_bits);
    const double kappa = static_cast<double>(p.k) * std::ldexp(1.0, -p.force_shift);
    const double sigma = static_cast<double>(p.sigma);
    const double rad = static_cast<double>(p.sigma / 2);
    double u = 0.0;
    for (std::size_t i = 0; i < s.x_cur.size(); ++i) {
        for (std::size_t j = i + 1; j < s.x_cur.size(); ++j) {
            const double dx = static_cast<double>(s.x_cur[i].x - s.x_cur[j].x);
            const double dy = static_cast<double>(s.x_cur[i].y - s.x_cur[j].y);
            const double d = std::sqrt(dx * dx + dy * dy);
            if (d < sigma) u += 0.5 * kappa * (sigma - d) * (sigma - d);
        }
        const auto wall = [&](double depth) {
            if (depth > 0.0) u += 0.5 * kappa * depth * depth;
        };
        wall(rad - static_cast<double>(s.x_cur[i].x));
        wall(static_cast<double>(s.x_cur[i].x) - (static_cast<double>(p.table_w) - rad));
        wall(rad - static_cast<double>(s.x_cur[i].y));
        wall(static_cast<double>(s.x_cur[i].y) - (static_cast<double>(p.table_h) - rad));
    }
    return u * scale * scale;
}

}  // namespace arrowlab
