#include <doctest.h>
#include "arrowlab/observables.hpp"

#include <cmath>

#include "arrowlab/scenario.hpp"
#include "arrowlab/stats.hpp"

using namespace arrowlab;

namespace {

ScenarioConfig small_bitrev() {
    ScenarioConfig cfg;
    cfg.engine = EngineKind::bitrev;
    cfg.n_disks = 10;
    cfg.radius = 0.03;
    cfg.run_length = 4000;
    cfg.sampling_interval = 200;
    cfg.eqref_runs = 4;
    cfg.eqref_run_length = 500;
    return cfg;
}

}  // namespace

TEST_CASE("ordered cluster: 25 resting disks in a 5x5 block plus the incident ball") {
    ScenarioConfig cfg;
    cfg.n_disks = 26;
    cfg.seed = 3;
    const SimState s = build_initial_event(cfg);
    REQUIRE(s.disks.size() == 26);

    // ball 0 moves at the configured speed, aimed at the block center
    CHECK(norm(s.disks[0].velocity) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.disks[0].velocity.x > 0.9);

    // the other 25 rest in a block of 5 distinct columns and rows
    std::vector<double> xs, ys;
    for (std::size_t i = 1; i < 26; ++i) {
        CHECK(s.disks[i].velocity.x == 0.0);
        CHECK(s.disks[i].velocity.y == 0.0);
        xs.push_back(s.disks[i].position.x);
        ys.push_back(s.disks[i].position.y);
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    CHECK(xs.back() - xs.front() == doctest::Approx(4 * 0.02 * 1.0001));
    CHECK(ys.back() - ys.front() == doctest::Approx(4 * 0.02 * 1.0001));
    // block center sits on the center of an 8x8 grid cell: one macrocell
    const double mid_x = 0.5 * (xs.front() + xs.back());
    CHECK(mid_x == doctest::Approx(0.5625).epsilon(1e-9));
    CHECK(boltzmann_entropy(coarse_grain(s, 8, 8)) ==
          doctest::Approx(std::log(26.0)).epsilon(1e-9));
}

TEST_CASE("thermal build: zero total momentum and the configured energy") {
    ScenarioConfig cfg;
    cfg.n_disks = 30;
    cfg.initial = InitialKind::thermal;
    cfg.thermal_energy = 0.7;
    cfg.seed = 11;
    const SimState s = build_initial_event(cfg);
    CHECK(norm(s.total_momentum()) < 1e-12);
    CHECK(s.kinetic_energy() == doctest::Approx(0.7).epsilon(1e-12));
    CHECK_NOTHROW(validate_state(s));
}

TEST_CASE("build determinism: same seed identical, different seeds differ") {
    ScenarioConfig cfg;
    cfg.n_disks = 12;
    cfg.initial = InitialKind::thermal;
    cfg.seed = 42;
    const SimState a = build_initial_event(cfg);
    const SimState b = build_initial_event(cfg);
    for (std::size_t i = 0; i < a.disks.size(); ++i) {
        CHECK(a.disks[i].position == b.disks[i].position);
        CHECK(a.disks[i].velocity == b.disks[i].velocity);
    }
    cfg.seed = 43;
    const SimState c = build_initial_event(cfg);
    bool same = true;
    for (std::size_t i = 0; i < a.disks.size(); ++i)
        if (!(a.disks[i].position == c.disks[i].position)) same = false;
    CHECK_FALSE(same);
}

TEST_CASE("cluster too large for the table is rejected") {
    ScenarioConfig cfg;
    cfg.n_disks = 600;
    cfg.radius = 0.04;
    CHECK_THROWS_AS((void)build_initial_event(cfg), ConfigError);
}

TEST_CASE("perturb: delta 0 is the identity, small delta moves one disk by delta") {
    ScenarioConfig cfg;
    cfg.n_disks = 8;
    cfg.initial = InitialKind::thermal;
    cfg.seed = 5;
    SimState s = build_initial_event(cfg);
    const SimState before = s;

    SplitMix64 rng(123);
    perturb(s, 2, 0.0, rng);
    for (std::size_t i = 0; i < s.disks.size(); ++i)
        CHECK(s.disks[i].position == before.disks[i].position);

    perturb(s, 2, 1e-4, rng);
    CHECK(norm(s.disks[2].position - before.disks[2].position) == doctest::Approx(1e-4));
    for (std::size_t i = 0; i < s.disks.size(); ++i)
        if (i != 2) CHECK(s.disks[i].position == before.disks[i].position);
}

TEST_CASE("perturb on bitrev moves exactly one coordinate by one quantum at tiny delta") {
    BitrevState s = build_initial_bitrev(small_bitrev());
    const BitrevState before = s;
    SplitMix64 rng(9);
    perturb(s, 4, 1e-12, rng);  // far below one quantum: clamps to 1

    int changed = 0;
    for (std::size_t i = 0; i < s.x_cur.size(); ++i) {
        if (s.x_cur[i].x != before.x_cur[i].x) {
            ++changed;
            CHECK(std::abs(s.x_cur[i].x - before.x_cur[i].x) == 1);
            CHECK(i == 4);
        }
        if (s.x_cur[i].y != before.x_cur[i].y) {
            ++changed;
            CHECK(std::abs(s.x_cur[i].y - before.x_cur[i].y) == 1);
            CHECK(i == 4);
        }
        CHECK(s.x_prev[i] == before.x_prev[i]);
    }
    CHECK(changed == 1);
}

TEST_CASE("perturb errors out when no overlap-free offset exists") {
    // Disk 0 walled in by four touching neighbors; a huge delta cannot land.
    SimState s;
    const double r = 0.05;
    s.disks.push_back({0, {0.5, 0.5}, {0, 0}, r, 1.0});
    s.disks.push_back({1, {0.5 + 2.01 * r, 0.5}, {0, 0}, r, 1.0});
    s.disks.push_back({2, {0.5 - 2.01 * r, 0.5}, {0, 0}, r, 1.0});
    s.disks.push_back({3, {0.5, 0.5 + 2.01 * r}, {0, 0}, r, 1.0});
    s.disks.push_back({4, {0.5, 0.5 - 2.01 * r}, {0, 0}, r, 1.0});
    SplitMix64 rng(1);
    CHECK_THROWS_AS(perturb(s, 0, 0.02, rng), std::runtime_error);
}

TEST_CASE("annihilation: empty region is the identity and is flagged") {
    ScenarioConfig cfg;
    cfg.n_disks = 10;
    cfg.initial = InitialKind::thermal;
    cfg.seed = 21;
    SimState s = build_initial_event(cfg);
    const SimState before = s;

    AnnihilationEvent ev;
    // a sliver of the table kept empty by construction: thermal placement
    // leaves radius clearance, so hug the exact corner
    ev.x0 = 0.0;
    ev.y0 = 0.0;
    ev.x1 = 0.005;
    ev.y1 = 0.005;
    ev.seed = 7;
    const AnnihilationOutcome out = apply_annihilation(s, ev);
    CHECK(out.empty_region);
    CHECK(out.affected == 0);
    for (std::size_t i = 0; i < s.disks.size(); ++i) {
        CHECK(s.disks[i].position == before.disks[i].position);
        CHECK(s.disks[i].velocity == before.disks[i].velocity);
    }
}

TEST_CASE("annihilation conserves count, momentum and energy (property, event engine)") {
    for (std::uint64_t trial = 0; trial < 150; ++trial) {
        ScenarioConfig cfg;
        cfg.n_disks = 20;
        cfg.initial = InitialKind::thermal;
        cfg.seed = 100 + trial;
        SimState s = build_initial_event(cfg);

        SplitMix64 region_rng(trial * 31 + 5);
        AnnihilationEvent ev;
        ev.x0 = region_rng.next_double() * 0.5;
        ev.y0 = region_rng.next_double() * 0.5;
        ev.x1 = ev.x0 + 0.2 + region_rng.next_double() * 0.4;
        ev.y1 = ev.y0 + 0.2 + region_rng.next_double() * 0.4;
        ev.seed = trial;

        const Vec2 p_before = s.total_momentum();
        const double e_before = s.kinetic_energy();
        const std::size_t n_before = s.disks.size();

        const AnnihilationOutcome out = apply_annihilation(s, ev);
        CHECK(s.disks.size() == n_before);
        CHECK(norm(s.total_momentum() - p_before) <= 1e-9);
        CHECK(std::abs(s.kinetic_energy() - e_before) / e_before <= 1e-9);
        CHECK_NOTHROW(validate_state(s));
        if (out.affected > 0) {
            // resampled disks landed inside the region
            int inside = 0;
            for (const Disk& d : s.disks)
                if (d.position.x >= ev.x0 && d.position.x <= ev.x1 && d.position.y >= ev.y0 &&
                    d.position.y <= ev.y1)
                    ++inside;
            CHECK(inside >= out.affected);
        }
    }
}

TEST_CASE("annihilation on bitrev conserves to within one quantum per disk") {
    const ScenarioConfig cfg = small_bitrev();
    for (std::uint64_t trial = 0; trial < 40; ++trial) {
        ScenarioConfig c = cfg;
        c.initial = InitialKind::thermal;
        c.seed = trial + 1;
        BitrevState s = build_initial_bitrev(c);

        const auto momentum = [](const BitrevState& st) {
            Vec2 p;
            for (std::size_t i = 0; i < st.x_cur.size(); ++i) {
                p.x += static_cast<double>(st.x_cur[i].x - st.x_prev[i].x);
                p.y += static_cast<double>(st.x_cur[i].y - st.x_prev[i].y);
            }
            return p;
        };
        const auto energy = [](const BitrevState& st) {
            double e = 0.0;
            for (std::size_t i = 0; i < st.x_cur.size(); ++i) {
                const double vx = static_cast<double>(st.x_cur[i].x - st.x_prev[i].x);
                const double vy = static_cast<double>(st.x_cur[i].y - st.x_prev[i].y);
                e += 0.5 * (vx * vx + vy * vy);
            }
            return e;
        };

        AnnihilationEvent ev;
        ev.x0 = 0.1;
        ev.y0 = 0.1;
        ev.x1 = 0.9;
        ev.y1 = 0.9;
        ev.seed = trial;

        const Vec2 p0 = momentum(s);
        const double e0 = energy(s);
        const AnnihilationOutcome out = apply_annihilation(s, ev);
        if (out.affected < 2) continue;
        const Vec2 p1 = momentum(s);
        // momentum error bounded by one quantum per resampled disk per axis
        CHECK(std::abs(p1.x - p0.x) <= static_cast<double>(out.affected));
        CHECK(std::abs(p1.y - p0.y) <= static_cast<double>(out.affected));
        // energy error ~ v_typ per disk quantization: loose but honest bound
        const double v_typ = std::sqrt(2.0 * e0 / static_cast<double>(s.x_cur.size()));
        CHECK(std::abs(energy(s) - e0) <= static_cast<double>(out.affected) * (v_typ + 1.0));
    }
}

TEST_CASE("annihilation with a single disk inside leaves it unchanged, flagged") {
    SimState s;
    s.disks.push_back({0, {0.2, 0.2}, {0.3, 0.1}, 0.01, 1.0});
    s.disks.push_back({1, {0.8, 0.8}, {-0.3, -0.1}, 0.01, 1.0});
    AnnihilationEvent ev;
    ev.x0 = 0.1;
    ev.y0 = 0.1;
    ev.x1 = 0.3;
    ev.y1 = 0.3;
    ev.seed = 1;
    const SimState before = s;
    const AnnihilationOutcome out = apply_annihilation(s, ev);
    CHECK(out.single_disk_unchanged);
    CHECK(s.disks[0].position == before.disks[0].position);
    CHECK(s.disks[0].velocity == before.disks[0].velocity);
}

TEST_CASE("run_scenario: forward cluster run disperses and reports forward") {
    ScenarioConfig cfg;
    cfg.n_disks = 26;
    cfg.seed = 1;
    cfg.run_length = 150.0;
    cfg.sampling_interval = 5.0;
    cfg.eqref_runs = 5;
    const ScenarioReport rep = run_scenario(cfg);
    CHECK(rep.verdict == Verdict::forward);
    CHECK(rep.trace.samples.front().s_pos < rep.final_entropy);
    CHECK(rep.final_entropy > 0.6 * rep.equilibrium_entropy);
    CHECK_FALSE(rep.echo.has_value());
    CHECK(rep.events.total_collisions > 100);
}

TEST_CASE("run_scenario: bitrev echo is exact and the verdict is reversed") {
    ScenarioConfig cfg = small_bitrev();
    cfg.seed = 2;
    cfg.reverse_at = 2000;
    cfg.run_length = 4000;
    const ScenarioReport rep = run_scenario(cfg);
    REQUIRE(rep.echo.has_value());
    CHECK(rep.echo->exact);
    CHECK(rep.echo->distance.pos_rms == 0.0);
    CHECK(rep.echo->distance.vel_rms == 0.0);
    CHECK(rep.verdict == Verdict::reversed);
}

TEST_CASE("run_scenario: perturbed bitrev echo fails (nonzero distance)") {
    ScenarioConfig cfg = small_bitrev();
    cfg.seed = 2;
    cfg.reverse_at = 2000;
    cfg.run_length = 4000;
    Perturbation p;
    p.disk = 0;
    p.delta = 0.0;  // clamps to one quantum
    p.time = 2000;
    p.delta = 1e-12;
    cfg.perturbation = p;
    const ScenarioReport rep = run_scenario(cfg);
    REQUIRE(rep.echo.has_value());
    CHECK_FALSE(rep.echo->exact);
    CHECK(rep.echo->distance.pos_rms > 0.0);
    CHECK(rep.verdict != Verdict::reversed);
}

TEST_CASE("reports are pure functions of the config") {
    ScenarioConfig cfg = small_bitrev();
    cfg.seed = 77;
    cfg.reverse_at = 1000;
    cfg.run_length = 2000;
    const ScenarioReport a = run_scenario(cfg);
    const ScenarioReport b = run_scenario(cfg);
    CHECK(a.final_entropy == b.final_entropy);
    CHECK(a.equilibrium_entropy == b.equilibrium_entropy);
    REQUIRE(a.echo.has_value());
    REQUIRE(b.echo.has_value());
    CHECK(a.echo->distance.pos_rms == b.echo->distance.pos_rms);
    for (std::size_t i = 0; i < a.trace.samples.size(); ++i) {
        CHECK(a.trace.samples[i].s_pos == b.trace.samples[i].s_pos);
        CHECK(a.trace.samples[i].cv == b.trace.samples[i].cv);
    }
}

TEST_CASE("echo_sweep: delta 0 gives an exact echo, duplicates are identical") {
    ScenarioConfig cfg = small_bitrev();
    cfg.seed = 4;
    cfg.reverse_at = 1500;
    cfg.run_length = 3000;
    cfg.eqref_override = 1.0;

    const std::vector<double> deltas{0.0, 1e-12, 1e-6};
    const SweepResult a = echo_sweep(cfg, SweepParam::delta, deltas);
    const SweepResult b = echo_sweep(cfg, SweepParam::delta, deltas);
    REQUIRE(a.points.size() == 3);
    CHECK(a.points[0].exact);
    CHECK(a.points[0].echo.pos_rms == 0.0);
    CHECK(a.points[1].echo.pos_rms > 0.0);
    CHECK(a.points[2].echo.pos_rms > 0.0);
    for (std::size_t i = 0; i < a.points.size(); ++i)
        CHECK(a.points[i].echo.pos_rms == b.points[i].echo.pos_rms);
}

TEST_CASE("white-hole attempt with a near-zero run length trivially keeps entropy") {
    ScenarioConfig cfg;
    cfg.engine = EngineKind::event;
    cfg.n_disks = 20;
    cfg.initial = InitialKind::thermal;
    cfg.seed = 12;
    cfg.run_length = 1.0;
    cfg.sampling_interval = 0.5;
    cfg.eqref_runs = 3;
    cfg.eqref_run_length = 5.0;
    const WhiteHoleReport wh = run_white_hole_attempt(cfg);
    CHECK(wh.min_entropy_fraction >= 0.9);
    CHECK(wh.no_order_emerged);
}

TEST_CASE("white-hole attempt rejects non-thermal initial conditions") {
    ScenarioConfig cfg;
    cfg.initial = InitialKind::ordered_cluster;
    CHECK_THROWS_AS((void)run_white_hole_attempt(cfg), ConfigError);
}

TEST_CASE("mean positional entropy is non-decreasing toward equilibration") {
    // 20-seed ensemble of cluster runs; consecutive mean-entropy samples may
    // dip only within statistical noise (2 standard errors).
    constexpr int kSeeds = 20;
    std::vector<std::vector<double>> traces;
    for (int seed = 0; seed < kSeeds; ++seed) {
        ScenarioConfig cfg;
        cfg.n_disks = 26;
        cfg.seed = 40 + static_cast<std::uint64_t>(seed);
        cfg.run_length = 120.0;
        cfg.sampling_interval = 10.0;
        cfg.eqref_override = 1.0;
        const ScenarioReport rep = run_scenario(cfg);
        std::vector<double> s_pos;
        for (const TraceSample& s : rep.trace.samples) s_pos.push_back(s.s_pos);
        traces.push_back(s_pos);
    }
    const std::size_t n_samples = traces.front().size();
    std::vector<double> mean(n_samples, 0.0), var(n_samples, 0.0);
    for (std::size_t t = 0; t < n_samples; ++t) {
        std::vector<double> column;
        for (const auto& tr : traces) column.push_back(tr[t]);
        mean[t] = stats::mean(column);
        var[t] = stats::sample_variance(column);
    }
    // equilibration point: first sample whose mean reaches the final plateau
    // (within one ensemble sd); past it only fluctuations remain
    std::size_t t_eq = n_samples - 1;
    for (std::size_t t = 0; t < n_samples; ++t) {
        if (mean[t] >= mean[n_samples - 1] - std::sqrt(var[n_samples - 1])) {
            t_eq = t;
            break;
        }
    }
    REQUIRE(t_eq >= 1);
    for (std::size_t t = 1; t <= t_eq; ++t) {
        const double se = std::sqrt((var[t] + var[t - 1]) / kSeeds);
        CHECK(mean[t] >= mean[t - 1] - 2.0 * se);
    }
}

TEST_CASE("arrow experiment: the annihilation reverses a retracing arrow (trace shape)") {
    // Reverse mid-dispersal so the retrace is visible in the entropy trace,
    // then annihilate mid-retrace: S rises to the flip, falls while the run
    // retraces, and rises again once the event destroys the correlations.
    ScenarioConfig base;
    base.engine = EngineKind::bitrev;
    base.n_disks = 26;
    base.reverse_at = 800;
    base.run_length = 4000;
    base.sampling_interval = 100;
    AnnihilationEvent ev;
    ev.time = 1200;
    ev.x0 = 0.25;
    ev.y0 = 0.25;
    ev.x1 = 0.75;
    ev.y1 = 0.75;
    base.eqref_override = 58.0;  // not under test here
    base.annihilation = ev;

    constexpr int kSeeds = 10;
    double s_flip = 0, s_before_event = 0, s_final = 0;
    double fwd_before = 0, fwd_after = 0;
    std::vector<double> fwd_before_v, fwd_after_v;
    for (int i = 0; i < kSeeds; ++i) {
        ScenarioConfig cfg = base;
        cfg.seed = 1 + static_cast<std::uint64_t>(i);
        cfg.annihilation->seed = 50 + static_cast<std::uint64_t>(i);
        const auto [fwd, rev] = run_arrow_experiment(cfg);
        const auto at = [](const ScenarioReport& r, double t) {
            for (const TraceSample& s : r.trace.samples)
                if (s.time == t) return s.s_pos;
            FAIL("missing sample");
            return 0.0;
        };
        s_flip += at(rev, 800) / kSeeds;
        s_before_event += at(rev, 1100) / kSeeds;
        s_final += rev.final_entropy / kSeeds;
        fwd_before_v.push_back(at(fwd, 1100));
        fwd_after_v.push_back(at(fwd, 1400));
        CHECK(rev.verdict == Verdict::realigned);
        CHECK(fwd.verdict == Verdict::forward);
    }
    fwd_before = stats::mean(fwd_before_v);
    fwd_after = stats::mean(fwd_after_v);

    // reversed arm: decreasing before the event, increasing after
    CHECK(s_before_event < s_flip - 1.0);
    CHECK(s_final > s_before_event + 5.0);
    // forward arm: non-decreasing across the event within noise
    const double se = std::sqrt((stats::sample_variance(fwd_before_v) +
                                 stats::sample_variance(fwd_after_v)) / kSeeds);
    CHECK(fwd_after >= fwd_before - 2.0 * se);
}

TEST_CASE("annihilation before the echo completes scrambles to the random baseline") {
    // Echo distance of annihilated reversed runs vs the no-memory null: a
    // fresh thermal state at matched energy measured against the same initial
    // cluster. The two ensembles must be statistically indistinguishable.
    ScenarioConfig base;
    base.engine = EngineKind::bitrev;
    base.n_disks = 26;
    base.reverse_at = 10000;
    base.run_length = 20000;
    base.sampling_interval = 4000;
    AnnihilationEvent ev;
    ev.time = 13000;
    ev.x0 = 0.2;
    ev.y0 = 0.2;
    ev.x1 = 0.8;
    ev.y1 = 0.8;
    base.annihilation = ev;
    base.eqref_override = 58.0;

    constexpr int kSeeds = 20;
    std::vector<double> echoes, baseline;
    for (int i = 0; i < kSeeds; ++i) {
        ScenarioConfig cfg = base;
        cfg.seed = 1 + static_cast<std::uint64_t>(i);
        cfg.annihilation->seed = 70 + static_cast<std::uint64_t>(i);
        const ScenarioReport rep = run_scenario(cfg);
        REQUIRE(rep.echo.has_value());
        echoes.push_back(rep.echo->distance.pos_rms);

        // null model: an independent thermal state at the same energy
        ScenarioConfig tcfg = cfg;
        tcfg.initial = InitialKind::thermal;
        tcfg.thermal_energy = rep.initial_state.kinetic_energy();
        tcfg.seed = 4000 + static_cast<std::uint64_t>(i);
        SimState thermal = to_simstate(build_initial_bitrev(tcfg));
        reverse_momenta(thermal);
        baseline.push_back(phase_distance(thermal, rep.initial_state).pos_rms);
    }
    const auto welch = stats::welch_t_test(echoes, baseline);
    CHECK(welch.p_value > 0.01);
    CHECK(stats::mean(echoes) > 0.5 * stats::mean(baseline));
    CHECK(stats::mean(echoes) < 2.0 * stats::mean(baseline));
}

TEST_CASE("a small forward disturbance leaves the entropy trace indistinguishable") {
    // Fig-2a reading on the float engine: delta = 1e-3 on one ball, forward
    // runs only; equilibration entropy ensembles pass a two-sample test.
    std::vector<double> plain, disturbed;
    for (int i = 0; i < 20; ++i) {
        ScenarioConfig cfg;
        cfg.engine = EngineKind::event;
        cfg.n_disks = 26;
        cfg.seed = 1 + static_cast<std::uint64_t>(i);
        cfg.run_length = 120.0;
        cfg.sampling_interval = 30.0;
        cfg.eqref_override = 1.0;
        plain.push_back(run_scenario(cfg).final_entropy);
        Perturbation p;
        p.disk = 0;  // the incident ball: block disks have no 1e-3 of clearance
        p.delta = 1e-3;
        p.time = 0.0;
        cfg.perturbation = p;
        disturbed.push_back(run_scenario(cfg).final_entropy);
    }
    const auto welch = stats::welch_t_test(plain, disturbed);
    CHECK(welch.p_value > 0.01);
}
