#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <map>

#include "oracles.hpp"

using namespace geotime;
using Catch::Approx;

namespace {

/// Synthetic flat-disk dataset built directly from the euclidean distance
/// formula (bypasses the shooting generator; used where the test wants full
/// control over the source list).
TravelTimeDataset synthetic_disk_rows(const std::vector<Vec2>& sources, int m,
                                      double gamma_frac = 0.6) {
    DomainSpec disk = oracles::unit_disk(gamma_frac);
    SensorArray sensors = make_sensors(disk, m);
    TravelTimeDataset ds;
    ds.m = m;
    ds.N = long(sources.size());
    ds.sensor_u = sensors.u;
    ds.h_src = 0.1;
    ds.collar_depth = 0.05;
    ds.oracle_tol = 1e-12;
    ds.times.assign(std::size_t(ds.N) * m, 0.0);
    for (long i = 0; i < ds.N; ++i)
        for (int j = 0; j < m; ++j)
            ds.at(i, j) = norm(sources[std::size_t(i)] - sensors.pos[std::size_t(j)]);
    return ds;
}

}  // namespace

TEST_CASE("gamma metric recovery") {
    SECTION("flat disk: constant speed, 1 percent arc accuracy") {
        const auto& d = oracles::disk_dataset();
        GammaGeometry gg = recover_gamma_metric(d.gen.ds, oracles::disk_recon_options());
        double Lg = d.domain.gamma_b - d.domain.gamma_a;
        for (int j = 0; j < d.gen.ds.m; ++j) CHECK(gg.lambda[j] == Approx(Lg).epsilon(0.01));
        for (int j = 0; j + 5 < d.gen.ds.m; j += 4) {
            double truth = Lg * (gg.u[j + 5] - gg.u[j]);
            CHECK(gg.arc_between(j, j + 5) == Approx(truth).epsilon(0.01));
        }
    }
    SECTION("bump far from the arc: matches the conformal factor along gamma") {
        MetricSpec spec = oracles::bump_spec(-0.45, -0.35, 0.25, 0.3);
        DomainSpec disk = oracles::unit_disk(0.25);
        SensorArray sensors = make_sensors(disk, 32);
        SourcePlan plan;
        plan.h_src = 0.1;
        plan.collar_depth = 0.05;
        plan.collar_spacing = 0.05;
        OracleOptions oracle;
        oracle.multistart = 16;
        oracle.threads = default_thread_count();
        GeneratedData gen = generate_dataset(spec, disk, plan, sensors, oracle);
        GammaGeometry gg = recover_gamma_metric(gen.ds, oracles::disk_recon_options());
        double Lg = disk.gamma_b - disk.gamma_a;
        for (int j = 2; j + 2 < gen.ds.m; j += 3) {
            double phi = spec.phi_jet(sensors.pos[std::size_t(j)]).phi;
            CHECK(gg.lambda[j] == Approx(std::exp(phi) * Lg).epsilon(0.01));
        }
    }
    SECTION("reparametrization changes lambda but not recovered arc length") {
        const auto& d = oracles::disk_dataset();
        ReconOptions ro = oracles::disk_recon_options();
        GammaGeometry gg_uniform = recover_gamma_metric(d.gen.ds, ro);
        TravelTimeDataset warped = d.gen.ds;
        // smooth strictly increasing relabeling of the same physical sensors
        for (int j = 0; j < warped.m; ++j) {
            double u = warped.sensor_u[std::size_t(j)];
            warped.sensor_u[std::size_t(j)] = u + 0.12 * std::sin(std::numbers::pi * u);
        }
        GammaGeometry gg_warped = recover_gamma_metric(warped, ro);
        CHECK(std::abs(gg_warped.lambda[warped.m / 2] - gg_uniform.lambda[warped.m / 2]) > 0.05);
        for (int j = 2; j + 9 < warped.m; j += 5)
            CHECK(gg_warped.arc_between(j, j + 9) ==
                  Approx(gg_uniform.arc_between(j, j + 9)).epsilon(0.01));
    }
    SECTION("too few boundary-trace rows is an error naming the deficit") {
        auto g = oracles::rng(99);
        std::vector<Vec2> srcs;
        for (int k = 0; k < 60; ++k) srcs.push_back(oracles::random_in_disk(g, 0.8));
        TravelTimeDataset ds = synthetic_disk_rows(srcs, 16);
        CHECK_THROWS_AS(recover_gamma_metric(ds, {}), pipeline_error);
    }
}

TEST_CASE("boundary gradients") {
    const auto& d = oracles::disk_dataset();
    ReconOptions ro = oracles::disk_recon_options();
    GammaGeometry gg = recover_gamma_metric(d.gen.ds, ro);

    SECTION("source on the inward normal ray of a sensor sees zero gradient") {
        int j = d.gen.ds.m / 2;
        Vec2 z = d.sensors.pos[std::size_t(j)];
        std::vector<Vec2> srcs = {z * 0.5, z * 0.2};
        TravelTimeDataset ds = synthetic_disk_rows(srcs, d.gen.ds.m);
        GradientTable gt = boundary_gradients(ds, gg, ro);
        CHECK(std::abs(gt.v(0, j)) < 5e-3);
        CHECK(std::abs(gt.v(1, j)) < 5e-3);
        CHECK(gt.ok(1, j));
    }
    SECTION("tangential approach drives |v| monotonically toward 1") {
        // offsets resolvable by the sensor stencil (two spacings or more)
        int j = d.gen.ds.m / 2;
        double sz = d.sensors.s[std::size_t(j)];
        std::vector<Vec2> srcs;
        DomainSpec disk = oracles::unit_disk(0.6);
        for (double off : {0.3, 0.5, 0.8, 1.2})
            srcs.push_back(disk.curve.point_at_s(sz + off) * 0.97);
        TravelTimeDataset ds = synthetic_disk_rows(srcs, d.gen.ds.m);
        GradientTable gt = boundary_gradients(ds, gg, ro);
        double prev = 1.0;
        for (long i = 0; i < ds.N; ++i) {
            double v = std::abs(gt.v(i, j));
            CHECK(v < prev);
            prev = v;
        }
        CHECK(std::abs(gt.v(0, j)) > 0.9);
    }
    SECTION("central stencil requires an interior sensor") {
        GradientTable gt = boundary_gradients(d.gen.ds, gg, ro);
        CHECK_FALSE(gt.ok(0, 0));
        CHECK_FALSE(gt.ok(0, d.gen.ds.m - 1));
    }
    SECTION("lens: a cut crossing the arc is flagged non-smooth, locally") {
        MetricSpec lens = oracles::lens_spec();
        DomainSpec disk = oracles::unit_disk(0.6);
        SensorArray sensors = make_sensors(disk, 32);
        // source behind the lens relative to gamma's middle: its cut curve
        // crosses the measurement arc
        Vec2 zmid = sensors.pos[16];
        Vec2 p = zmid * -0.82;
        SourcePlan plan;
        plan.h_src = 0.1;
        plan.collar_depth = 0.05;
        plan.collar_spacing = 0.05;
        plan.extra.push_back(p);
        OracleOptions oracle;
        oracle.multistart = 48;  // ties near the cut need the dense fan
        oracle.threads = default_thread_count();
        GeneratedData gen = generate_dataset(lens, disk, plan, sensors, oracle);
        GammaGeometry gg2 = recover_gamma_metric(gen.ds, ro);
        GradientTable gt = boundary_gradients(gen.ds, gg2, ro);
        long row = gen.ds.N - 1;  // the extra source is appended after the lattice
        REQUIRE(gen.truth.kind[std::size_t(row)] == int(SourceKind::extra));
        std::vector<int> bad;
        for (int j = 1; j + 1 < gen.ds.m; ++j)
            if (!gt.ok(row, j)) bad.push_back(j);
        REQUIRE_FALSE(bad.empty());
        CHECK(bad.size() <= 8);  // localized around the cut trace
        // the flagged sensor really sees two minimizing connections
        int jbad = bad[bad.size() / 2];
        ShootOptions so;
        so.multistart = 64;
        so.length_tol = 2e-3;
        BvpResult r = distance_shooting(lens, disk, p, sensors.pos[std::size_t(jbad)], so);
        CHECK(r.minimizers.size() >= 2);
    }
}

TEST_CASE("ray sets on the flat disk") {
    const auto& d = oracles::disk_dataset();
    ReconOptions ro = oracles::disk_recon_options();
    const auto& rm = oracles::disk_reconstruction();

    SECTION("normal direction: members on the chord, t_sup near the chord length") {
        int j = d.gen.ds.m / 2;
        RaySet rs = build_ray_set(d.gen.ds, rm.gg, rm.grads, j, 0.0, ro);
        REQUIRE_FALSE(rs.thin);
        CHECK(rs.t_sup == Approx(2.0).margin(ro.tol_T_eff(d.gen.ds)));
        Vec2 z = d.sensors.pos[std::size_t(j)];
        for (long i : rs.members) {
            if (i == rm.gg.gamma_row[j]) continue;
            Vec2 p = d.gen.truth.source[std::size_t(i)];
            // perpendicular distance to the diameter through z
            double off = std::abs(cross(Vec2{0, 0} - z, p - z)) / norm(z);
            CHECK(off < 0.35);  // member window around the chord
        }
    }
    SECTION("t_sup tracks the chord length over the direction grid") {
        int j = d.gen.ds.m / 2;
        for (double v : {-0.6, -0.3, 0.0, 0.3, 0.6}) {
            RaySet rs = build_ray_set(d.gen.ds, rm.gg, rm.grads, j, v, ro);
            if (rs.thin) continue;
            double chord = 2.0 * std::sqrt(1.0 - v * v);
            CHECK(rs.t_sup == Approx(chord).margin(ro.tol_T_eff(d.gen.ds)));
        }
    }
}

TEST_CASE("boundary classification on the flat disk") {
    const auto& d = oracles::disk_dataset();
    const auto& rm = oracles::disk_reconstruction();
    const auto& truth = d.gen.truth;

    long fp = 0, fn = 0;
    for (long i = 0; i < d.gen.ds.N; ++i) {
        bool truth_b = truth.depth[std::size_t(i)] <= 1e-9;
        bool rec_b = rm.sources[std::size_t(i)].boundary;
        if (rec_b && !truth_b) ++fp;
        if (!rec_b && truth_b) ++fn;
    }
    CHECK(fp == 0);
    CHECK(fn == 0);

    SECTION("the off-arc boundary fixture is caught by the jump rule, not the trace rule") {
        long id = -1;
        for (long i = 0; i < d.gen.ds.N; ++i)
            if (truth.kind[std::size_t(i)] == int(SourceKind::extra)) id = i;
        REQUIRE(id >= 0);
        CHECK(rm.sources[std::size_t(id)].boundary);
        CHECK_FALSE(rm.sources[std::size_t(id)].via_trace);
        CHECK(rm.sources[std::size_t(id)].boundary_jump > 0.0);
    }
}

TEST_CASE("charts") {
    const auto& d = oracles::disk_dataset();
    const auto& rm = oracles::disk_reconstruction();
    ReconOptions ro = oracles::disk_recon_options();

    SECTION("interior chart equals the euclidean oracle (v, r)") {
        for (long i = 0; i < d.gen.ds.N; i += 23) {
            const SourceRecon& sr = rm.sources[std::size_t(i)];
            if (sr.boundary || sr.chart.sensor < 0) continue;
            Vec2 p = d.gen.truth.source[std::size_t(i)];
            int j0 = sr.chart.sensor;
            Vec2 z0 = d.sensors.pos[std::size_t(j0)];
            double t0 = d.domain.curve.t_of_s(d.sensors.s[std::size_t(j0)]);
            Vec2 T = normalized(d.domain.curve.d1(t0));
            double v_true = dot(normalized(p - z0), T);
            CHECK(sr.chart.c1 == Approx(v_true).margin(0.02));
            CHECK(sr.chart.c2 == Approx(norm(p - z0)).margin(1e-6));
        }
    }
    SECTION("chart injectivity per base sensor") {
        std::map<int, std::vector<Vec2>> per_sensor;
        for (const auto& sr : rm.sources)
            if (!sr.chart.is_beta && sr.chart.sensor >= 0)
                per_sensor[sr.chart.sensor].push_back({sr.chart.c1, sr.chart.c2});
        for (auto& [j, coords] : per_sensor) {
            double min_gap = 1e300;
            for (std::size_t a = 0; a < coords.size(); ++a)
                for (std::size_t b = a + 1; b < coords.size(); ++b)
                    min_gap = std::min(min_gap, norm(coords[a] - coords[b]));
            if (coords.size() >= 2) CHECK(min_gap > 1e-6);
        }
    }
    SECTION("boundary chart: the defining coordinate vanishes on boundary sources") {
        long n_beta = 0;
        for (const auto& sr : rm.sources) {
            if (!sr.boundary || sr.chart.sensor < 0) continue;
            REQUIRE(sr.chart.is_beta);
            ++n_beta;
            CHECK(sr.chart.c2 >= -ro.tol_T_eff(d.gen.ds));
            CHECK(std::abs(sr.chart.c2) <= ro.tol_T_eff(d.gen.ds));
        }
        CHECK(n_beta >= d.gen.ds.m / 2);
    }
}

TEST_CASE("distance differentials at the center of the disk") {
    const auto& d = oracles::disk_dataset();
    const auto& rm = oracles::disk_reconstruction();
    ReconOptions ro = oracles::disk_recon_options();

    // find the lattice source nearest the center: its chart is isometric to
    // the plane at that point, so the covectors are unit length
    long center = -1;
    double best = 1e9;
    for (long i = 0; i < d.gen.ds.N; ++i) {
        double r = norm(d.gen.truth.source[std::size_t(i)]);
        if (r < best) {
            best = r;
            center = i;
        }
    }
    const SourceRecon& sr = rm.sources[std::size_t(center)];
    REQUIRE(sr.chart.sensor >= 0);
    CovectorSet cov = estimate_differentials(d.gen.ds, rm.grads, center, sr.chart.sensor, ro);
    REQUIRE(int(cov.xi.size()) >= 8);

    Mat2 g_chart = oracles::euclid_chart_metric(sr.chart.c1, sr.chart.c2);
    Mat2 q = inverse(g_chart);
    double span_lo = 1e9, span_hi = -1e9;
    for (std::size_t k = 0; k < cov.xi.size(); ++k) {
        // |xi|_{g^{-1}} = 1 on the cosphere
        double n2 = dot(cov.xi[k], q * cov.xi[k]);
        CHECK(std::sqrt(n2) == Approx(1.0).margin(0.03));
        // direction pattern: covector points away from the sensor
        Vec2 z = d.sensors.pos[std::size_t(cov.sensors[k])];
        double ang = std::atan2(z.y, z.x);
        span_lo = std::min(span_lo, ang);
        span_hi = std::max(span_hi, ang);
    }
    // sensors span a wide arc, so must the covectors
    CHECK(span_hi - span_lo > 1.0);

    SECTION("determinism: the estimation is a pure function of the dataset") {
        CovectorSet again = estimate_differentials(d.gen.ds, rm.grads, center, sr.chart.sensor, ro);
        REQUIRE(again.xi.size() == cov.xi.size());
        for (std::size_t k = 0; k < cov.xi.size(); ++k)
            CHECK(norm(again.xi[k] - cov.xi[k]) == 0.0);
    }
}

TEST_CASE("cosphere fits") {
    SECTION("exact unit circle") {
        CosphereFit f = fit_cosphere({{1, 0}, {0, 1}, {std::sqrt(0.5), std::sqrt(0.5)}});
        CHECK(frobenius(f.g_fit - Mat2::identity()) < 1e-10);
        CHECK(f.residual < 1e-12);
    }
    SECTION("exact axis-aligned ellipse") {
        CosphereFit f = fit_cosphere({{2, 0}, {0, 1}, {std::sqrt(2.0), std::sqrt(0.5)}});
        CHECK(f.g_fit.xx == Approx(4.0).margin(1e-9));
        CHECK(f.g_fit.yy == Approx(1.0).margin(1e-9));
        CHECK(std::abs(f.g_fit.xy) < 1e-9);
    }
    SECTION("noisy covectors of a random SPD form recover it to 1 percent") {
        auto g = oracles::rng(31);
        std::normal_distribution<double> noise(0.0, 1e-3);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 5; ++trial) {
            Mat2 q{1.5 + u(g), 0.3 * u(g), 0.0, 0.8 + 0.4 * u(g)};
            q.yx = q.xy;
            q = spd_floor(q, 0.3);
            Mat2 g_true = inverse(q);
            // points on the Q-unit circle: xi = R(theta) / sqrt(R Q R)
            std::vector<Vec2> xi;
            for (int k = 0; k < 20; ++k) {
                double a = 2 * std::numbers::pi * k / 20.0;
                Vec2 r{std::cos(a), std::sin(a)};
                Vec2 x = r * (1.0 / std::sqrt(dot(r, q * r)));
                xi.push_back(x + Vec2{noise(g), noise(g)});
            }
            CosphereFit f = fit_cosphere(xi);
            CHECK(frobenius(f.g_fit - g_true) / frobenius(g_true) < 0.01);
        }
    }
    SECTION("degenerate spread is a rank error carrying a condition number") {
        std::vector<Vec2> xi = {{1, 0}, {0.9999, 0.0001}, {0.9998, -0.0001}};
        try {
            fit_cosphere(xi);
            FAIL("expected pipeline_error");
        } catch (const pipeline_error& e) {
            CHECK(std::string(e.what()).find("condition") != std::string::npos);
        }
    }
}

TEST_CASE("full pipeline on the flat disk") {
    const auto& d = oracles::disk_dataset();
    const auto& rm = oracles::disk_reconstruction();

    SECTION("every source is classified and almost all get a metric") {
        CHECK(rm.sources.size() == std::size_t(d.gen.ds.N));
        CHECK(rm.n_chart_failures == 0);
        CHECK(rm.n_metric >= long(0.95 * double(d.gen.ds.N)));
    }
    SECTION("interior metric accuracy vs the closed-form chart oracle") {
        long n = 0, good = 0;
        for (const auto& sr : rm.sources) {
            if (sr.boundary || !sr.has_metric || sr.chart.is_beta) continue;
            Mat2 g_true = oracles::euclid_chart_metric(sr.chart.c1, sr.chart.c2);
            ++n;
            if (frobenius(sr.g_fit - g_true) / frobenius(g_true) <= 0.02) ++good;
        }
        REQUIRE(n > 200);
        CHECK(double(good) / double(n) >= 0.90);
    }
    SECTION("cosphere self-consistency residuals") {
        long n = 0, tight = 0;
        for (const auto& sr : rm.sources) {
            if (!sr.has_metric) continue;
            ++n;
            if (sr.cosphere_residual < 0.05) ++tight;
        }
        CHECK(double(tight) / double(n) > 0.95);
    }
    SECTION("ray-set sup matches the ground-truth cut time (subsampled grid)") {
        ReconOptions ro = oracles::disk_recon_options();
        double tol = ro.tol_T_eff(d.gen.ds);
        for (int j = 4; j + 4 < d.gen.ds.m; j += 6) {
            BoundaryFrame fr = boundary_frame(d.domain, d.spec, d.sensors.s[std::size_t(j)]);
            for (double v : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
                RaySet rs = build_ray_set(d.gen.ds, rm.gg, rm.grads, j, v, ro);
                if (rs.thin) continue;
                // euclid disk: cut time = exit time = chord length
                Vec2 dir = unproject_h_scalar(d.spec, fr, v);
                double chord = exit_time(d.spec, d.domain, {fr.point, dir}, 5.0);
                CHECK(rs.t_sup == Approx(chord).margin(tol));
            }
        }
    }
    SECTION("blindness: identical datasets give identical reports") {
        namespace fs = std::filesystem;
        ReconOptions ro = oracles::disk_recon_options();
        ro.threads = 2;
        ReconstructedManifold rm2 = reconstruct_all(d.gen.ds, ro);
        fs::path dir = fs::temp_directory_path() / "geotime_blind";
        write_recon_report(rm, d.gen.ds, (dir / "a").string(), true);
        write_recon_report(rm2, d.gen.ds, (dir / "b").string(), true);
        for (const char* name : {"sources.csv", "gamma.csv"}) {
            std::ifstream a(dir / "a" / name), b(dir / "b" / name);
            std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
            std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
            CHECK(sa == sb);
        }
    }
}
