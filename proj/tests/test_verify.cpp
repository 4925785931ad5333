#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace geotime;
using Catch::Approx;

TEST_CASE("embedding separation on the flat disk") {
    const auto& d = oracles::disk_dataset();
    EmbeddingStats st = embedding_check(d.gen.ds);
    CHECK(st.min_gap > 0.0);
    CHECK(st.collapsed.empty());

    SECTION("the sup gap is bounded by the true distance (triangle inequality)") {
        auto g = oracles::rng(41);
        std::uniform_int_distribution<long> pick(0, d.gen.ds.N - 1);
        for (int k = 0; k < 300; ++k) {
            long i = pick(g), l = pick(g);
            if (i == l) continue;
            double truth = norm(d.gen.truth.source[std::size_t(i)] - d.gen.truth.source[std::size_t(l)]);
            CHECK(d.gen.ds.sup_gap(i, l) <= truth + 1e-6);
        }
    }
    SECTION("a synthetic duplicate row is caught") {
        TravelTimeDataset copy = d.gen.ds;
        copy.N += 1;
        copy.times.resize(copy.times.size() + std::size_t(copy.m));
        for (int j = 0; j < copy.m; ++j) copy.at(copy.N - 1, j) = copy.at(11, j);
        EmbeddingStats st2 = embedding_check(copy);
        CHECK(st2.min_gap == 0.0);
        CHECK_FALSE(st2.collapsed.empty());
    }
}

TEST_CASE("discrete correspondence: self comparison is the identity") {
    const auto& d = oracles::disk_dataset();
    const auto& rm = oracles::disk_reconstruction();
    IsometryReport rep = isometry_compare(d.gen.ds, rm, d.gen.ds, rm);
    for (long i = 0; i < d.gen.ds.N; ++i) CHECK(rep.psi[std::size_t(i)] == i);
    CHECK(rep.max_row_gap == 0.0);
    CHECK(rep.boundary_agree == rep.boundary_total);
    for (double e : rep.metric_errors) CHECK(e == 0.0);
    CHECK(rep.gamma_transport_max == 0.0);
}

TEST_CASE("rotated sensor layout transports structure") {
    // same disk, measurement arc rotated by 40 degrees; the abstract data
    // must match row-for-row under the sup-norm correspondence
    const double rot = 40.0 * std::numbers::pi / 180.0;
    MetricSpec spec = oracles::euclid_spec();
    double L = 2 * std::numbers::pi;
    DomainSpec disk1 = oracles::unit_disk(0.6);
    DomainSpec disk2(FourierCurve::circle(1.0), rot, rot + 0.6 * L);

    SourcePlan plan;
    plan.h_src = 0.12;
    plan.collar_depth = 0.06;
    plan.collar_spacing = 0.06;
    OracleOptions oracle;
    oracle.multistart = 16;
    oracle.threads = default_thread_count();

    SensorArray s1 = make_sensors(disk1, 24);
    SensorArray s2 = make_sensors(disk2, 24);
    GeneratedData g1 = generate_dataset(spec, disk1, plan, s1, oracle);
    GeneratedData g2 = generate_dataset(spec, disk2, plan, s2, oracle);

    ReconOptions ro = oracles::disk_recon_options();
    ReconstructedManifold r1 = reconstruct_all(g1.ds, ro);
    ReconstructedManifold r2 = reconstruct_all(g2.ds, ro);

    IsometryReport rep = isometry_compare(g1.ds, r1, g2.ds, r2);

    SECTION("row matching is bijective and tight at the sampling scale") {
        // the two source clouds differ, so matched rows sit within about a
        // lattice cell of each other in the sup-norm embedding
        CHECK(rep.max_row_gap < 0.8 * g1.ds.h_src);
        std::vector<int> hit(std::size_t(g2.ds.N), 0);
        for (long k : rep.psi)
            if (k >= 0) hit[std::size_t(k)] += 1;
        for (int h : hit) CHECK(h <= 1);
        CHECK(double(rep.unmatched.size()) / double(g1.ds.N) < 0.3);
    }
    SECTION("boundary flags transport") {
        CHECK(rep.boundary_agree >= long(0.97 * double(rep.boundary_total)));
    }
    SECTION("trace rows map to the same sensor parameter") {
        CHECK(rep.gamma_transport_max < 1e-6);
    }
    SECTION("matched distances agree at the sampling scale") {
        double worst = 0.0;
        for (double e : rep.distance_errors) worst = std::max(worst, e);
        CHECK(worst < 0.8 * g1.ds.h_src);
    }
    SECTION("ray sets transport into ray sets") {
        double mismatch = ray_set_transport(g1.ds, r1, g2.ds, r2, rep, ro);
        CHECK(mismatch <= 0.25);
    }
}

TEST_CASE("cut locus report on the flat disk is empty") {
    MetricSpec spec = oracles::euclid_spec();
    DomainSpec disk = oracles::unit_disk();
    DomainSpec ext = extend_domain(disk, spec, 0.12);
    CutLocusOptions opts;
    opts.n_directions = 48;
    opts.n_boundary_probe = 96;
    opts.cut.threads = default_thread_count();
    CutLocusReport rep = cutlocus_report(spec, disk, ext, {0.3, -0.1}, opts);
    CHECK(rep.samples.empty());
    CHECK(rep.n_typical + rep.n_conjugate + rep.n_atypical == 0);
    CHECK(rep.boundary_nonsmooth_count == 0);
}

TEST_CASE("horseshoe collapse (coarse grid smoke run)") {
    HorseshoeOptions opts;
    opts.grid_h = 1.0 / 128.0;
    opts.threads = default_thread_count();
    CollapseReport rep = counterexample_horseshoe(opts);
    CHECK(rep.convexity_max_pi > 0.0);
    CHECK(rep.involute.size() >= 4);
    CHECK(rep.geodesic_diameter > 0.5);
    CHECK(rep.data_diameter < 0.05);  // coarse grid; the acceptance run pins 1e-2
    CHECK(rep.full_diameter > 10.0 * rep.data_diameter);

    SECTION("the involute rows are sup-norm near-duplicates") {
        EmbeddingStats st = embedding_check(rep.partial_ds, rep.data_diameter * 1.01);
        CHECK_FALSE(st.collapsed.empty());
    }
}
