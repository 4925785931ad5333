#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace geotime;
using Catch::Approx;

TEST_CASE("boundary frames on the unit circle") {
    MetricSpec spec = oracles::euclid_spec();
    DomainSpec disk = oracles::unit_disk();

    BoundaryFrame f = boundary_frame(disk, spec, 0.0);
    CHECK(f.point.x == Approx(1.0).margin(1e-12));
    CHECK(f.point.y == Approx(0.0).margin(1e-12));
    CHECK(f.inward_normal.x == Approx(-1.0).margin(1e-10));
    CHECK(f.inward_normal.y == Approx(0.0).margin(1e-10));
    CHECK(f.second_fundamental_form == Approx(-1.0).margin(1e-9));

    SECTION("Pi = -1 all around by symmetry") {
        for (double s : {0.5, 1.7, 3.2, 5.9})
            CHECK(boundary_frame(disk, spec, s).second_fundamental_form == Approx(-1.0).margin(1e-9));
    }
    SECTION("frame orthonormality in g") {
        for (double s : {0.3, 2.0, 4.4}) {
            BoundaryFrame fr = boundary_frame(disk, spec, s);
            Mat2 g = metric_at(spec, fr.point);
            CHECK(std::abs(dot(fr.tangent, g * fr.inward_normal)) < 1e-10);
            CHECK(dot(fr.tangent, g * fr.tangent) == Approx(1.0).margin(1e-10));
            CHECK(dot(fr.inward_normal, g * fr.inward_normal) == Approx(1.0).margin(1e-10));
        }
    }
    SECTION("tangent equals the g-normalized curve derivative (finite differences)") {
        double s = 1.234;
        BoundaryFrame fr = boundary_frame(disk, spec, s);
        double ds = 1e-6;
        Vec2 fd = (disk.curve.point_at_s(s + ds) - disk.curve.point_at_s(s - ds)) / (2 * ds);
        Vec2 fd_g = fd * (1.0 / g_norm(spec, fr.point, fd));
        CHECK(norm(fd_g - fr.tangent) < 1e-6);
    }
}

TEST_CASE("ellipse second fundamental form against the curvature oracle") {
    MetricSpec spec = oracles::euclid_spec();
    spec.chart = {-2.5, 2.5, -2.5, 2.5};
    DomainSpec ell(FourierCurve::ellipse(2.0, 1.0), 0.0, 1.0);
    // point (2, 0) is at curve parameter t=0
    double s0 = 0.0;
    BoundaryFrame f = boundary_frame(ell, spec, s0);
    CHECK(f.point.x == Approx(2.0).margin(1e-9));
    CHECK(f.second_fundamental_form == Approx(-oracles::ellipse_curvature(2, 1, 0)).margin(1e-8));
}

TEST_CASE("strict convexity check") {
    MetricSpec spec = oracles::euclid_spec();
    SECTION("unit circle passes with margin -1") {
        auto r = check_strict_convexity(oracles::unit_disk(), spec, 64);
        CHECK(r.pass);
        CHECK(r.max_pi == Approx(-1.0).margin(1e-6));
    }
    SECTION("ellipse passes (curvature positive everywhere)") {
        MetricSpec wide = spec;
        wide.chart = {-2.5, 2.5, -2.5, 2.5};
        DomainSpec ell(FourierCurve::ellipse(2.0, 1.0), 0.0, 1.0);
        auto r = check_strict_convexity(ell, wide, 128);
        CHECK(r.pass);
        // sharpest point of the oracle: b/a^2 at the flat ends
        CHECK(r.max_pi == Approx(-oracles::ellipse_curvature(2, 1, std::numbers::pi / 2)).margin(1e-4));
    }
    SECTION("horseshoe fails on the concave arc") {
        MetricSpec wide = spec;
        wide.chart = {-1.9, 1.9, -1.9, 1.9};
        DomainSpec hs(horseshoe_curve(), 0.5, 1.0);
        auto r = check_strict_convexity(hs, wide, 256);
        CHECK_FALSE(r.pass);
        CHECK(r.max_pi > 0.5);
    }
    SECTION("sample floor is enforced") {
        CHECK_THROWS_AS(check_strict_convexity(oracles::unit_disk(), spec, 8), domain_error);
    }
}

TEST_CASE("containment classification") {
    DomainSpec disk = oracles::unit_disk();
    CHECK(disk.classify({0.2, 0.1}) == Containment::interior);
    CHECK(disk.classify({1.3, 0.0}) == Containment::exterior);
    CHECK(disk.classify({1.0, 0.0}, 1e-6) == Containment::boundary);
    CHECK(disk.curve.is_simple());
}

TEST_CASE("gamma arc validation") {
    CHECK_THROWS_AS(DomainSpec(FourierCurve::circle(1.0), 1.0, 1.0), config_error);
    CHECK_THROWS_AS(DomainSpec(FourierCurve::circle(1.0), 2.0, 1.0), config_error);
}

TEST_CASE("domain extension") {
    MetricSpec spec = oracles::euclid_spec();
    spec.chart = {-3.3, 3.3, -3.3, 3.3};
    DomainSpec disk(FourierCurve::circle(1.0), 0.0, 1.0);

    SECTION("circle offset is a circle, still convex") {
        DomainSpec ext = extend_domain(disk, spec, 0.1);
        CHECK(ext.length() == Approx(2 * std::numbers::pi * 1.1).epsilon(1e-6));
        auto r = check_strict_convexity(ext, spec, 64);
        CHECK(r.pass);
        CHECK(r.max_pi == Approx(-oracles::offset_curvature(1.0, 0.1)).margin(1e-5));
    }
    SECTION("ellipse offset matches the offset-curvature oracle") {
        DomainSpec ell(FourierCurve::ellipse(2.0, 1.0), 0.0, 1.0);
        DomainSpec ext = extend_domain(ell, spec, 0.05);
        auto r = check_strict_convexity(ext, spec, 256);
        CHECK(r.pass);
        double kmin = oracles::ellipse_curvature(2, 1, std::numbers::pi / 2);
        CHECK(r.max_pi == Approx(-oracles::offset_curvature(kmin, 0.05)).margin(2e-3));
    }
    SECTION("offset through the curvature center is refused") {
        try {
            extend_domain(disk, spec, 2.0);
            FAIL("expected domain_error");
        } catch (const domain_error& e) {
            CHECK(std::string(e.what()).find("admissible") != std::string::npos);
        }
    }
    SECTION("convexity margin is monotone along euclidean offsets") {
        double prev = check_strict_convexity(disk, spec, 64).max_pi;
        for (double eps : {0.1, 0.2, 0.3}) {
            double cur = check_strict_convexity(extend_domain(disk, spec, eps), spec, 64).max_pi;
            CHECK(cur >= prev - 1e-9);
            prev = cur;
        }
    }
}

TEST_CASE("horseshoe fixture geometry") {
    FourierCurve hs = horseshoe_curve();
    CHECK(hs.is_simple(512));
    DomainSpec dom(hs, 1.2, 2.1);
    CHECK_FALSE(dom.inside({0, 0}));      // the hole
    CHECK_FALSE(dom.inside({1.0, 0.0}));  // the gap
    CHECK(dom.inside({-1.0, 0.0}));       // the far arm
}
