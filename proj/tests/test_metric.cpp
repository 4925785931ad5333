#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace geotime;
using Catch::Approx;

TEST_CASE("metric_at catalog values") {
    SECTION("euclidean is the identity") {
        Mat2 g = metric_at(oracles::euclid_spec(), {0.3, -0.2});
        CHECK(g.xx == 1.0);
        CHECK(g.xy == 0.0);
        CHECK(g.yy == 1.0);
    }
    SECTION("constant curvature at the origin") {
        Mat2 g = metric_at(oracles::constant_curvature_spec(1.0), {0, 0});
        CHECK(g.xx == Approx(4.0));
        CHECK(g.yy == Approx(4.0));
        CHECK(g.xy == 0.0);
    }
    SECTION("conformal bump matches the declared profile") {
        // independent evaluation of the declared gaussian exponent
        double a = 0.5, w = 0.3;
        MetricSpec spec = oracles::bump_spec(0, 0, a, w);
        double phi = a * std::exp(-1.0 / (2 * w * w));  // at (1, 0)
        Mat2 g = metric_at(spec, {1, 0});
        CHECK(g.xx == Approx(std::exp(2 * phi)).epsilon(1e-12));
        CHECK(g.yy == Approx(g.xx));
    }
    SECTION("query outside the chart rectangle") {
        CHECK_THROWS_AS(metric_at(oracles::euclid_spec(), {5, 0}), domain_error);
    }
}

TEST_CASE("christoffel symbols") {
    SECTION("flat metric vanishes") {
        Christoffel c = christoffel(oracles::euclid_spec(), {0.4, 0.7});
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) CHECK(c.G[i][j][k] == 0.0);
    }
    SECTION("conformal pattern from symbolic differentiation") {
        MetricSpec spec = oracles::bump_spec(0.1, -0.2, 0.4, 0.35);
        Vec2 p{0.35, 0.15};
        // oracle: independent central differences of the declared exponent
        auto phi = [&](Vec2 q) { return 0.5 * std::log(metric_at(spec, q).xx); };
        double px = (phi({p.x + 1e-5, p.y}) - phi({p.x - 1e-5, p.y})) / 2e-5;
        double py = (phi({p.x, p.y + 1e-5}) - phi({p.x, p.y - 1e-5})) / 2e-5;
        Christoffel c = christoffel(spec, p);
        CHECK(c.G[0][0][0] == Approx(px).margin(1e-8));
        CHECK(c.G[0][0][1] == Approx(py).margin(1e-8));
        CHECK(c.G[0][1][1] == Approx(-px).margin(1e-8));
        CHECK(c.G[1][0][0] == Approx(-py).margin(1e-8));
        CHECK(c.G[1][1][1] == Approx(py).margin(1e-8));
    }
    SECTION("constant curvature has a critical point at the origin") {
        Christoffel c = christoffel(oracles::constant_curvature_spec(1.0), {0, 0});
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) CHECK(std::abs(c.G[i][j][k]) < 1e-14);
    }
    SECTION("symmetry in the lower indices (all entries)") {
        for (const MetricSpec& spec :
             {oracles::bump_spec(0, 0, 0.5, 0.3), oracles::custom_spec()}) {
            Christoffel c = christoffel(spec, {0.3, -0.4});
            for (int i = 0; i < 2; ++i) CHECK(c.G[i][0][1] == Approx(c.G[i][1][0]).margin(1e-15));
        }
    }
}

TEST_CASE("gauss curvature") {
    SECTION("euclidean vanishes") {
        CHECK(gauss_curvature(oracles::euclid_spec(), {0.2, 0.9}) == 0.0);
    }
    SECTION("constant curvature entry: Brioschi cross-check at random points") {
        MetricSpec spec = oracles::constant_curvature_spec(1.0);
        auto g = oracles::rng(5);
        for (int k = 0; k < 3; ++k) {
            Vec2 p = oracles::random_in_disk(g, 1.5);
            CHECK(gauss_curvature(spec, p) == Approx(1.0).margin(1e-8));
            CHECK(brioschi_curvature(spec, p) == Approx(1.0).margin(1e-8));
        }
    }
    SECTION("bump center equals minus the flat laplacian of the exponent") {
        MetricSpec spec = oracles::bump_spec(0, 0, 0.5, 0.3);
        auto phi = [&](Vec2 q) { return 0.5 * std::log(metric_at(spec, q).xx); };
        double lap = oracles::fd_laplacian(phi, {0, 0});
        // e^{-2 phi(0)} factor with phi(0) = a
        double expect = -std::exp(-2.0 * 0.5) * lap;
        CHECK(gauss_curvature(spec, {0, 0}) == Approx(expect).epsilon(1e-4));
    }
}

TEST_CASE("metric field invariants over random chart points") {
    auto g = oracles::rng(7);
    std::vector<MetricSpec> specs = {oracles::euclid_spec(), oracles::bump_spec(0.1, 0.0, 0.5, 0.3),
                                     oracles::constant_curvature_spec(1.0), oracles::custom_spec()};
    for (const MetricSpec& spec : specs) {
        double lo_x = spec.chart.xmin * 0.9, hi_x = spec.chart.xmax * 0.9;
        std::uniform_real_distribution<double> ux(lo_x, hi_x);
        for (int k = 0; k < 100; ++k) {
            Vec2 p{ux(g), ux(g)};
            MetricJet jet = metric_jet(spec, p);
            CHECK(jet.g.xy == Approx(jet.g.yx).margin(1e-15));
            auto ev = sym_eigenvalues(jet.g);
            CHECK(ev[0] > 0.0);

            // derivative consistency: analytic partials vs central differences
            const double h = 1e-4;
            Mat2 fx = (metric_at(spec, {p.x + h, p.y}) - metric_at(spec, {p.x - h, p.y})) *
                      (1.0 / (2 * h));
            Mat2 fy = (metric_at(spec, {p.x, p.y + h}) - metric_at(spec, {p.x, p.y - h})) *
                      (1.0 / (2 * h));
            double scale = frobenius(jet.g) + frobenius(jet.gx) + frobenius(jet.gy);
            CHECK(frobenius(jet.gx - fx) / scale < 1e-6);
            CHECK(frobenius(jet.gy - fy) / scale < 1e-6);
        }
    }
}

TEST_CASE("custom_spd brioschi vs conformal closed form on a conformal instance") {
    // encode a conformal polynomial metric (1 + 0.3 x)^2 I as custom tables;
    // its curvature must match the conformal formula computed independently
    MetricSpec c;
    c.id = MetricCatalog::custom_spd;
    c.chart = {-1, 1, -1, 1};
    c.p11.degree = c.p12.degree = c.p22.degree = 2;
    c.p11.coeff.assign(9, 0.0);
    c.p12.coeff.assign(9, 0.0);
    c.p22.coeff.assign(9, 0.0);
    // (1 + 0.3 x)^2 = 1 + 0.6 x + 0.09 x^2
    c.p11.coeff[0] = c.p22.coeff[0] = 1.0;
    c.p11.coeff[3] = c.p22.coeff[3] = 0.6;
    c.p11.coeff[6] = c.p22.coeff[6] = 0.09;
    Vec2 p{0.2, -0.3};
    auto phi = [&](Vec2 q) { return std::log(1.0 + 0.3 * q.x); };
    double expect = -std::exp(-2 * phi(p)) * oracles::fd_laplacian(phi, p);
    CHECK(gauss_curvature(c, p) == Approx(expect).margin(1e-4));
}
