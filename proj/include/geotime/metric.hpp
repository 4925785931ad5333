#ifndef GEOTIME_METRIC_HPP
#define GEOTIME_METRIC_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "geotime/linalg.hpp"

namespace geotime {

struct Rect {
    double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
    bool contains(const Vec2& p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    double diag() const { return std::hypot(xmax - xmin, ymax - ymin); }
};

enum class MetricCatalog { euclidean, conformal_bump, constant_curvature, custom_spd };

inline std::string to_string(MetricCatalog id) {
    switch (id) {
        case MetricCatalog::euclidean: return "euclidean";
        case MetricCatalog::conformal_bump: return "conformal_bump";
        case MetricCatalog::constant_curvature: return "constant_curvature";
        case MetricCatalog::custom_spd: return "custom_spd";
    }
    return "?";
}

/// Bivariate polynomial sum c[i][j] x^i y^j, coefficients row major with
/// fixed degree. Used by the custom_spd catalog entry.
struct Poly2 {
    int degree = 0;
    std::vector<double> coeff;  // (degree+1)^2 entries, c[i*(degree+1)+j]

    double eval(double x, double y, int dx = 0, int dy = 0) const {
        int n = degree + 1;
        double sum = 0.0;
        for (int i = dx; i < n; ++i) {
            double fi = 1.0;
            for (int k = 0; k < dx; ++k) fi *= double(i - k);
            for (int j = dy; j < n; ++j) {
                double fj = 1.0;
                for (int k = 0; k < dy; ++k) fj *= double(j - k);
                double c = coeff[std::size_t(i) * n + j];
                if (c == 0.0) continue;
                sum += c * fi * fj * std::pow(x, i - dx) * std::pow(y, j - dy);
            }
        }
        return sum;
    }
};

/// A smooth metric tensor field on a planar chart. The catalog is closed:
/// three conformal families plus a polynomial SPD entry.
///
///  euclidean          : g = I
///  conformal_bump     : g = e^{2 phi} I, phi = a exp(-|x-c|^2 / (2 w^2)),
///                       params = {cx, cy, a, w}
///  constant_curvature : g = 4 / (1 + K |x|^2)^2 I, params = {K}
///  custom_spd         : g11, g12, g22 polynomial tables
struct MetricSpec {
    MetricCatalog id = MetricCatalog::euclidean;
    std::vector<double> params;
    Rect chart{-2.0, 2.0, -2.0, 2.0};
    Poly2 p11, p12, p22;  // custom_spd only

    bool conformal() const { return id != MetricCatalog::custom_spd; }

    void require_in_chart(const Vec2& p) const {
        if (!chart.contains(p))
            throw domain_error("metric query outside chart rectangle at (" +
                               std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
    }

    /// Conformal exponent phi with first and second derivatives.
    /// Only valid for the conformal families.
    struct PhiJet {
        double phi = 0, px = 0, py = 0, pxx = 0, pxy = 0, pyy = 0;
        double laplacian() const { return pxx + pyy; }
    };

    PhiJet phi_jet(const Vec2& p) const {
        PhiJet j;
        switch (id) {
            case MetricCatalog::euclidean:
                break;
            case MetricCatalog::conformal_bump: {
                double cx = params.at(0), cy = params.at(1);
                double a = params.at(2), w = params.at(3);
                double dx = p.x - cx, dy = p.y - cy;
                double iw2 = 1.0 / (w * w);
                double r2 = dx * dx + dy * dy;
                double f = a * std::exp(-0.5 * r2 * iw2);
                j.phi = f;
                j.px = -f * dx * iw2;
                j.py = -f * dy * iw2;
                j.pxx = f * (dx * dx * iw2 - 1.0) * iw2;
                j.pyy = f * (dy * dy * iw2 - 1.0) * iw2;
                j.pxy = f * dx * dy * iw2 * iw2;
                break;
            }
            case MetricCatalog::constant_curvature: {
                double K = params.at(0);
                double r2 = p.x * p.x + p.y * p.y;
                double u = 1.0 + K * r2;
                if (u <= 0.0) throw domain_error("constant_curvature chart point beyond model horizon");
                j.phi = std::log(2.0) - std::log(u);
                double iu = 1.0 / u;
                j.px = -2.0 * K * p.x * iu;
                j.py = -2.0 * K * p.y * iu;
                j.pxx = -2.0 * K * iu + 4.0 * K * K * p.x * p.x * iu * iu;
                j.pyy = -2.0 * K * iu + 4.0 * K * K * p.y * p.y * iu * iu;
                j.pxy = 4.0 * K * K * p.x * p.y * iu * iu;
                break;
            }
            case MetricCatalog::custom_spd:
                throw domain_error("phi_jet undefined for custom_spd");
        }
        return j;
    }
};

/// Metric with first (and optionally second) partial derivatives.
struct MetricJet {
    Mat2 g, gx, gy;
    Mat2 gxx, gxy, gyy;
    bool has_second = false;
};

inline Mat2 metric_at(const MetricSpec& spec, const Vec2& p) {
    spec.require_in_chart(p);
    if (spec.conformal()) {
        double e2 = std::exp(2.0 * spec.phi_jet(p).phi);
        return Mat2::diag(e2, e2);
    }
    Mat2 g{spec.p11.eval(p.x, p.y), spec.p12.eval(p.x, p.y),
           spec.p12.eval(p.x, p.y), spec.p22.eval(p.x, p.y)};
    if (!is_spd(g)) throw domain_error("custom_spd metric not positive definite at query point");
    return g;
}

inline MetricJet metric_jet(const MetricSpec& spec, const Vec2& p, bool second = false) {
    spec.require_in_chart(p);
    MetricJet out;
    if (spec.conformal()) {
        auto j = spec.phi_jet(p);
        double e2 = std::exp(2.0 * j.phi);
        out.g = Mat2::diag(e2, e2);
        out.gx = Mat2::diag(2.0 * e2 * j.px, 2.0 * e2 * j.px);
        out.gy = Mat2::diag(2.0 * e2 * j.py, 2.0 * e2 * j.py);
        if (second) {
            double cxx = 2.0 * e2 * (2.0 * j.px * j.px + j.pxx);
            double cxy = 2.0 * e2 * (2.0 * j.px * j.py + j.pxy);
            double cyy = 2.0 * e2 * (2.0 * j.py * j.py + j.pyy);
            out.gxx = Mat2::diag(cxx, cxx);
            out.gxy = Mat2::diag(cxy, cxy);
            out.gyy = Mat2::diag(cyy, cyy);
            out.has_second = true;
        }
        return out;
    }
    auto entry = [&](const Poly2& q, int dx, int dy) { return q.eval(p.x, p.y, dx, dy); };
    out.g = {entry(spec.p11, 0, 0), entry(spec.p12, 0, 0), entry(spec.p12, 0, 0), entry(spec.p22, 0, 0)};
    out.gx = {entry(spec.p11, 1, 0), entry(spec.p12, 1, 0), entry(spec.p12, 1, 0), entry(spec.p22, 1, 0)};
    out.gy = {entry(spec.p11, 0, 1), entry(spec.p12, 0, 1), entry(spec.p12, 0, 1), entry(spec.p22, 0, 1)};
    if (second) {
        out.gxx = {entry(spec.p11, 2, 0), entry(spec.p12, 2, 0), entry(spec.p12, 2, 0), entry(spec.p22, 2, 0)};
        out.gxy = {entry(spec.p11, 1, 1), entry(spec.p12, 1, 1), entry(spec.p12, 1, 1), entry(spec.p22, 1, 1)};
        out.gyy = {entry(spec.p11, 0, 2), entry(spec.p12, 0, 2), entry(spec.p12, 0, 2), entry(spec.p22, 0, 2)};
        out.has_second = true;
    }
    return out;
}

/// Christoffel symbols of the second kind, G[i][j][k] = Gamma^i_{jk}.
struct Christoffel {
    double G[2][2][2] = {};
};

inline Christoffel christoffel(const MetricSpec& spec, const Vec2& p) {
    Christoffel c;
    if (spec.conformal()) {
        auto j = spec.phi_jet(p);
        spec.require_in_chart(p);
        c.G[0][0][0] = j.px;
        c.G[0][0][1] = c.G[0][1][0] = j.py;
        c.G[0][1][1] = -j.px;
        c.G[1][0][0] = -j.py;
        c.G[1][0][1] = c.G[1][1][0] = j.px;
        c.G[1][1][1] = j.py;
        return c;
    }
    MetricJet m = metric_jet(spec, p);
    Mat2 ginv = inverse(m.g);
    // dg[k] = partial_k g as 2x2 arrays
    double dg[2][2][2];
    dg[0][0][0] = m.gx.xx; dg[0][0][1] = m.gx.xy; dg[0][1][0] = m.gx.yx; dg[0][1][1] = m.gx.yy;
    dg[1][0][0] = m.gy.xx; dg[1][0][1] = m.gy.xy; dg[1][1][0] = m.gy.yx; dg[1][1][1] = m.gy.yy;
    double gi[2][2] = {{ginv.xx, ginv.xy}, {ginv.yx, ginv.yy}};
    for (int i = 0; i < 2; ++i)
        for (int jdx = 0; jdx < 2; ++jdx)
            for (int k = 0; k < 2; ++k) {
                double s = 0.0;
                for (int l = 0; l < 2; ++l)
                    s += gi[i][l] * (dg[jdx][l][k] + dg[k][l][jdx] - dg[l][jdx][k]);
                c.G[i][jdx][k] = 0.5 * s;
            }
    return c;
}

/// Gauss curvature via the Brioschi formula; needs second derivatives.
/// Works for every catalog entry, used as a cross check for the conformal
/// closed forms.
inline double brioschi_curvature(const MetricSpec& spec, const Vec2& p) {
    MetricJet m = metric_jet(spec, p, true);
    double E = m.g.xx, F = m.g.xy, G = m.g.yy;
    double Eu = m.gx.xx, Ev = m.gy.xx;
    double Fu = m.gx.xy, Fv = m.gy.xy;
    double Gu = m.gx.yy, Gv = m.gy.yy;
    double Evv = m.gyy.xx, Fuv = m.gxy.xy, Guu = m.gxx.yy;
    double m1[3][3] = {
        {-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev},
        {Fv - 0.5 * Gu, E, F},
        {0.5 * Gv, F, G}};
    double m2[3][3] = {
        {0.0, 0.5 * Ev, 0.5 * Gu},
        {0.5 * Ev, E, F},
        {0.5 * Gu, F, G}};
    auto det3 = [](double a[3][3]) {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    double den = E * G - F * F;
    return (det3(m1) - det3(m2)) / (den * den);
}

inline double gauss_curvature(const MetricSpec& spec, const Vec2& p) {
    spec.require_in_chart(p);
    if (spec.conformal()) {
        auto j = spec.phi_jet(p);
        return -std::exp(-2.0 * j.phi) * j.laplacian();
    }
    return brioschi_curvature(spec, p);
}

inline double g_norm(const MetricSpec& spec, const Vec2& p, const Vec2& v) {
    Mat2 g = metric_at(spec, p);
    return std::sqrt(std::max(0.0, dot(v, g * v)));
}

inline double g_inner(const MetricSpec& spec, const Vec2& p, const Vec2& a, const Vec2& b) {
    Mat2 g = metric_at(spec, p);
    return dot(a, g * b);
}

/// Sampled bounds of the conformal factor e^{phi} over the chart. Used to
/// size shooting horizons.
struct ConformalRange {
    double lo = 1.0, hi = 1.0;
};

inline ConformalRange conformal_range(const MetricSpec& spec, int n = 33) {
    ConformalRange r;
    if (!spec.conformal()) {
        // crude bound from sqrt of metric eigenvalues
        r.lo = 1e300;
        r.hi = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Vec2 p{spec.chart.xmin + (spec.chart.xmax - spec.chart.xmin) * i / (n - 1.0),
                       spec.chart.ymin + (spec.chart.ymax - spec.chart.ymin) * j / (n - 1.0)};
                auto ev = sym_eigenvalues(metric_at(spec, p));
                r.lo = std::min(r.lo, std::sqrt(std::max(ev[0], 1e-12)));
                r.hi = std::max(r.hi, std::sqrt(ev[1]));
            }
        return r;
    }
    r.lo = 1e300;
    r.hi = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec2 p{spec.chart.xmin + (spec.chart.xmax - spec.chart.xmin) * i / (n - 1.0),
                   spec.chart.ymin + (spec.chart.ymax - spec.chart.ymin) * j / (n - 1.0)};
            double f = std::exp(spec.phi_jet(p).phi);
            r.lo = std::min(r.lo, f);
            r.hi = std::max(r.hi, f);
        }
    return r;
}

}  // namespace geotime

#endif  // GEOTIME_METRIC_HPP
