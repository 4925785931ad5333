#ifndef GEOTIME_DOMAIN_HPP
#define GEOTIME_DOMAIN_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "geotime/curve.hpp"
#include "geotime/linalg.hpp"
#include "geotime/metric.hpp"

namespace geotime {

enum class Containment { interior, boundary, exterior };

/// Orthonormal (w.r.t. g) frame at a boundary point, plus the scalar second
/// fundamental form. Pi is taken against the outward normal, so a strictly
/// convex boundary has Pi < 0 everywhere; the geodesic curvature seen from
/// inside is kappa_g = -Pi.
struct BoundaryFrame {
    double s = 0.0;
    Vec2 point;
    Vec2 tangent;        // g-unit, along increasing s
    Vec2 inward_normal;  // g-unit
    double second_fundamental_form = 0.0;  // Pi w.r.t. outward normal
};

struct ConvexityReport {
    bool pass = false;
    double max_pi = 0.0;  // most dangerous (largest) Pi over samples
    double arg_s = 0.0;
};

/// A compact domain bounded by a simple closed Fourier curve, oriented
/// counterclockwise, with a designated open measurement arc Gamma given in
/// euclidean arc length [s_a, s_b) of the chart curve.
class DomainSpec {
  public:
    FourierCurve curve;
    double gamma_a = 0.0, gamma_b = 0.0;

    DomainSpec() = default;

    DomainSpec(FourierCurve c, double sa, double sb) : curve(std::move(c)) {
        if (curve.signed_area() < 0.0) curve.reverse();
        gamma_a = sa;
        gamma_b = sb;
        if (!(gamma_a < gamma_b))
            throw config_error("gamma arc must satisfy s_a < s_b strictly");
        build_acceleration();
    }

    double length() const { return curve.total_length(); }

    const std::vector<Vec2>& polyline() const { return poly_; }
    Vec2 interior_anchor() const { return center_; }
    bool star_shaped() const { return star_ok_; }

    /// Negative inside, positive outside. For star-shaped domains this is
    /// the exact radial gap along the ray from the anchor; otherwise it is
    /// a parity-signed distance to the boundary polyline.
    double gap(const Vec2& p) const {
        if (star_ok_) {
            Vec2 d = p - center_;
            double r = norm(d);
            if (r < 1e-14) return -radial_table_[0];
            double theta = std::atan2(d.y, d.x);
            double rb = radius_exact(theta);
            return r - rb;
        }
        double dist = distance_to_polyline(p);
        return inside_parity(p) ? -dist : dist;
    }

    bool inside(const Vec2& p) const { return gap(p) < 0.0; }

    Containment classify(const Vec2& p, double tol = 1e-9) const {
        double gp = gap(p);
        if (std::abs(gp) <= tol) return Containment::boundary;
        return gp < 0.0 ? Containment::interior : Containment::exterior;
    }

    /// Distance from p to the boundary curve (euclidean, unsigned).
    double distance_to_boundary(const Vec2& p) const {
        double d = distance_to_polyline(p);
        return d;
    }

    /// Closest boundary arc parameter to p (polyline seed + Newton polish).
    double closest_s(const Vec2& p) const {
        std::size_t best = 0;
        double bd = 1e300;
        for (std::size_t i = 0; i < poly_.size(); ++i) {
            double d = norm2(p - poly_[i]);
            if (d < bd) { bd = d; best = i; }
        }
        double t = 2.0 * std::numbers::pi * double(best) / double(poly_.size());
        for (int it = 0; it < 40; ++it) {
            Vec2 c = curve.eval(t), d1 = curve.d1(t), d2 = curve.d2(t);
            double f = dot(p - c, d1);
            double df = dot(p - c, d2) - dot(d1, d1);
            if (std::abs(df) < 1e-300) break;
            double step = f / df;
            t -= step;
            if (std::abs(step) < 1e-14) break;
        }
        return s_of_t(t);
    }

    double s_of_t(double t) const { return curve.s_of_t(t); }

    bool s_in_gamma(double s) const {
        double L = length();
        s = std::fmod(s, L);
        if (s < 0) s += L;
        return s >= gamma_a && s <= gamma_b;
    }

  private:
    std::vector<Vec2> poly_;
    Vec2 center_;
    bool star_ok_ = false;
    std::vector<double> radial_table_;  // radius per uniform angle bin
    std::vector<double> t_table_;       // curve parameter per angle bin

    void build_acceleration() {
        const int K = 4096;
        poly_.resize(K);
        center_ = {0, 0};
        for (int i = 0; i < K; ++i) {
            poly_[i] = curve.eval(2.0 * std::numbers::pi * i / K);
            center_ += poly_[i];
        }
        center_ = center_ / double(K);

        // Attempt a star-shaped radial table around the centroid.
        std::vector<double> ang(K), rad(K);
        star_ok_ = true;
        for (int i = 0; i < K; ++i) {
            Vec2 d = poly_[i] - center_;
            ang[i] = std::atan2(d.y, d.x);
            rad[i] = norm(d);
            if (rad[i] < 1e-9) star_ok_ = false;
        }
        if (star_ok_) {
            // angle must be monotone (mod 2pi) along the curve
            int wraps = 0;
            for (int i = 0; i < K; ++i) {
                double da = ang[(i + 1) % K] - ang[i];
                if (da < -std::numbers::pi) { da += 2.0 * std::numbers::pi; ++wraps; }
                if (da <= 0.0) { star_ok_ = false; break; }
            }
            if (wraps != 1 && star_ok_) star_ok_ = false;
        }
        if (star_ok_) {
            const int B = 4096;
            radial_table_.assign(B, 0.0);
            t_table_.assign(B, 0.0);
            // fill bins by sweeping the sampled angles
            std::vector<int> order(K);
            for (int i = 0; i < K; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](int a, int b) { return ang[a] < ang[b]; });
            for (int b = 0; b < B; ++b) {
                double theta = -std::numbers::pi + (2.0 * std::numbers::pi) * (b + 0.5) / B;
                auto it = std::lower_bound(order.begin(), order.end(), theta,
                                           [&](int idx, double th) { return ang[idx] < th; });
                int hi = (it == order.end()) ? order.front() : *it;
                int lo = (it == order.begin()) ? order.back() : *(it - 1);
                double a0 = ang[lo], a1 = ang[hi];
                double da = a1 - a0;
                if (da <= 0) da += 2.0 * std::numbers::pi;
                double w = theta - a0;
                if (w < 0) w += 2.0 * std::numbers::pi;
                double f = std::clamp(w / da, 0.0, 1.0);
                radial_table_[b] = rad[lo] * (1 - f) + rad[hi] * f;
                double t0 = 2.0 * std::numbers::pi * lo / K;
                double t1 = 2.0 * std::numbers::pi * hi / K;
                double dt = t1 - t0;
                if (dt <= -std::numbers::pi) dt += 2.0 * std::numbers::pi;
                if (dt < 0) dt = 0;
                t_table_[b] = t0 + f * dt;
            }
        }
    }

    /// Exact boundary radius along the ray of angle theta from the anchor
    /// (Newton on the curve parameter, seeded from the angle table).
    double radius_exact(double theta) const {
        const int B = int(radial_table_.size());
        double u = (theta + std::numbers::pi) / (2.0 * std::numbers::pi);
        int b = int(u * B) % B;
        if (b < 0) b += B;
        double t = t_table_[b];
        for (int it = 0; it < 30; ++it) {
            Vec2 d = curve.eval(t) - center_;
            Vec2 v = curve.d1(t);
            double f = std::remainder(std::atan2(d.y, d.x) - theta, 2.0 * std::numbers::pi);
            double df = cross(d, v) / norm2(d);  // d(angle)/dt, note orientation
            if (std::abs(df) < 1e-300) break;
            double step = f / df;
            t -= step;
            if (std::abs(step) < 2e-15) break;
        }
        return norm(curve.eval(t) - center_);
    }

    double distance_to_polyline(const Vec2& p) const {
        double best = 1e300;
        const std::size_t K = poly_.size();
        for (std::size_t i = 0; i < K; ++i) {
            const Vec2& a = poly_[i];
            const Vec2& b = poly_[(i + 1) % K];
            Vec2 ab = b - a;
            double tt = std::clamp(dot(p - a, ab) / std::max(norm2(ab), 1e-300), 0.0, 1.0);
            best = std::min(best, norm2(p - (a + ab * tt)));
        }
        return std::sqrt(best);
    }

    bool inside_parity(const Vec2& p) const {
        // even-odd rule against the polyline
        bool in = false;
        const std::size_t K = poly_.size();
        for (std::size_t i = 0; i < K; ++i) {
            const Vec2& a = poly_[i];
            const Vec2& b = poly_[(i + 1) % K];
            if ((a.y > p.y) != (b.y > p.y)) {
                double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if (p.x < xint) in = !in;
            }
        }
        return in;
    }
};

inline BoundaryFrame boundary_frame(const DomainSpec& domain, const MetricSpec& spec, double s) {
    BoundaryFrame f;
    f.s = s;
    double t = domain.curve.t_of_s(s);
    Vec2 c = domain.curve.eval(t);
    Vec2 v = domain.curve.d1(t);
    Vec2 a = domain.curve.d2(t);
    double sp = norm(v);
    // euclidean-arclength derivatives of the curve
    Vec2 cp = v / sp;
    Vec2 cpp = (a - cp * dot(cp, a)) / (sp * sp);

    f.point = c;
    Mat2 g = metric_at(spec, c);
    double tg = std::sqrt(dot(cp, g * cp));
    f.tangent = cp / tg;
    // CCW orientation puts the interior on the left of the tangent.
    Vec2 nraw = perp(cp);
    Vec2 n = nraw - f.tangent * dot(nraw, g * f.tangent);
    double ng = std::sqrt(dot(n, g * n));
    n = n / ng;
    if (dot(n, nraw) < 0) n = -n;
    f.inward_normal = n;

    // Pi(T,T) = <D_s c', nu_out>_g / |c'|_g^2 with the covariant derivative
    // along the euclidean-arclength parametrization.
    Christoffel ch = christoffel(spec, c);
    Vec2 acc{cpp.x + ch.G[0][0][0] * cp.x * cp.x + 2.0 * ch.G[0][0][1] * cp.x * cp.y + ch.G[0][1][1] * cp.y * cp.y,
             cpp.y + ch.G[1][0][0] * cp.x * cp.x + 2.0 * ch.G[1][0][1] * cp.x * cp.y + ch.G[1][1][1] * cp.y * cp.y};
    Vec2 nu_out = -n;
    f.second_fundamental_form = dot(acc, g * nu_out) / (tg * tg);
    return f;
}

inline ConvexityReport check_strict_convexity(const DomainSpec& domain, const MetricSpec& spec,
                                              int n_samples = 256, double margin_floor = 1e-6) {
    if (n_samples < 16) throw domain_error("convexity check needs at least 16 samples");
    ConvexityReport r;
    r.max_pi = -1e300;
    double L = domain.length();
    for (int i = 0; i < n_samples; ++i) {
        double s = L * double(i) / double(n_samples);
        BoundaryFrame f = boundary_frame(domain, spec, s);
        if (f.second_fundamental_form > r.max_pi) {
            r.max_pi = f.second_fundamental_form;
            r.arg_s = s;
        }
    }
    r.pass = r.max_pi < -margin_floor;
    return r;
}

/// Outward normal offset of the boundary by eps (euclidean offset in the
/// chart), refit as a Fourier curve. Admissibility asks for a regular
/// two-sided collar: the inward offset at the same eps must not cross the
/// curvature centers (eps * kappa < 1), the outward curve must stay in the
/// chart and strictly convex. Violations throw, carrying the largest
/// admissible eps found by bisection.
inline DomainSpec extend_domain(const DomainSpec& domain, const MetricSpec& spec, double eps,
                                int n_samples = 1024) {
    if (eps <= 0.0) throw domain_error("extension eps must be positive");

    auto offset_domain = [&](double e) -> std::optional<DomainSpec> {
        std::vector<Vec2> pts(n_samples);
        for (int i = 0; i < n_samples; ++i) {
            double t = 2.0 * std::numbers::pi * i / n_samples;
            Vec2 c = domain.curve.eval(t);
            Vec2 v = domain.curve.d1(t);
            if (e * domain.curve.curvature(t) >= 1.0) return std::nullopt;
            Vec2 nu_out = -normalized(perp(v));  // CCW: outward is the right side
            Vec2 q = c + nu_out * e;
            if (!spec.chart.contains(q)) return std::nullopt;
            pts[i] = q;
        }
        int harm = std::max<int>(24, int(domain.curve.ax.size()));
        FourierCurve fc = FourierCurve::fit(pts, harm, false);
        if (!fc.is_simple(256)) return std::nullopt;
        double scale = fc.total_length() / domain.length();
        DomainSpec d(std::move(fc), domain.gamma_a * scale, domain.gamma_b * scale);
        if (!check_strict_convexity(d, spec, 256).pass) return std::nullopt;
        return d;
    };

    if (auto d = offset_domain(eps)) return *d;

    double lo = 0.0, hi = eps;
    for (int i = 0; i < 24; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= 0) break;
        if (offset_domain(mid))
            lo = mid;
        else
            hi = mid;
    }
    throw domain_error("domain extension by eps=" + std::to_string(eps) +
                       " loses strict convexity; largest admissible eps ~= " + std::to_string(lo));
}

/// Horseshoe fixture: a thickened circular arc with semicircular caps,
/// pre-smoothed by a periodic Gaussian filter (positive kernel, so the
/// rounding cannot ring across itself at the cap joins) and projected onto
/// a finite Fourier basis. Not convex by construction.
///   radius    center radius of the arc
///   width     half thickness
///   gap_half  half opening angle of the missing sector (radians, at angle 0)
inline FourierCurve horseshoe_curve(double radius = 1.0, double width = 0.35,
                                    double gap_half = 0.85, int harmonics = 64) {
    const int N = 4096;
    std::vector<Vec2> pts;
    pts.reserve(N);
    double a0 = gap_half, a1 = 2.0 * std::numbers::pi - gap_half;
    double outer = (a1 - a0) * (radius + width);
    double inner = (a1 - a0) * (radius - width);
    double cap = std::numbers::pi * width;
    double total = outer + inner + 2.0 * cap;
    for (int i = 0; i < N; ++i) {
        double s = total * double(i) / N;
        Vec2 p;
        if (s < outer) {
            double a = a0 + s / (radius + width);
            p = {(radius + width) * std::cos(a), (radius + width) * std::sin(a)};
        } else if (s < outer + cap) {
            // far cap: from the outer-arc end (radial at a1) through the
            // tangential bulge to the inner-arc start (-radial)
            double b = (s - outer) / width;  // 0..pi
            Vec2 c{radius * std::cos(a1), radius * std::sin(a1)};
            double base = a1;
            p = c + Vec2{width * std::cos(base + b), width * std::sin(base + b)};
        } else if (s < outer + cap + inner) {
            double a = a1 - (s - outer - cap) / (radius - width);
            p = {(radius - width) * std::cos(a), (radius - width) * std::sin(a)};
        } else {
            // gap-side cap: from the inner-arc end (-radial at a0) back to
            // the outer-arc start (+radial), bulging toward the gap
            double b = (s - outer - cap - inner) / width;
            Vec2 c{radius * std::cos(a0), radius * std::sin(a0)};
            double base = a0 + std::numbers::pi;
            p = c + Vec2{width * std::cos(base + b), width * std::sin(base + b)};
        }
        pts.push_back(p);
    }
    // circular Gaussian blur, sigma in curve parameter units
    const double sigma_t = 0.04;
    int sg = int(sigma_t / (2.0 * std::numbers::pi) * N);
    int rad = 4 * sg;
    std::vector<double> kernel(std::size_t(2 * rad + 1));
    double ksum = 0.0;
    for (int k = -rad; k <= rad; ++k) {
        kernel[std::size_t(k + rad)] = std::exp(-0.5 * double(k) * double(k) / (double(sg) * sg));
        ksum += kernel[std::size_t(k + rad)];
    }
    std::vector<Vec2> smooth(N);
    for (int i = 0; i < N; ++i) {
        Vec2 acc{0, 0};
        for (int k = -rad; k <= rad; ++k)
            acc += pts[std::size_t((i + k + N) % N)] * kernel[std::size_t(k + rad)];
        smooth[std::size_t(i)] = acc / ksum;
    }
    return FourierCurve::fit(smooth, harmonics, false);
}

}  // namespace geotime

#endif  // GEOTIME_DOMAIN_HPP
