#ifndef GEOTIME_CURVE_HPP
#define GEOTIME_CURVE_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "geotime/linalg.hpp"

namespace geotime {

/// Closed planar curve stored as truncated Fourier series in a periodic
/// parameter t in [0, 2pi):
///   x(t) = ax[0] + sum_k ax[k] cos(kt) + bx[k] sin(kt)
/// and likewise for y. Derivatives are analytic; arc length queries go
/// through a cached cumulative table refined by quadrature.
class FourierCurve {
  public:
    std::vector<double> ax, bx, ay, by;  // index 0: constant term (b unused)

    FourierCurve() = default;
    FourierCurve(std::vector<double> ax_, std::vector<double> bx_,
                 std::vector<double> ay_, std::vector<double> by_)
        : ax(std::move(ax_)), bx(std::move(bx_)), ay(std::move(ay_)), by(std::move(by_)) {
        build_tables();
    }

    static FourierCurve circle(double radius, Vec2 center = {0, 0}) {
        return FourierCurve({center.x, radius}, {0, 0}, {center.y, 0}, {0, radius});
    }

    static FourierCurve ellipse(double a, double b, Vec2 center = {0, 0}) {
        return FourierCurve({center.x, a}, {0, 0}, {center.y, 0}, {0, b});
    }

    /// Least-squares projection of a sampled closed polyline onto n_harm
    /// harmonics (plain trapezoidal Fourier coefficients with an optional
    /// Lanczos sigma factor to damp Gibbs ringing at C^1 joints).
    static FourierCurve fit(const std::vector<Vec2>& samples, int n_harm, bool lanczos = true) {
        const std::size_t n = samples.size();
        std::vector<double> ax(n_harm + 1, 0.0), bx(n_harm + 1, 0.0);
        std::vector<double> ay(n_harm + 1, 0.0), by(n_harm + 1, 0.0);
        const double inv_n = 1.0 / double(n);
        for (std::size_t i = 0; i < n; ++i) {
            ax[0] += samples[i].x * inv_n;
            ay[0] += samples[i].y * inv_n;
        }
        for (int k = 1; k <= n_harm; ++k) {
            double cxk = 0, sxk = 0, cyk = 0, syk = 0;
            for (std::size_t i = 0; i < n; ++i) {
                double t = 2.0 * std::numbers::pi * double(i) * inv_n;
                double c = std::cos(k * t), s = std::sin(k * t);
                cxk += samples[i].x * c;
                sxk += samples[i].x * s;
                cyk += samples[i].y * c;
                syk += samples[i].y * s;
            }
            double sigma = 1.0;
            if (lanczos) {
                double u = std::numbers::pi * double(k) / double(n_harm + 1);
                sigma = std::sin(u) / u;
            }
            ax[k] = 2.0 * inv_n * cxk * sigma;
            bx[k] = 2.0 * inv_n * sxk * sigma;
            ay[k] = 2.0 * inv_n * cyk * sigma;
            by[k] = 2.0 * inv_n * syk * sigma;
        }
        return FourierCurve(std::move(ax), std::move(bx), std::move(ay), std::move(by));
    }

    Vec2 eval(double t) const { return {series(ax, bx, t, 0), series(ay, by, t, 0)}; }
    Vec2 d1(double t) const { return {series(ax, bx, t, 1), series(ay, by, t, 1)}; }
    Vec2 d2(double t) const { return {series(ax, bx, t, 2), series(ay, by, t, 2)}; }
    Vec2 d3(double t) const { return {series(ax, bx, t, 3), series(ay, by, t, 3)}; }

    double total_length() const { return length_total_; }

    /// Map euclidean arc length s in [0, L) to the curve parameter t.
    double t_of_s(double s) const {
        double L = length_total_;
        s = std::fmod(s, L);
        if (s < 0) s += L;
        auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
        std::size_t idx = (it == cum_.begin()) ? 0 : std::size_t(it - cum_.begin() - 1);
        double t = node_t(idx);
        double target = s - cum_[idx];
        // Newton on the running integral from the table node.
        for (int iter = 0; iter < 60; ++iter) {
            double f = arc_between(node_t(idx), t) - target;
            double df = norm(d1(t));
            double step = f / std::max(df, 1e-14);
            t -= step;
            if (std::abs(step) < 1e-14) break;
        }
        return t;
    }

    /// Euclidean arc length accumulated from t=0 to t (t reduced mod 2pi).
    double s_of_t(double t) const {
        const double two_pi = 2.0 * std::numbers::pi;
        t = std::fmod(t, two_pi);
        if (t < 0) t += two_pi;
        std::size_t idx = std::min<std::size_t>(std::size_t(t / two_pi * 4096.0), 4095);
        return cum_[idx] + arc_between(node_t(idx), t);
    }

    Vec2 point_at_s(double s) const { return eval(t_of_s(s)); }

    /// Unit euclidean tangent at arc length s.
    Vec2 tangent_at_s(double s) const { return normalized(d1(t_of_s(s))); }

    /// Signed euclidean curvature at parameter t (positive when turning
    /// left, i.e. counterclockwise).
    double curvature(double t) const {
        Vec2 v = d1(t), a = d2(t);
        double sp = norm(v);
        return cross(v, a) / (sp * sp * sp);
    }

    double curvature_at_s(double s) const { return curvature(t_of_s(s)); }

    /// Positive for counterclockwise orientation.
    double signed_area() const {
        double a = 0.0;
        const int n = 4096;
        for (int i = 0; i < n; ++i) {
            double t = 2.0 * std::numbers::pi * i / n;
            a += cross(eval(t), d1(t));
        }
        return 0.5 * a * (2.0 * std::numbers::pi / n);
    }

    void reverse() {
        // t -> -t flips orientation: sin coefficients change sign.
        for (auto& v : bx) v = -v;
        for (auto& v : by) v = -v;
        build_tables();
    }

    /// Segment-pair intersection test on a dense sampling. Adjacent
    /// segments are skipped.
    bool is_simple(int n = 512) const {
        std::vector<Vec2> p(n);
        for (int i = 0; i < n; ++i) p[i] = eval(2.0 * std::numbers::pi * i / n);
        auto seg_isect = [](Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
            auto orient = [](Vec2 u, Vec2 v, Vec2 w) { return cross(v - u, w - u); };
            double o1 = orient(a, b, c), o2 = orient(a, b, d);
            double o3 = orient(c, d, a), o4 = orient(c, d, b);
            return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
        };
        for (int i = 0; i < n; ++i) {
            for (int j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                if (seg_isect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return false;
            }
        }
        return true;
    }

    void build_tables() {
        const int K = 4096;
        cum_.assign(K + 1, 0.0);
        for (int i = 0; i < K; ++i)
            cum_[i + 1] = cum_[i] + arc_between(node_t(i), node_t(i + 1));
        length_total_ = cum_.back();
        cum_.pop_back();
    }

  private:
    std::vector<double> cum_;  // cumulative arc length at table nodes
    double length_total_ = 0.0;

    static double series(const std::vector<double>& a, const std::vector<double>& b,
                         double t, int deriv) {
        double s = (deriv == 0 && !a.empty()) ? a[0] : 0.0;
        for (std::size_t k = 1; k < a.size(); ++k) {
            double kk = double(k);
            double kp = std::pow(kk, deriv);
            double ph = kk * t + 0.5 * std::numbers::pi * deriv;
            s += kp * (a[k] * std::cos(ph) + b[k] * std::sin(ph));
        }
        return s;
    }

    double node_t(std::size_t i) const { return 2.0 * std::numbers::pi * double(i) / 4096.0; }

    /// 5-point Gauss-Legendre arc length of the parameter interval [t0, t1].
    double arc_between(double t0, double t1) const {
        static const double xg[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                                     0.538469310105683, 0.906179845938664};
        static const double wg[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                                     0.478628670499366, 0.236926885056189};
        double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
        double s = 0.0;
        for (int i = 0; i < 5; ++i) s += wg[i] * norm(d1(mid + half * xg[i]));
        return s * half;
    }
};

}  // namespace geotime

#endif  // GEOTIME_CURVE_HPP
