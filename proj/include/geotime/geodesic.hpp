#ifndef GEOTIME_GEODESIC_HPP
#define GEOTIME_GEODESIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "geotime/domain.hpp"
#include "geotime/linalg.hpp"
#include "geotime/metric.hpp"

namespace geotime {

constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

struct UnitVectorAt {
    Vec2 base;
    Vec2 direction;  // g-norm 1
};

inline UnitVectorAt make_unit(const MetricSpec& spec, const Vec2& base, const Vec2& dir) {
    double n = g_norm(spec, base, dir);
    if (n <= 0.0) throw domain_error("cannot normalize a zero direction");
    return {base, dir / n};
}

struct GeodesicSample {
    double t;
    Vec2 point;
    Vec2 velocity;
};

enum class GeodesicStatus { exited, trapped_horizon_reached };

struct GeodesicRecord {
    UnitVectorAt initial;
    std::vector<GeodesicSample> samples;
    double exit_time = kInfiniteTime;
    double conjugate_time = kInfiniteTime;
    GeodesicStatus status = GeodesicStatus::trapped_horizon_reached;
};

struct IntegratorOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double tol_event = 1e-10;  // bisection tolerance in t for boundary hits
    double max_step = 0.0;     // 0: derived from the chart size
    long max_steps = 2000000;
    bool record_samples = true;
};

namespace detail {

/// Geodesic state (x, y, vx, vy), optionally extended by the scalar Jacobi
/// pair (j, jdot) driven by the Gauss curvature along the trajectory.
template <int N>
struct OdeState {
    std::array<double, N> v{};
};

template <int N>
inline void geodesic_rhs(const MetricSpec& spec, const std::array<double, N>& s,
                         std::array<double, N>& out) {
    Vec2 p{s[0], s[1]};
    Vec2 v{s[2], s[3]};
    Christoffel c = christoffel(spec, p);
    out[0] = v.x;
    out[1] = v.y;
    out[2] = -(c.G[0][0][0] * v.x * v.x + 2.0 * c.G[0][0][1] * v.x * v.y + c.G[0][1][1] * v.y * v.y);
    out[3] = -(c.G[1][0][0] * v.x * v.x + 2.0 * c.G[1][0][1] * v.x * v.y + c.G[1][1][1] * v.y * v.y);
    if constexpr (N == 6) {
        double K = gauss_curvature(spec, p);
        out[4] = s[5];
        out[5] = -K * s[4];
    }
}

// Dormand-Prince 5(4) coefficients.
struct DP45 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

/// One embedded DP45 step from (t, s) with step h. Returns the error
/// estimate (max-norm scaled). k1 must hold the derivative at s (FSAL).
template <int N>
inline double dp45_step(const MetricSpec& spec, std::array<double, N>& s, double h,
                        std::array<double, N>& k1, const IntegratorOptions& opts) {
    using T = DP45;
    std::array<double, N> k2, k3, k4, k5, k6, k7, y;
    auto axpy = [&](std::array<double, N>& out, std::initializer_list<std::pair<double, const std::array<double, N>*>> terms) {
        for (int i = 0; i < N; ++i) {
            double acc = s[i];
            for (auto& [c, k] : terms) acc += h * c * (*k)[i];
            out[i] = acc;
        }
    };
    axpy(y, {{T::a21, &k1}});
    geodesic_rhs<N>(spec, y, k2);
    axpy(y, {{T::a31, &k1}, {T::a32, &k2}});
    geodesic_rhs<N>(spec, y, k3);
    axpy(y, {{T::a41, &k1}, {T::a42, &k2}, {T::a43, &k3}});
    geodesic_rhs<N>(spec, y, k4);
    axpy(y, {{T::a51, &k1}, {T::a52, &k2}, {T::a53, &k3}, {T::a54, &k4}});
    geodesic_rhs<N>(spec, y, k5);
    axpy(y, {{T::a61, &k1}, {T::a62, &k2}, {T::a63, &k3}, {T::a64, &k4}, {T::a65, &k5}});
    geodesic_rhs<N>(spec, y, k6);
    axpy(y, {{T::b1, &k1}, {T::b3, &k3}, {T::b4, &k4}, {T::b5, &k5}, {T::b6, &k6}});
    geodesic_rhs<N>(spec, y, k7);

    double err = 0.0;
    for (int i = 0; i < N; ++i) {
        double e = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                        T::e6 * k6[i] + T::e7 * k7[i]);
        double scale = opts.abs_tol + opts.rel_tol * std::max(std::abs(s[i]), std::abs(y[i]));
        err = std::max(err, std::abs(e) / scale);
    }
    if (err <= 1.0) {
        s = y;
        k1 = k7;  // FSAL
    }
    return err;
}

/// Adaptive integration of the geodesic system with a per-step callback.
/// The callback sees (t_prev, s_prev, t_new, s_new) after each accepted
/// step and returns false to stop.
template <int N, typename Cb>
inline void integrate(const MetricSpec& spec, std::array<double, N>& s, double t0, double t1,
                      const IntegratorOptions& opts, Cb&& cb) {
    double t = t0;
    std::array<double, N> k1;
    geodesic_rhs<N>(spec, s, k1);
    // Keep stage points from overshooting the chart and keep boundary
    // crossings resolvable by the per-step event check.
    const double h_cap = opts.max_step > 0.0 ? opts.max_step : 0.04 * spec.chart.diag();
    double h = std::min(1e-3, (t1 - t0) * 0.25);
    long steps = 0;
    while (t1 - t > 1e-14 * std::max(1.0, std::abs(t1))) {
        if (++steps > opts.max_steps)
            throw pipeline_error("geodesic integration exceeded max step count");
        double h_try = std::min({h, t1 - t, h_cap});
        if (h_try < 1e-15 * std::max(1.0, std::abs(t)))
            throw pipeline_error("geodesic integrator step size underflow at t=" + std::to_string(t));
        h = h_try;
        std::array<double, N> s_prev = s;
        std::array<double, N> k_prev = k1;
        double err = dp45_step<N>(spec, s, h, k1, opts);
        if (err <= 1.0) {
            double t_prev = t;
            t += h;
            if (!cb(t_prev, s_prev, t, s)) return;
            double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            h *= std::min(5.0, grow);
        } else {
            s = s_prev;
            k1 = k_prev;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
}

/// Fixed-step RK4 used for short re-integrations inside event bisection.
template <int N>
inline void rk4_span(const MetricSpec& spec, std::array<double, N>& s, double dt, int substeps) {
    double h = dt / substeps;
    std::array<double, N> k1, k2, k3, k4, y;
    for (int step = 0; step < substeps; ++step) {
        geodesic_rhs<N>(spec, s, k1);
        for (int i = 0; i < N; ++i) y[i] = s[i] + 0.5 * h * k1[i];
        geodesic_rhs<N>(spec, y, k2);
        for (int i = 0; i < N; ++i) y[i] = s[i] + 0.5 * h * k2[i];
        geodesic_rhs<N>(spec, y, k3);
        for (int i = 0; i < N; ++i) y[i] = s[i] + h * k3[i];
        geodesic_rhs<N>(spec, y, k4);
        for (int i = 0; i < N; ++i) s[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
}

}  // namespace detail

/// Integrate the geodesic from init until it leaves the domain or t_max is
/// reached. The boundary hit is located by bisection (re-integration over
/// the bracketing step) to opts.tol_event in t.
inline GeodesicRecord shoot(const MetricSpec& spec, const DomainSpec& domain,
                            const UnitVectorAt& init, double t_max,
                            const IntegratorOptions& opts = {}) {
    GeodesicRecord rec;
    rec.initial = init;

    std::array<double, 4> s{init.base.x, init.base.y, init.direction.x, init.direction.y};
    if (opts.record_samples)
        rec.samples.push_back({0.0, init.base, init.direction});

    // Starting on the boundary: stay unarmed until the ray is clearly
    // interior, so the launch point itself does not count as an exit.
    bool armed = domain.gap(init.base) < -1e-7;
    bool found = false;
    double bracket_t0 = 0.0, bracket_t1 = 0.0;
    std::array<double, 4> bracket_state{};

    detail::integrate<4>(spec, s, 0.0, t_max, opts, [&](double t0, const std::array<double, 4>& s0,
                                                        double t1, const std::array<double, 4>& s1) {
        Vec2 p1{s1[0], s1[1]};
        double gap1 = domain.gap(p1);
        if (!armed) {
            if (gap1 < -1e-7) armed = true;
            if (gap1 > 1e-7 && t1 > 1e-4)
                throw domain_error("shoot: initial direction leaves the domain immediately");
        } else if (gap1 >= 0.0) {
            found = true;
            bracket_t0 = t0;
            bracket_t1 = t1;
            bracket_state = s0;
            return false;
        }
        if (opts.record_samples) rec.samples.push_back({t1, p1, Vec2{s1[2], s1[3]}});
        return true;
    });

    if (!found) {
        rec.status = GeodesicStatus::trapped_horizon_reached;
        rec.exit_time = kInfiniteTime;
        return rec;
    }

    // Bisect the bracketing step; each probe re-integrates from the stored
    // step start with fixed RK4 substeps.
    double lo = bracket_t0, hi = bracket_t1;
    std::array<double, 4> s_at_lo = bracket_state;
    while (hi - lo > opts.tol_event) {
        double mid = 0.5 * (lo + hi);
        std::array<double, 4> sm = s_at_lo;
        detail::rk4_span<4>(spec, sm, mid - lo, 8);
        if (domain.gap(Vec2{sm[0], sm[1]}) < 0.0) {
            lo = mid;
            s_at_lo = sm;
        } else {
            hi = mid;
        }
    }
    std::array<double, 4> s_exit = s_at_lo;
    detail::rk4_span<4>(spec, s_exit, hi - lo, 4);
    rec.exit_time = hi;
    rec.status = GeodesicStatus::exited;
    if (opts.record_samples)
        rec.samples.push_back({hi, Vec2{s_exit[0], s_exit[1]}, Vec2{s_exit[2], s_exit[3]}});
    rec.samples.shrink_to_fit();
    return rec;
}

/// Point and velocity of the geodesic at a fixed time, integrating in the
/// chart without any boundary event.
inline GeodesicSample flow(const MetricSpec& spec, const UnitVectorAt& init, double t,
                           const IntegratorOptions& opts = {}) {
    std::array<double, 4> s{init.base.x, init.base.y, init.direction.x, init.direction.y};
    if (t > 0)
        detail::integrate<4>(spec, s, 0.0, t, opts,
                             [](double, const std::array<double, 4>&, double,
                                const std::array<double, 4>&) { return true; });
    return {t, Vec2{s[0], s[1]}, Vec2{s[2], s[3]}};
}

inline double exit_time(const MetricSpec& spec, const DomainSpec& domain, const UnitVectorAt& init,
                        double t_max, const IntegratorOptions& opts = {}) {
    IntegratorOptions o = opts;
    o.record_samples = false;
    return shoot(spec, domain, init, t_max, o).exit_time;
}

/// exp_p(w) = gamma_{p, w/|w|}(|w|_g). Requires |w|_g within the exit time.
inline Vec2 exp_map(const MetricSpec& spec, const DomainSpec& domain, const Vec2& p, const Vec2& w,
                    const IntegratorOptions& opts = {}) {
    double wn = g_norm(spec, p, w);
    if (wn == 0.0) return p;
    UnitVectorAt init{p, w / wn};
    IntegratorOptions o = opts;
    o.record_samples = false;
    double te = shoot(spec, domain, init, wn * (1.0 + 1e-9) + 1e-12, o).exit_time;
    if (wn > te + 10.0 * o.tol_event)
        throw domain_error("exp_map: |w|_g = " + std::to_string(wn) +
                           " exceeds exit time " + std::to_string(te));
    return flow(spec, init, wn, o).point;
}

/// First zero of the scalar Jacobi field j'' + K(gamma(t)) j = 0 with
/// j(0) = 0, j'(0) = 1, integrated along the geodesic within the chart.
/// Zero located by sign-change bisection to 1e-8; +inf when none occurs
/// before t_max or the trajectory leaves the chart.
inline double conjugate_time(const MetricSpec& spec, const DomainSpec& /*domain*/,
                             const UnitVectorAt& init, double t_max,
                             const IntegratorOptions& opts = {}) {
    std::array<double, 6> s{init.base.x, init.base.y, init.direction.x, init.direction.y, 0.0, 1.0};
    bool found = false;
    double lo = 0.0, hi = 0.0;
    std::array<double, 6> s_lo{};
    const Rect& chart = spec.chart;
    const double pad = 1e-9;
    try {
        detail::integrate<6>(spec, s, 0.0, t_max, opts,
                             [&](double t0, const std::array<double, 6>& s0, double t1,
                                 const std::array<double, 6>& s1) {
                                 Vec2 p{s1[0], s1[1]};
                                 if (p.x < chart.xmin + pad || p.x > chart.xmax - pad ||
                                     p.y < chart.ymin + pad || p.y > chart.ymax - pad)
                                     return false;  // left the chart: stop scanning
                                 if (t0 > 0.0 && s0[4] > 0.0 && s1[4] <= 0.0) {
                                     found = true;
                                     lo = t0;
                                     hi = t1;
                                     s_lo = s0;
                                     return false;
                                 }
                                 return true;
                             });
    } catch (const domain_error&) {
        // chart exit between steps; treat as no conjugate point found
    }
    if (!found) return kInfiniteTime;
    while (hi - lo > 1e-8) {
        double mid = 0.5 * (lo + hi);
        std::array<double, 6> sm = s_lo;
        detail::rk4_span<6>(spec, sm, mid - lo, 8);
        if (sm[4] > 0.0) {
            lo = mid;
            s_lo = sm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Tangential projection of an inward unit vector at a boundary frame:
/// h(v) = v - <v, nu>_g nu. The g-norm of the result is < 1.
inline Vec2 project_h(const MetricSpec& spec, const BoundaryFrame& frame, const Vec2& v) {
    double vn = dot(v, metric_at(spec, frame.point) * frame.inward_normal);
    if (vn <= 0.0)
        throw domain_error("project_h requires an inward-pointing vector");
    Vec2 h = v - frame.inward_normal * vn;
    return h;
}

/// Inverse of project_h: recovers the inward unit vector with normal
/// component +sqrt(1 - |h|_g^2) on the inward normal.
inline Vec2 unproject_h(const MetricSpec& spec, const BoundaryFrame& frame, const Vec2& h) {
    double hn2 = dot(h, metric_at(spec, frame.point) * h);
    if (hn2 >= 1.0)
        throw domain_error("unproject_h: tangential part must have g-norm < 1");
    return h + frame.inward_normal * std::sqrt(1.0 - hn2);
}

/// Scalar forms used by the reconstruction side (n = 2): the tangential
/// component is a multiple of the boundary tangent.
inline double project_h_scalar(const MetricSpec& spec, const BoundaryFrame& frame, const Vec2& v) {
    Vec2 h = project_h(spec, frame, v);
    return dot(h, metric_at(spec, frame.point) * frame.tangent);
}

inline Vec2 unproject_h_scalar(const MetricSpec& spec, const BoundaryFrame& frame, double c) {
    return unproject_h(spec, frame, frame.tangent * c);
}

}  // namespace geotime

#endif  // GEOTIME_GEODESIC_HPP
