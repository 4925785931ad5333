#ifndef GEOTIME_SHOOTING_HPP
#define GEOTIME_SHOOTING_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "geotime/geodesic.hpp"
#include "geotime/parallel.hpp"

namespace geotime {

struct ShootOptions {
    int multistart = 64;
    double t_horizon = 0.0;      // 0: derived from chart size and conformal range
    double pos_tol = 1e-10;      // BVP residual in chart units
    double cluster_angle = 2.0 * std::numbers::pi / 180.0;
    double cluster_length = 1e-5;
    double length_tol = 1e-5;    // count-as-minimizer band above the minimum
    double stop_below = -1.0;    // early exit once a connection shorter than this is found
    IntegratorOptions integ{};

    double horizon(const MetricSpec& spec) const {
        if (t_horizon > 0.0) return t_horizon;
        static thread_local const MetricSpec* cached_spec = nullptr;
        static thread_local double cached = 0.0;
        if (cached_spec != &spec) {
            cached = 1.8 * spec.chart.diag() * conformal_range(spec).hi;
            cached_spec = &spec;
        }
        return cached;
    }
};

struct BvpBranch {
    double angle = 0.0;   // chart angle of the initial direction at p
    double length = 0.0;  // geodesic length = travel time
    Vec2 direction;       // g-unit initial direction
    double residual = 0.0;
};

struct BvpResult {
    double distance = kInfiniteTime;
    std::vector<BvpBranch> minimizers;  // all branches within length_tol of distance
    std::vector<BvpBranch> branches;    // every converged connection
    bool converged = false;
};

namespace detail {

struct ScanApproach {
    double angle;
    double t_best;
    double dist_best;
};

/// Track the closest approach of the chart geodesic from (p, angle) to q.
inline ScanApproach scan_ray(const MetricSpec& spec, const Vec2& p, double angle, const Vec2& q,
                             double horizon, const IntegratorOptions& integ) {
    Vec2 dir{std::cos(angle), std::sin(angle)};
    double n = g_norm(spec, p, dir);
    std::array<double, 4> s{p.x, p.y, dir.x / n, dir.y / n};
    ScanApproach out{angle, 0.0, norm(p - q)};
    IntegratorOptions o = integ;
    // The scan just seeds Newton; keep it cheap.
    o.abs_tol = std::max(o.abs_tol, 1e-8);
    o.rel_tol = std::max(o.rel_tol, 1e-8);
    try {
        detail::integrate<4>(spec, s, 0.0, horizon, o,
                             [&](double t0, const std::array<double, 4>& s0, double t1,
                                 const std::array<double, 4>& s1) {
                                 Vec2 a{s0[0], s0[1]}, b{s1[0], s1[1]};
                                 // distance from q to the step chord
                                 Vec2 ab = b - a;
                                 double tt = std::clamp(dot(q - a, ab) / std::max(norm2(ab), 1e-300),
                                                        0.0, 1.0);
                                 Vec2 c = a + ab * tt;
                                 double d = norm(q - c);
                                 if (d < out.dist_best) {
                                     out.dist_best = d;
                                     out.t_best = t0 + (t1 - t0) * tt;
                                 }
                                 if (!spec.chart.contains(b)) return false;
                                 return true;
                             });
    } catch (const domain_error&) {
        // ray left the chart between stages; the partial scan is enough
    } catch (const pipeline_error&) {
    }
    return out;
}

}  // namespace detail

/// Two-point distance by multistart shooting: scan a fan of initial
/// directions, Newton-polish the promising ones on the endpoint residual,
/// and cluster the converged connections. Returns the global minimum and
/// every connection within length_tol of it (the minimizer multiplicity).
inline BvpResult distance_shooting(const MetricSpec& spec, const DomainSpec& /*domain*/,
                                   const Vec2& p, const Vec2& q, const ShootOptions& opts = {}) {
    BvpResult res;
    double sep = norm(p - q);
    if (sep < 1e-13) {
        res.distance = 0.0;
        res.converged = true;
        return res;
    }

    const double horizon = opts.horizon(spec);
    const int K = std::max(4, opts.multistart);

    std::vector<detail::ScanApproach> scans(K);
    for (int k = 0; k < K; ++k)
        scans[k] = detail::scan_ray(spec, p, 2.0 * std::numbers::pi * k / K, q, horizon, opts.integ);

    // Candidates: local minima of the approach distance over the fan, plus
    // every ray that comes close in absolute terms. Near a cut tie the two
    // basins can share one scan cell, so local minima alone are not enough.
    std::vector<int> candidates;
    double best_d = 1e300;
    for (auto& s : scans) best_d = std::min(best_d, s.dist_best);
    for (int k = 0; k < K; ++k) {
        double d = scans[k].dist_best;
        bool local_min =
            d <= scans[(k + 1) % K].dist_best && d <= scans[(k + K - 1) % K].dist_best;
        bool close = d < std::max(5.0 * best_d, 2e-3);
        if ((local_min && d < std::max(0.35 * horizon * 0.25, 8.0 * best_d + 1e-6)) || close)
            candidates.push_back(k);
    }
    if (candidates.size() > 24) {
        std::sort(candidates.begin(), candidates.end(),
                  [&](int a, int b) { return scans[a].dist_best < scans[b].dist_best; });
        candidates.resize(24);
    }

    auto endpoint = [&](double angle, double t) {
        Vec2 dir{std::cos(angle), std::sin(angle)};
        double n = g_norm(spec, p, dir);
        return flow(spec, UnitVectorAt{p, dir * (1.0 / n)}, t, opts.integ);
    };

    for (int k : candidates) {
        double angle = scans[k].angle;
        double t = std::max(scans[k].t_best, 1e-6);
        bool ok = false;
        double res_norm = 1e300;
        for (int it = 0; it < 30; ++it) {
            GeodesicSample e;
            try {
                e = endpoint(angle, t);
            } catch (const domain_error&) {
                break;  // stepped out of the chart
            }
            Vec2 f = e.point - q;
            res_norm = norm(f);
            if (res_norm <= opts.pos_tol) {
                ok = true;
                break;
            }
            double dth = 1e-7;
            GeodesicSample ep;
            try {
                ep = endpoint(angle + dth, t);
            } catch (const domain_error&) {
                break;
            }
            Vec2 col_t = e.velocity;
            Vec2 col_a = (ep.point - e.point) / dth;
            Mat2 J{col_a.x, col_t.x, col_a.y, col_t.y};
            double dj = det(J);
            if (std::abs(dj) < 1e-14) break;
            Vec2 step = inverse(J) * f;
            // damped update, angle step capped to stay in the basin
            double cap = 0.35;
            if (std::abs(step.x) > cap) step = step * (cap / std::abs(step.x));
            if (t - step.y <= 0.0) step.y = t - 1e-9;
            angle -= step.x;
            t -= step.y;
            if (t > horizon) t = horizon;
        }
        if (!ok) continue;
        Vec2 dir{std::cos(angle), std::sin(angle)};
        double n = g_norm(spec, p, dir);
        res.branches.push_back({angle, t, dir * (1.0 / n), res_norm});
        if (opts.stop_below > 0.0 && t < opts.stop_below) break;
    }

    if (res.branches.empty()) {
        res.converged = false;
        return res;
    }

    // cluster: same connection found from nearby starts
    std::sort(res.branches.begin(), res.branches.end(),
              [](const BvpBranch& a, const BvpBranch& b) { return a.length < b.length; });
    std::vector<BvpBranch> unique;
    for (auto& b : res.branches) {
        bool dup = false;
        for (auto& u : unique) {
            double da = std::abs(std::remainder(b.angle - u.angle, 2.0 * std::numbers::pi));
            if (da < opts.cluster_angle && std::abs(b.length - u.length) < std::max(opts.cluster_length, 1e-7))
                dup = true;
        }
        if (!dup) unique.push_back(b);
    }
    res.branches = unique;
    res.converged = true;
    res.distance = res.branches.front().length;
    for (auto& b : res.branches)
        if (b.length <= res.distance + opts.length_tol) res.minimizers.push_back(b);
    return res;
}

enum class CutKind { boundary_hit, typical, conjugate, atypical };

inline const char* to_string(CutKind k) {
    switch (k) {
        case CutKind::boundary_hit: return "boundary_hit";
        case CutKind::typical: return "typical";
        case CutKind::conjugate: return "conjugate";
        case CutKind::atypical: return "atypical";
    }
    return "?";
}

struct CutPointRecord {
    UnitVectorAt direction;
    double cut_time = kInfiniteTime;
    double exit_time = kInfiniteTime;
    double conjugate_time = kInfiniteTime;
    CutKind kind = CutKind::boundary_hit;
    int minimizer_count = 1;
    Vec2 cut_point;
};

struct CutOptions {
    double tol_cut = 1e-8;      // slack in the minimization deficit predicate
    double bisect_tol = 1e-7;   // bisection tolerance on the cut time
    double tol_match = 1e-3;    // |cut - conjugate| classification window
    double tie_tol = 1e-6;      // cut-vs-exit tie: classified boundary_hit
    int threads = 1;
    ShootOptions shoot{};
};

/// Cut time of the geodesic from init: the largest t with d(p, gamma(t)) = t.
/// Evaluated in the extended domain so that a geodesic which merely reaches
/// the boundary while still minimizing is reported as boundary_hit rather
/// than as a cut point.
inline CutPointRecord cut_time(const MetricSpec& spec, const DomainSpec& domain,
                               const DomainSpec& extended, const UnitVectorAt& init,
                               const CutOptions& opts = {}) {
    CutPointRecord rec;
    rec.direction = init;

    IntegratorOptions io = opts.shoot.integ;
    io.record_samples = false;
    double horizon = opts.shoot.horizon(spec);
    rec.exit_time = shoot(spec, domain, init, horizon, io).exit_time;
    if (!std::isfinite(rec.exit_time))
        throw pipeline_error("cut_time: trapped geodesic, no exit before horizon");
    double ext_exit = shoot(spec, extended, init, horizon, io).exit_time;
    if (!std::isfinite(ext_exit)) ext_exit = horizon;

    // deficit(t) > 0 means a strictly shorter connection exists
    auto has_shortcut = [&](double t) {
        Vec2 qt = flow(spec, init, t, io).point;
        ShootOptions so = opts.shoot;
        so.stop_below = t - opts.tol_cut;
        BvpResult r = distance_shooting(spec, domain, init.base, qt, so);
        if (!r.converged)
            throw pipeline_error("cut_time: shooting oracle failed along the ray");
        return r.distance < t - opts.tol_cut;
    };

    double t_hi = ext_exit * (1.0 - 1e-9);
    if (!has_shortcut(t_hi)) {
        // minimizing through the whole extension: tau_cut_ext >= ext_exit > exit
        rec.kind = CutKind::boundary_hit;
        rec.cut_time = rec.exit_time;
        rec.cut_point = flow(spec, init, rec.exit_time, io).point;
        return rec;
    }

    double lo = 0.0, hi = t_hi;
    while (hi - lo > opts.bisect_tol) {
        double mid = 0.5 * (lo + hi);
        if (has_shortcut(mid)) hi = mid; else lo = mid;
    }
    double tau_cut_ext = 0.5 * (lo + hi);

    if (tau_cut_ext > rec.exit_time + opts.tie_tol) {
        rec.kind = CutKind::boundary_hit;
        rec.cut_time = rec.exit_time;
        rec.cut_point = flow(spec, init, rec.exit_time, io).point;
        return rec;
    }

    rec.cut_time = std::min(tau_cut_ext, rec.exit_time);
    rec.cut_point = flow(spec, init, rec.cut_time, io).point;
    rec.conjugate_time = conjugate_time(spec, extended, init, rec.cut_time + 10.0 * opts.tol_match, io);

    // multiplicity at the cut endpoint; look slightly past the cut when the
    // equal-length branches have not separated yet at this tolerance
    ShootOptions so = opts.shoot;
    so.length_tol = std::max(so.length_tol, 10.0 * opts.bisect_tol);
    BvpResult at_cut = distance_shooting(spec, domain, init.base, rec.cut_point, so);
    int count = at_cut.converged ? int(at_cut.minimizers.size()) : 1;
    if (count <= 1) {
        double t_plus = std::min(rec.cut_time + std::max(1e-4, 5.0 * opts.bisect_tol), rec.exit_time);
        Vec2 q_plus = flow(spec, init, t_plus, io).point;
        BvpResult past = distance_shooting(spec, domain, init.base, q_plus, so);
        if (past.converged) count = std::max(count, int(past.minimizers.size()));
    }
    rec.minimizer_count = count;

    if (std::isfinite(rec.conjugate_time) &&
        std::abs(rec.cut_time - rec.conjugate_time) <= opts.tol_match)
        rec.kind = CutKind::conjugate;
    else if (count >= 3)
        rec.kind = CutKind::atypical;
    else
        rec.kind = CutKind::typical;
    return rec;
}

/// Cut records over a uniform fan of directions; only genuine cut points
/// (kind != boundary_hit) are returned.
inline std::vector<CutPointRecord> cut_locus_sample(const MetricSpec& spec, const DomainSpec& domain,
                                                    const DomainSpec& extended, const Vec2& p,
                                                    int n_directions, const CutOptions& opts = {}) {
    if (n_directions < 8) throw domain_error("cut_locus_sample needs at least 8 directions");
    std::vector<CutPointRecord> out(n_directions);
    parallel_for(std::size_t(n_directions), [&](std::size_t k) {
        double a = 2.0 * std::numbers::pi * double(k) / n_directions;
        UnitVectorAt init = make_unit(spec, p, {std::cos(a), std::sin(a)});
        out[k] = cut_time(spec, domain, extended, init, opts);
    }, opts.threads);
    std::vector<CutPointRecord> cuts;
    for (auto& r : out)
        if (r.kind != CutKind::boundary_hit) cuts.push_back(r);
    return cuts;
}

}  // namespace geotime

#endif  // GEOTIME_SHOOTING_HPP
