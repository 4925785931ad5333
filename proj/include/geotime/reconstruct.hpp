#ifndef GEOTIME_RECONSTRUCT_HPP
#define GEOTIME_RECONSTRUCT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "geotime/dataset.hpp"
#include "geotime/linalg.hpp"
#include "geotime/parallel.hpp"

namespace geotime {

// Everything in this header is blind: it sees only the dataset matrix, the
// abstract sensor parameters and the declared sampling scales.

struct ReconOptions {
    int v_grid = 33;
    double v_cap = 0.97;        // |v| beyond this is too grazing to trust
    double tol_grad = 0.0;      // 0: 4 * mean sensor spacing in u
    double kappa_spike = 8.0;   // smoothness screen, multiples of the row median
    double kappa_cont = 0.0;    // 0: 2 * tol_grad
    int knn_continuity = 4;
    double tol_T = 0.0;         // 0: 3 * declared h_src
    double c_jump = 0.0;        // 0: 0.6 * declared collar depth
    double delta_id = 1e-7;     // boundary-trace row identification threshold
    int h_neighbors = 18;
    int h_min_neighbors = 5;
    double min_cov_angle_deg = 5.0;
    int threads = 1;

    double tol_grad_eff(const TravelTimeDataset& ds) const {
        if (tol_grad > 0) return tol_grad;
        double du = (ds.sensor_u.back() - ds.sensor_u.front()) / double(ds.m - 1);
        return 4.0 * du;
    }
    double kappa_cont_eff(const TravelTimeDataset& ds) const {
        return kappa_cont > 0 ? kappa_cont : 2.0 * tol_grad_eff(ds);
    }
    double tol_T_eff(const TravelTimeDataset& ds) const {
        if (tol_T > 0) return tol_T;
        return ds.h_src > 0 ? 3.0 * ds.h_src : 0.1;
    }
    double c_jump_eff(const TravelTimeDataset& ds) const {
        if (c_jump > 0) return c_jump;
        if (ds.collar_depth > 0) return 0.6 * ds.collar_depth;
        return ds.h_src > 0 ? 0.5 * ds.h_src : 0.05;
    }
};

// ---------------------------------------------------------------------------
// Stage 1: intrinsic geometry of the measurement arc
// ---------------------------------------------------------------------------

/// Recovered speed lambda(u) = |dz/du|_g of the sensor curve, estimated from
/// the rows of sources that sit on the sensors themselves (their travel
/// times vanish at exactly one sensor).
struct GammaGeometry {
    std::vector<double> u;
    std::vector<double> lambda;
    std::vector<long> gamma_row;    // per sensor: coincident source row or -1
    std::vector<long> gamma_rows;   // every boundary-trace row
    std::vector<int> row_sensor;    // sensor index for each gamma row

    bool is_gamma_row(long i) const {
        return std::find(gamma_rows.begin(), gamma_rows.end(), i) != gamma_rows.end();
    }

    /// Recovered arc length between sensors j and k (trapezoid in u).
    double arc_between(int j, int k) const {
        if (j > k) std::swap(j, k);
        double acc = 0.0;
        for (int l = j; l < k; ++l)
            acc += 0.5 * (lambda[l] + lambda[l + 1]) * (u[l + 1] - u[l]);
        return acc;
    }
};

inline GammaGeometry recover_gamma_metric(const TravelTimeDataset& ds, const ReconOptions& opts = {}) {
    GammaGeometry gg;
    gg.u = ds.sensor_u;
    gg.lambda.assign(ds.m, 0.0);
    gg.gamma_row.assign(ds.m, -1);

    for (long i = 0; i < ds.N; ++i) {
        int hits = 0, arg = -1;
        for (int j = 0; j < ds.m; ++j)
            if (std::abs(ds.at(i, j)) <= opts.delta_id) {
                ++hits;
                arg = j;
            }
        if (hits == 1) {
            gg.gamma_rows.push_back(i);
            gg.row_sensor.push_back(arg);
            if (gg.gamma_row[arg] < 0) gg.gamma_row[arg] = i;
        }
    }

    int have = 0;
    for (int j = 0; j < ds.m; ++j)
        if (gg.gamma_row[j] >= 0) ++have;
    if (have * 2 < ds.m)
        throw pipeline_error("gamma metric recovery needs boundary-trace rows at half the sensors, found " +
                             std::to_string(have) + " of " + std::to_string(ds.m));

    // One-sided difference quotients of u -> r at the coincident sensor,
    // Richardson-extrapolated over the single and double stencil width.
    auto one_sided = [&](long row, int j, int dir) -> double {
        int j1 = j + dir, j2 = j + 2 * dir;
        if (j1 < 0 || j1 >= ds.m) return std::numeric_limits<double>::quiet_NaN();
        double d1 = std::abs(gg.u[j1] - gg.u[j]);
        double q1 = ds.at(row, j1) / d1;
        if (j2 < 0 || j2 >= ds.m) return q1;
        double d2 = std::abs(gg.u[j2] - gg.u[j]);
        double q2 = ds.at(row, j2) / d2;
        return (d2 * q1 - d1 * q2) / (d2 - d1);
    };

    for (int j = 0; j < ds.m; ++j) {
        long row = gg.gamma_row[j];
        if (row < 0) continue;
        double right = one_sided(row, j, +1);
        double left = one_sided(row, j, -1);
        if (std::isfinite(right) && std::isfinite(left))
            gg.lambda[j] = 0.5 * (right + left);
        else
            gg.lambda[j] = std::isfinite(right) ? right : left;
    }
    // sensors without a coincident row: linear interpolation in u
    for (int j = 0; j < ds.m; ++j) {
        if (gg.gamma_row[j] >= 0) continue;
        int l = j - 1, r = j + 1;
        while (l >= 0 && gg.gamma_row[l] < 0) --l;
        while (r < ds.m && gg.gamma_row[r] < 0) ++r;
        if (l >= 0 && r < ds.m) {
            double f = (gg.u[j] - gg.u[l]) / (gg.u[r] - gg.u[l]);
            gg.lambda[j] = gg.lambda[l] * (1 - f) + gg.lambda[r] * f;
        } else if (l >= 0) {
            gg.lambda[j] = gg.lambda[l];
        } else {
            gg.lambda[j] = gg.lambda[r];
        }
    }
    for (double l : gg.lambda)
        if (!(l > 0)) throw pipeline_error("recovered gamma speed must be positive");
    return gg;
}

// ---------------------------------------------------------------------------
// Stage 2: boundary gradients of the travel time functions
// ---------------------------------------------------------------------------

/// Tangential derivative of u -> times[i][.] at each sensor, normalized by
/// the recovered speed, with a second-difference spike screen marking the
/// sensors where the row fails to be smooth (cut locus on the arc).
struct GradientTable {
    int m = 0;
    std::vector<double> val;         // N x m, NaN at the ends
    std::vector<std::uint8_t> flag;  // N x m
    std::vector<double> spike;       // N x m, |second difference|
    std::vector<double> threshold;   // per row

    double v(long i, int j) const { return val[std::size_t(i) * m + j]; }
    bool ok(long i, int j) const { return flag[std::size_t(i) * m + j] != 0; }
    double margin(long i, int j) const {
        return (threshold[std::size_t(i)] - spike[std::size_t(i) * m + j]) /
               std::max(threshold[std::size_t(i)], 1e-300);
    }
};

inline GradientTable boundary_gradients(const TravelTimeDataset& ds, const GammaGeometry& gg,
                                        const ReconOptions& opts = {}) {
    GradientTable t;
    t.m = ds.m;
    const std::size_t total = std::size_t(ds.N) * ds.m;
    t.val.assign(total, std::numeric_limits<double>::quiet_NaN());
    t.flag.assign(total, 0);
    t.spike.assign(total, 0.0);
    t.threshold.assign(std::size_t(ds.N), 0.0);

    for (long i = 0; i < ds.N; ++i) {
        std::vector<double> sp;
        sp.reserve(std::size_t(ds.m));
        for (int j = 1; j + 1 < ds.m; ++j) {
            double d2 = ds.at(i, j + 1) - 2.0 * ds.at(i, j) + ds.at(i, j - 1);
            t.spike[std::size_t(i) * ds.m + j] = std::abs(d2);
            sp.push_back(std::abs(d2));
        }
        std::sort(sp.begin(), sp.end());
        double med = sp.empty() ? 0.0 : sp[sp.size() / 2];
        double thr = std::max(opts.kappa_spike * med, 6.0 * ds.oracle_tol);
        t.threshold[std::size_t(i)] = thr;
        for (int j = 1; j + 1 < ds.m; ++j) {
            double du = gg.u[j + 1] - gg.u[j - 1];
            double grad = (ds.at(i, j + 1) - ds.at(i, j - 1)) / du / gg.lambda[j];
            std::size_t idx = std::size_t(i) * ds.m + j;
            t.val[idx] = grad;
            t.flag[idx] = (t.spike[idx] <= thr && std::isfinite(grad)) ? 1 : 0;
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Stage 3: ray sets and their maximal travel times
// ---------------------------------------------------------------------------

/// Sources whose boundary gradient at sensor j matches the tangential
/// direction value -v: the discrete trace of the geodesic ray (z_j, v).
/// t_sup realizes the data-side cut time of that ray.
struct RaySet {
    int sensor = -1;
    double v = 0.0;
    std::vector<long> members;
    double t_sup = 0.0;
    long argmax = -1;
    double top_gap = 0.0;  // t_sup minus the runner-up member time
    bool thin = true;
};

inline RaySet build_ray_set(const TravelTimeDataset& ds, const GammaGeometry& gg,
                            const GradientTable& grads, int j, double v,
                            const ReconOptions& opts = {}) {
    RaySet rs;
    rs.sensor = j;
    rs.v = v;
    const double tol = opts.tol_grad_eff(ds);
    std::vector<long> cand;
    for (long i = 0; i < ds.N; ++i) {
        if (!grads.ok(i, j)) continue;
        double g = grads.v(i, j);
        if (std::abs(g + v) <= tol) cand.push_back(i);
    }

    // Discrete continuity screen: a member's gradient must agree with its
    // nearest co-members in the sup-norm embedding. Candidates are ordered
    // along the ray by their time at this sensor, which bounds the search
    // to a small window.
    const int k = opts.knn_continuity;
    const double kc = opts.kappa_cont_eff(ds);
    std::vector<long> keep;
    if (int(cand.size()) <= k + 1) {
        keep = cand;
    } else {
        std::vector<long> order = cand;
        std::sort(order.begin(), order.end(),
                  [&](long a, long b) { return ds.at(a, j) < ds.at(b, j); });
        std::vector<std::size_t> pos(order.size());
        for (std::size_t q = 0; q < order.size(); ++q) pos[q] = q;
        for (std::size_t q = 0; q < order.size(); ++q) {
            long i = order[q];
            // window of 2k time-neighbors, refined by sup-norm
            std::vector<std::pair<double, long>> win;
            for (int d = -2 * k; d <= 2 * k; ++d) {
                long qq = long(q) + d;
                if (d == 0 || qq < 0 || qq >= long(order.size())) continue;
                win.push_back({ds.sup_gap(i, order[std::size_t(qq)]), order[std::size_t(qq)]});
            }
            std::sort(win.begin(), win.end());
            double worst = 0.0;
            for (int n = 0; n < k && n < int(win.size()); ++n)
                worst = std::max(worst, std::abs(grads.v(i, j) - grads.v(win[std::size_t(n)].second, j)));
            if (worst <= kc) keep.push_back(i);
        }
    }
    rs.members = keep;

    // the sensor's own trace row anchors the near end of the ray
    long own = gg.gamma_row[j];
    if (own >= 0 && std::find(rs.members.begin(), rs.members.end(), own) == rs.members.end())
        rs.members.push_back(own);

    rs.thin = int(rs.members.size()) < 4;
    double best = -1.0, second = -1.0;
    for (long i : rs.members) {
        double r = ds.at(i, j);
        if (r > best) {
            second = best;
            best = r;
            rs.argmax = i;
        } else if (r > second) {
            second = r;
        }
    }
    rs.t_sup = std::max(best, 0.0);
    rs.top_gap = (second >= 0.0) ? best - second : best;
    return rs;
}

inline std::vector<double> direction_grid(const ReconOptions& opts) {
    std::vector<double> vs(std::size_t(opts.v_grid));
    for (int a = 0; a < opts.v_grid; ++a)
        vs[std::size_t(a)] = -opts.v_cap + 2.0 * opts.v_cap * double(a) / double(opts.v_grid - 1);
    return vs;
}

// ---------------------------------------------------------------------------
// Stage 4: boundary membership
// ---------------------------------------------------------------------------

struct BoundaryDecision {
    bool boundary = false;
    bool via_trace = false;   // identified as a sensor-coincident row
    int sensor = -1;          // witness sensor
    double v = 0.0;           // witness direction
    double jump = 0.0;        // how far the row sticks out of its ray set
};

/// A source is on the boundary when some ray set ends at it: it attains the
/// maximal time of the set and beats the runner-up by a jump that sampling
/// of an interior continuum cannot produce. Interior sources are always
/// trailed by deeper members at the sampling scale; boundary sources have
/// nothing beyond them.
inline BoundaryDecision classify_boundary(const TravelTimeDataset& ds, const GammaGeometry& gg,
                                          const GradientTable& grads, long i,
                                          const ReconOptions& opts = {}) {
    BoundaryDecision d;
    if (gg.is_gamma_row(i)) {
        d.boundary = true;
        d.via_trace = true;
        return d;
    }
    const double c_jump = opts.c_jump_eff(ds);
    for (int j = 1; j + 1 < ds.m; ++j) {
        if (!grads.ok(i, j)) continue;
        double v = -grads.v(i, j);
        if (std::abs(v) > opts.v_cap) continue;
        RaySet rs = build_ray_set(ds, gg, grads, j, v, opts);
        if (rs.thin || rs.argmax != i) continue;
        if (rs.top_gap > d.jump) {
            d.jump = rs.top_gap;
            d.sensor = j;
            d.v = v;
        }
    }
    d.boundary = d.jump >= c_jump;
    return d;
}

// ---------------------------------------------------------------------------
// Stage 5: charts
// ---------------------------------------------------------------------------

struct ChartCoords {
    int sensor = -1;
    bool is_beta = false;
    double c1 = std::numeric_limits<double>::quiet_NaN();  // v (alpha) or eta (beta)
    double c2 = std::numeric_limits<double>::quiet_NaN();  // r (alpha) or T - r (beta)
    bool closed_witness = false;  // beta only: t_sup attained by a boundary row
};

/// Best chart sensor. Smooth rows give near-identical screen margins at
/// many sensors, so margin near-ties are broken by chart conditioning: a
/// grazing view (|v| near 1) makes the first coordinate singular.
inline int chart_sensor(const TravelTimeDataset& ds, const GradientTable& grads, long i,
                        const ReconOptions& opts = {}) {
    double best_margin = -1e300;
    for (int j = 1; j + 1 < ds.m; ++j) {
        if (!grads.ok(i, j)) continue;
        if (std::abs(grads.v(i, j)) > opts.v_cap) continue;
        best_margin = std::max(best_margin, grads.margin(i, j));
    }
    if (best_margin == -1e300) return -1;
    int best = -1;
    double best_abs_v = 2.0;
    for (int j = 1; j + 1 < ds.m; ++j) {
        if (!grads.ok(i, j)) continue;
        double av = std::abs(grads.v(i, j));
        if (av > opts.v_cap) continue;
        if (grads.margin(i, j) < 0.5 * best_margin) continue;
        if (av < best_abs_v - 1e-12) {
            best_abs_v = av;
            best = j;
        }
    }
    return best;
}

inline ChartCoords interior_coords(const TravelTimeDataset& ds, const GradientTable& grads, long i,
                                   int j0) {
    if (!grads.ok(i, j0))
        throw pipeline_error("chart unavailable: smoothness flag false at source " +
                             std::to_string(i) + ", sensor " + std::to_string(j0));
    ChartCoords c;
    c.sensor = j0;
    c.is_beta = false;
    c.c1 = -grads.v(i, j0);
    c.c2 = ds.at(i, j0);
    return c;
}

inline ChartCoords boundary_coords(const TravelTimeDataset& ds, const GammaGeometry& gg,
                                   const GradientTable& grads,
                                   const std::vector<std::uint8_t>& boundary_flags, long i, int j0,
                                   const ReconOptions& opts = {}) {
    if (!grads.ok(i, j0))
        throw pipeline_error("chart unavailable: smoothness flag false at source " +
                             std::to_string(i) + ", sensor " + std::to_string(j0));
    ChartCoords c;
    c.sensor = j0;
    c.is_beta = true;
    double eta = -grads.v(i, j0);
    RaySet rs = build_ray_set(ds, gg, grads, j0, eta, opts);
    c.c1 = eta;
    c.c2 = rs.t_sup - ds.at(i, j0);
    c.closed_witness = rs.argmax >= 0 && boundary_flags[std::size_t(rs.argmax)] != 0;
    return c;
}

// ---------------------------------------------------------------------------
// Stage 6: distance differentials and the metric
// ---------------------------------------------------------------------------

/// Differentials of p -> r_p(z_l) at source i, taken in the recovered chart
/// coordinates by weighted quadratic least squares over the nearest chart
/// neighbors. The covectors live on the unit cosphere of g at the source.
struct CovectorSet {
    std::vector<int> sensors;
    std::vector<Vec2> xi;
};

inline CovectorSet estimate_differentials(const TravelTimeDataset& ds, const GradientTable& grads,
                                          long i, int j0, const ReconOptions& opts = {}) {
    if (!grads.ok(i, j0)) throw pipeline_error("estimate_differentials: bad chart sensor");
    Vec2 ci{-grads.v(i, j0), ds.at(i, j0)};

    // Pool of chart-comparable sources. Nearest-only selection degenerates
    // for sources on a dense ring (neighbors nearly collinear), so the pick
    // is stratified over angular sectors around the center.
    std::vector<std::pair<double, long>> cand;
    for (long k = 0; k < ds.N; ++k) {
        if (k == i || !grads.ok(k, j0)) continue;
        Vec2 ck{-grads.v(k, j0), ds.at(k, j0)};
        cand.push_back({norm(ck - ci), k});
    }
    std::sort(cand.begin(), cand.end());
    constexpr int kSectors = 8;
    std::array<std::vector<std::pair<double, long>>, kSectors> sector;
    for (auto& [d, k] : cand) {
        if (sector[0].size() + sector[1].size() + sector[2].size() + sector[3].size() +
                sector[4].size() + sector[5].size() + sector[6].size() + sector[7].size() >
            std::size_t(8 * opts.h_neighbors))
            break;
        Vec2 ck{-grads.v(k, j0), ds.at(k, j0)};
        Vec2 dc = ck - ci;
        int b = int(std::floor((std::atan2(dc.y, dc.x) + std::numbers::pi) / (2.0 * std::numbers::pi) * kSectors));
        b = std::clamp(b, 0, kSectors - 1);
        sector[std::size_t(b)].push_back({d, k});
    }
    std::vector<std::pair<double, long>> pool;
    for (std::size_t round = 0; int(pool.size()) < opts.h_neighbors; ++round) {
        bool any = false;
        for (int b = 0; b < kSectors && int(pool.size()) < opts.h_neighbors; ++b) {
            if (round < sector[std::size_t(b)].size()) {
                pool.push_back(sector[std::size_t(b)][round]);
                any = true;
            }
        }
        if (!any) break;
    }
    std::sort(pool.begin(), pool.end());
    int n_like = int(pool.size());
    if (n_like < opts.h_min_neighbors)
        throw pipeline_error("thin neighborhood: source " + std::to_string(i) + " has only " +
                             std::to_string(n_like) + " chart neighbors at sensor " +
                             std::to_string(j0));
    double d_max = pool[std::size_t(n_like - 1)].first * 1.0001;

    const bool cubic = n_like >= 14;
    CovectorSet out;
    for (int l = 1; l + 1 < ds.m; ++l) {
        if (!grads.ok(i, l)) continue;
        bool neighbors_ok = true;
        for (int n = 0; n < n_like; ++n)
            if (!grads.ok(pool[std::size_t(n)].second, l)) neighbors_ok = false;
        if (!neighbors_ok) continue;

        // weighted LS for f(c) - f(ci); cubic correction when the pool is
        // rich enough, quadratic otherwise
        auto accumulate = [&](auto& A, auto& b, int terms) {
            for (int n = 0; n < n_like; ++n) {
                long k = pool[std::size_t(n)].second;
                Vec2 ck{-grads.v(k, j0), ds.at(k, j0)};
                Vec2 dc = ck - ci;
                double w =
                    std::pow(1.0 - std::pow(pool[std::size_t(n)].first / d_max, 3.0), 3.0) + 1e-6;
                double row[10] = {1.0,
                                  dc.x,
                                  dc.y,
                                  0.5 * dc.x * dc.x,
                                  dc.x * dc.y,
                                  0.5 * dc.y * dc.y,
                                  dc.x * dc.x * dc.x / 6.0,
                                  0.5 * dc.x * dc.x * dc.y,
                                  0.5 * dc.x * dc.y * dc.y,
                                  dc.y * dc.y * dc.y / 6.0};
                double rhs = ds.at(k, l) - ds.at(i, l);
                for (int a = 0; a < terms; ++a) {
                    for (int c = 0; c < terms; ++c)
                        A[std::size_t(a)][std::size_t(c)] += w * row[a] * row[c];
                    b[std::size_t(a)] += w * row[a] * rhs;
                }
            }
        };
        bool solved = false;
        Vec2 xi;
        if (cubic) {
            std::array<std::array<double, 10>, 10> A{};
            std::array<double, 10> b{};
            accumulate(A, b, 10);
            if (solve_dense<10>(A, b)) {
                solved = true;
                xi = {b[1], b[2]};
            }
        }
        if (!solved) {
            std::array<std::array<double, 6>, 6> A{};
            std::array<double, 6> b{};
            accumulate(A, b, 6);
            if (!solve_dense<6>(A, b)) continue;
            xi = {b[1], b[2]};
        }
        out.sensors.push_back(l);
        out.xi.push_back(xi);
    }
    return out;
}

/// Least squares fit of the quadratic form Q with xi^T Q xi = 1 over the
/// covectors, floored to SPD; the metric at the source is Q^{-1}.
struct CosphereFit {
    Mat2 g_fit;
    Mat2 q;
    double residual = 0.0;
    double cond = 0.0;
};

inline CosphereFit fit_cosphere(const std::vector<Vec2>& xi, double min_angle_deg = 5.0,
                                double spd_floor_val = 1e-8) {
    if (xi.size() < 3) throw pipeline_error("fit_cosphere needs at least 3 covectors");
    // angular spread of the covector directions, wraparound-safe: the
    // covered arc is the circle minus the largest empty gap
    std::vector<double> angles;
    angles.reserve(xi.size());
    for (const Vec2& x : xi) angles.push_back(std::atan2(x.y, x.x));
    std::sort(angles.begin(), angles.end());
    double largest_gap = 2.0 * std::numbers::pi - (angles.back() - angles.front());
    for (std::size_t a = 1; a < angles.size(); ++a)
        largest_gap = std::max(largest_gap, angles[a] - angles[a - 1]);
    double spread = 2.0 * std::numbers::pi - largest_gap;
    std::array<std::array<double, 3>, 3> A{};
    std::array<double, 3> b{};
    for (const Vec2& x : xi) {
        double row[3] = {x.x * x.x, 2.0 * x.x * x.y, x.y * x.y};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) A[std::size_t(i)][std::size_t(j)] += row[i] * row[j];
            b[std::size_t(i)] += row[i];
        }
    }
    double tr = A[0][0] + A[1][1] + A[2][2];
    auto A0 = A;
    if (spread < min_angle_deg * std::numbers::pi / 180.0 || !solve_dense<3>(A, b)) {
        double diag_min = std::min({A0[0][0], A0[1][1], A0[2][2]});
        throw pipeline_error("fit_cosphere: degenerate covector spread " +
                             std::to_string(spread * 180.0 / std::numbers::pi) +
                             " deg, normal matrix condition ~" +
                             std::to_string(tr / std::max(diag_min, 1e-300)));
    }
    CosphereFit f;
    f.q = Mat2{b[0], b[1], b[1], b[2]};
    f.q = spd_floor(f.q, spd_floor_val);
    f.g_fit = inverse(f.q);
    double acc = 0.0;
    for (const Vec2& x : xi) {
        double e = dot(x, f.q * x) - 1.0;
        acc += e * e;
    }
    f.residual = std::sqrt(acc / double(xi.size()));
    f.cond = tr / std::max(std::min({A0[0][0], A0[1][1], A0[2][2]}), 1e-300);
    return f;
}

// ---------------------------------------------------------------------------
// Stage 7: the full pipeline
// ---------------------------------------------------------------------------

struct SourceRecon {
    long id = -1;
    bool boundary = false;
    bool via_trace = false;
    double boundary_jump = 0.0;
    ChartCoords chart;
    bool has_metric = false;
    Mat2 g_fit;
    double cosphere_residual = std::numeric_limits<double>::quiet_NaN();
    int n_covectors = 0;
    std::string note;
};

struct ReconstructedManifold {
    GammaGeometry gg;
    GradientTable grads;
    std::vector<SourceRecon> sources;
    RowSeparation separation;
    long n_boundary = 0;
    long n_metric = 0;
    long n_chart_failures = 0;
};

inline ReconstructedManifold reconstruct_all(const TravelTimeDataset& ds,
                                             const ReconOptions& opts = {}) {
    ReconstructedManifold rm;
    rm.gg = recover_gamma_metric(ds, opts);
    rm.grads = boundary_gradients(ds, rm.gg, opts);
    rm.sources.resize(std::size_t(ds.N));

    // boundary pass
    std::vector<std::uint8_t> bflags(std::size_t(ds.N), 0);
    parallel_for(std::size_t(ds.N), [&](std::size_t i) {
        SourceRecon& sr = rm.sources[i];
        sr.id = long(i);
        BoundaryDecision bd = classify_boundary(ds, rm.gg, rm.grads, long(i), opts);
        sr.boundary = bd.boundary;
        sr.via_trace = bd.via_trace;
        sr.boundary_jump = bd.jump;
        bflags[i] = bd.boundary ? 1 : 0;
    }, opts.threads);

    // charts + metric pass
    parallel_for(std::size_t(ds.N), [&](std::size_t i) {
        SourceRecon& sr = rm.sources[i];
        try {
            int j0 = chart_sensor(ds, rm.grads, long(i), opts);
            if (j0 < 0) throw pipeline_error("no sensor passes the smoothness screen");
            if (sr.boundary)
                sr.chart = boundary_coords(ds, rm.gg, rm.grads, bflags, long(i), j0, opts);
            else
                sr.chart = interior_coords(ds, rm.grads, long(i), j0);

            CovectorSet cov = estimate_differentials(ds, rm.grads, long(i), j0, opts);
            if (int(cov.xi.size()) >= 3) {
                CosphereFit fit = fit_cosphere(cov.xi, opts.min_cov_angle_deg);
                sr.has_metric = true;
                sr.g_fit = fit.g_fit;
                sr.cosphere_residual = fit.residual;
                sr.n_covectors = int(cov.xi.size());
            } else {
                sr.note = "too few distance differentials for a cosphere fit";
            }
        } catch (const std::exception& e) {
            sr.note = e.what();
        }
    }, opts.threads);

    rm.separation = row_separation(ds, 10.0 * ds.oracle_tol);
    for (auto& sr : rm.sources) {
        if (sr.boundary) ++rm.n_boundary;
        if (sr.has_metric) ++rm.n_metric;
        if (!sr.note.empty() && sr.chart.sensor < 0) ++rm.n_chart_failures;
    }
    return rm;
}

}  // namespace geotime

#endif  // GEOTIME_RECONSTRUCT_HPP
