#ifndef GEOTIME_VERIFY_HPP
#define GEOTIME_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "geotime/dataset.hpp"
#include "geotime/eikonal.hpp"
#include "geotime/reconstruct.hpp"
#include "geotime/shooting.hpp"

namespace geotime {

// ---------------------------------------------------------------------------
// Injectivity of the data embedding p -> r_p
// ---------------------------------------------------------------------------

struct EmbeddingStats {
    double min_gap = std::numeric_limits<double>::infinity();
    long arg_i = -1, arg_k = -1;
    std::size_t n_pairs = 0;
    std::vector<std::pair<long, long>> collapsed;  // pairs below the dup threshold
};

inline EmbeddingStats embedding_check(const TravelTimeDataset& ds, double dup_tol = 0.0) {
    if (dup_tol <= 0.0) dup_tol = 10.0 * ds.oracle_tol;
    EmbeddingStats st;
    RowSeparation rs = row_separation(ds, dup_tol);
    st.min_gap = rs.min_gap;
    st.arg_i = rs.arg_i;
    st.arg_k = rs.arg_k;
    st.collapsed = rs.near_duplicates;
    st.n_pairs = std::size_t(ds.N) * std::size_t(ds.N - 1) / 2;
    return st;
}

// ---------------------------------------------------------------------------
// Discrete correspondence between two datasets of the same geometry
// ---------------------------------------------------------------------------

struct IsometryReport {
    std::vector<long> psi;          // row of ds2 matched to each row of ds1 (-1: unmatched)
    std::vector<long> ambiguous;    // rows of ds1 with a second match within the tie tol
    std::vector<std::pair<long, double>> unmatched;  // losers of match collisions + their gap
    double max_row_gap = 0.0;       // sup-norm distance of matched rows
    long boundary_agree = 0, boundary_total = 0, boundary_disagree_margin = 0;
    std::vector<double> metric_errors;     // relative Frobenius between fitted metrics
    std::vector<double> distance_errors;   // |r1 - r2 o psi| over sampled entries
    double gamma_transport_max = 0.0;      // boundary-trace rows must map to the same sensor
};

/// Nearest-row correspondence in the sup norm; ties within tie_tol are
/// reported as ambiguous rather than resolved. Sensor grids of the two
/// datasets must share the u parametrization.
inline IsometryReport isometry_compare(const TravelTimeDataset& ds1, const ReconstructedManifold& r1,
                                       const TravelTimeDataset& ds2, const ReconstructedManifold& r2,
                                       double tie_tol = 0.0) {
    if (ds1.m != ds2.m) throw data_error("isometry_compare: sensor counts differ");
    if (tie_tol <= 0.0) tie_tol = 10.0 * std::max(ds1.oracle_tol, ds2.oracle_tol);

    IsometryReport rep;
    rep.psi.assign(std::size_t(ds1.N), -1);
    std::vector<double> best_gap(std::size_t(ds1.N), 1e300);
    for (long i = 0; i < ds1.N; ++i) {
        double best = 1e300, second = 1e300;
        long arg = -1;
        for (long k = 0; k < ds2.N; ++k) {
            double g = 0.0;
            for (int j = 0; j < ds1.m; ++j)
                g = std::max(g, std::abs(ds1.at(i, j) - ds2.at(k, j)));
            if (g < best) {
                second = best;
                best = g;
                arg = k;
            } else if (g < second) {
                second = g;
            }
        }
        rep.psi[std::size_t(i)] = arg;
        best_gap[std::size_t(i)] = best;
        if (second - best <= tie_tol) rep.ambiguous.push_back(i);
    }
    // the correspondence must be a bijection on the matched subsets: when
    // several rows claim the same target, only the closest keeps the match
    {
        std::vector<long> owner(std::size_t(ds2.N), -1);
        for (long i = 0; i < ds1.N; ++i) {
            long k = rep.psi[std::size_t(i)];
            if (k < 0) continue;
            long cur = owner[std::size_t(k)];
            if (cur < 0 || best_gap[std::size_t(i)] < best_gap[std::size_t(cur)]) {
                if (cur >= 0) rep.psi[std::size_t(cur)] = -1;
                owner[std::size_t(k)] = i;
            } else {
                rep.psi[std::size_t(i)] = -1;
            }
        }
        for (long i = 0; i < ds1.N; ++i) {
            if (rep.psi[std::size_t(i)] >= 0)
                rep.max_row_gap = std::max(rep.max_row_gap, best_gap[std::size_t(i)]);
            else
                rep.unmatched.push_back({i, best_gap[std::size_t(i)]});
        }
    }

    for (long i = 0; i < ds1.N; ++i) {
        long k = rep.psi[std::size_t(i)];
        if (k < 0) continue;
        ++rep.boundary_total;
        if (r1.sources[std::size_t(i)].boundary == r2.sources[std::size_t(k)].boundary)
            ++rep.boundary_agree;
        const auto& s1 = r1.sources[std::size_t(i)];
        const auto& s2 = r2.sources[std::size_t(k)];
        if (s1.has_metric && s2.has_metric && s1.chart.sensor == s2.chart.sensor &&
            !s1.chart.is_beta && !s2.chart.is_beta) {
            rep.metric_errors.push_back(frobenius(s1.g_fit - s2.g_fit) / frobenius(s2.g_fit));
        }
        for (int j = 0; j < ds1.m; ++j)
            rep.distance_errors.push_back(std::abs(ds1.at(i, j) - ds2.at(k, j)));
    }

    // boundary-trace rows must transport to the trace row of the same sensor
    for (std::size_t g = 0; g < r1.gg.gamma_rows.size(); ++g) {
        long i = r1.gg.gamma_rows[g];
        long k = rep.psi[std::size_t(i)];
        if (k < 0) continue;
        int sensor1 = r1.gg.row_sensor[g];
        double expected_u = ds1.sensor_u[std::size_t(sensor1)];
        // locate k's own sensor in ds2
        double got_u = -1.0;
        for (std::size_t g2 = 0; g2 < r2.gg.gamma_rows.size(); ++g2)
            if (r2.gg.gamma_rows[g2] == k) got_u = ds2.sensor_u[std::size_t(r2.gg.row_sensor[g2])];
        if (got_u >= 0.0)
            rep.gamma_transport_max = std::max(rep.gamma_transport_max, std::abs(got_u - expected_u));
        else
            rep.gamma_transport_max = std::max(rep.gamma_transport_max, 1.0);
    }
    return rep;
}

/// Transport check for ray sets: members of sigma(z_j, v) in dataset 1 must
/// map (through the row correspondence) into members of the matching ray
/// set of dataset 2, up to the gradient tolerance. Returns the worst
/// mismatch fraction over the sampled grid.
inline double ray_set_transport(const TravelTimeDataset& ds1, const ReconstructedManifold& r1,
                                const TravelTimeDataset& ds2, const ReconstructedManifold& r2,
                                const IsometryReport& rep, const ReconOptions& opts = {}) {
    double worst = 0.0;
    ReconOptions wide = opts;
    wide.tol_grad = 1.5 * opts.tol_grad_eff(ds1);  // slack on the receiving side
    std::vector<double> grid = direction_grid(opts);
    for (int j = 2; j + 2 < ds1.m; j += std::max(1, ds1.m / 8)) {
        for (std::size_t a = 0; a < grid.size(); a += 4) {
            RaySet s1 = build_ray_set(ds1, r1.gg, r1.grads, j, grid[a], opts);
            if (int(s1.members.size()) < 6) continue;
            RaySet s2 = build_ray_set(ds2, r2.gg, r2.grads, j, grid[a], wide);
            long total = 0, inside = 0;
            for (long i : s1.members) {
                long k = rep.psi[std::size_t(i)];
                if (k < 0) continue;
                ++total;
                if (std::find(s2.members.begin(), s2.members.end(), k) != s2.members.end())
                    ++inside;
            }
            if (total >= 6) worst = std::max(worst, 1.0 - double(inside) / double(total));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Ground-truth comparisons (test mode: the sidecar is available)
// ---------------------------------------------------------------------------

/// Ground-truth version of the interior chart at a sensor: (v, r) computed
/// from shooting distances and the arriving geodesic direction.
struct TruthChart {
    const MetricSpec* spec = nullptr;
    const DomainSpec* domain = nullptr;
    Vec2 z0;
    Vec2 tangent_g;  // g-unit boundary tangent at z0
    ShootOptions shoot{};

    static TruthChart at_sensor(const MetricSpec& spec, const DomainSpec& domain, double sensor_s) {
        TruthChart tc;
        tc.spec = &spec;
        tc.domain = &domain;
        double t = domain.curve.t_of_s(sensor_s);
        tc.z0 = domain.curve.eval(t);
        Vec2 tan = domain.curve.d1(t);
        Mat2 g = metric_at(spec, tc.z0);
        tc.tangent_g = tan * (1.0 / std::sqrt(dot(tan, g * tan)));
        tc.shoot.multistart = 24;
        return tc;
    }

    Vec2 eval(const Vec2& q) const {
        BvpResult b = distance_shooting(*spec, *domain, q, z0, shoot);
        if (!b.converged) throw pipeline_error("truth chart: shooting oracle failed");
        const BvpBranch& br = b.minimizers.front();
        IntegratorOptions io;
        io.record_samples = false;
        GeodesicSample end = flow(*spec, UnitVectorAt{q, br.direction}, br.length, io);
        Mat2 g = metric_at(*spec, z0);
        return {-dot(end.velocity, g * tangent_g), br.length};
    }

    /// True metric at p expressed in this chart (pullback through the
    /// finite-difference Jacobian of the chart map).
    Mat2 metric_in_chart(const Vec2& p, double fd = 2e-4) const {
        Vec2 cx = (eval(p + Vec2{fd, 0}) - eval(p - Vec2{fd, 0})) / (2 * fd);
        Vec2 cy = (eval(p + Vec2{0, fd}) - eval(p - Vec2{0, fd})) / (2 * fd);
        Mat2 A{cx.x, cy.x, cx.y, cy.y};
        Mat2 Ai = inverse(A);
        return transpose(Ai) * metric_at(*spec, p) * Ai;
    }
};

struct BoundaryConfusion {
    long tp = 0, fp = 0, fn = 0, tn = 0;
    long fp_margin = 0, fn_margin = 0;  // errors within the margin band
    double precision() const { return tp + fp == 0 ? 1.0 : double(tp) / double(tp + fp); }
    double recall() const { return tp + fn == 0 ? 1.0 : double(tp) / double(tp + fn); }
};

/// Confusion counts of the data-driven boundary test against the sidecar.
/// Sources within margin_band of the boundary (but not on it) may be
/// misclassified by depth quantization; they are tallied separately.
inline BoundaryConfusion boundary_confusion(const ReconstructedManifold& rm,
                                            const DatasetTruth& truth, double margin_band) {
    BoundaryConfusion c;
    for (std::size_t i = 0; i < rm.sources.size(); ++i) {
        bool truth_b = truth.depth[i] <= 1e-9;
        bool rec_b = rm.sources[i].boundary;
        bool in_margin = !truth_b && truth.depth[i] <= margin_band;
        if (truth_b && rec_b) ++c.tp;
        else if (truth_b && !rec_b) { ++c.fn; if (in_margin) ++c.fn_margin; }
        else if (!truth_b && rec_b) { ++c.fp; if (in_margin) ++c.fp_margin; }
        else ++c.tn;
    }
    return c;
}

/// Per-source relative Frobenius error of the fitted metric against the
/// truth pulled into the recovered chart. NaN when the source has no fit.
inline std::vector<double> metric_errors_vs_truth(const MetricSpec& spec, const DomainSpec& domain,
                                                  const TravelTimeDataset& /*ds*/,
                                                  const DatasetTruth& truth,
                                                  const ReconstructedManifold& rm,
                                                  int threads = 1) {
    std::vector<double> errs(rm.sources.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for(rm.sources.size(), [&](std::size_t i) {
        const SourceRecon& sr = rm.sources[i];
        if (!sr.has_metric || sr.boundary || sr.chart.is_beta || sr.chart.sensor < 0) return;
        TruthChart tc = TruthChart::at_sensor(spec, domain, truth.sensor_s[std::size_t(sr.chart.sensor)]);
        Mat2 g_true = tc.metric_in_chart(truth.source[i]);
        errs[i] = frobenius(sr.g_fit - g_true) / frobenius(g_true);
    }, threads);
    return errs;
}

// ---------------------------------------------------------------------------
// Non-convex counterexample: the horseshoe involute
// ---------------------------------------------------------------------------

struct HorseshoeOptions {
    double radius = 1.0;
    double width = 0.35;
    double gap_half = 0.85;        // radians
    double gamma_deg_lo = 100.0;   // measurement arch on the outer arc
    double gamma_deg_hi = 140.0;
    double x0_deg = 210.0;         // anchor on the inner boundary
    double involute_time = 1.0;    // distance level defining the involute
    double involute_deg_lo = 252.0;
    double involute_deg_hi = 294.0;
    int n_involute = 6;
    int n_gamma_sensors = 10;
    int n_full_sensors = 48;
    double grid_h = 1.0 / 256.0;
    int threads = 1;
};

struct CollapseReport {
    double data_diameter = 0.0;       // partial sensing on the arch
    double full_diameter = 0.0;       // full-boundary sensing
    double geodesic_diameter = 0.0;   // true spread of the involute set
    std::vector<Vec2> involute;
    Vec2 anchor;
    DomainSpec domain;
    double convexity_max_pi = 0.0;    // positive: the fixture is not convex
    TravelTimeDataset partial_ds;     // involute rows, arch sensors
};

inline CollapseReport counterexample_horseshoe(const HorseshoeOptions& opts = {}) {
    const double pi = std::numbers::pi;
    MetricSpec euclid;
    euclid.id = MetricCatalog::euclidean;
    euclid.chart = {-1.9, 1.9, -1.9, 1.9};

    FourierCurve hs = horseshoe_curve(opts.radius, opts.width, opts.gap_half);
    double a0 = opts.gap_half, a1 = 2 * pi - opts.gap_half;
    double outer = (a1 - a0) * (opts.radius + opts.width);
    double inner = (a1 - a0) * (opts.radius - opts.width);
    double cap = pi * opts.width;
    double total = outer + inner + 2 * cap;
    auto t_outer = [&](double ang) { return 2 * pi * ((ang - a0) * (opts.radius + opts.width)) / total; };
    auto t_inner = [&](double ang) {
        return 2 * pi * (outer + cap + (a1 - ang) * (opts.radius - opts.width)) / total;
    };

    CollapseReport rep;
    double sA = hs.s_of_t(t_outer(opts.gamma_deg_lo * pi / 180.0));
    double sB = hs.s_of_t(t_outer(opts.gamma_deg_hi * pi / 180.0));
    rep.domain = DomainSpec(hs, sA, sB);
    rep.convexity_max_pi = check_strict_convexity(rep.domain, euclid, 512).max_pi;
    rep.anchor = hs.eval(t_inner(opts.x0_deg * pi / 180.0));

    EikonalOptions eo;
    eo.h = opts.grid_h;
    eo.init_radius = std::min(0.25, 10.0 * opts.grid_h);
    DistanceField from_anchor = distance_eikonal(euclid, rep.domain, rep.anchor, eo);

    // involute = level set of the anchor distance, sampled along polar rays
    const double c = opts.involute_time;
    for (int k = 0; k < opts.n_involute; ++k) {
        double ang = (opts.involute_deg_lo +
                      (opts.involute_deg_hi - opts.involute_deg_lo) * k / double(opts.n_involute - 1)) *
                     pi / 180.0;
        double rlo = opts.radius - opts.width + 0.05;
        double rhi = opts.radius + opts.width - 0.05;
        double prev_u = std::numeric_limits<double>::quiet_NaN(), prev_r = 0.0;
        for (double r = rlo; r <= rhi; r += opts.grid_h) {
            Vec2 q{r * std::cos(ang), r * std::sin(ang)};
            double u = from_anchor.sample(q);
            if (std::isfinite(u) && std::isfinite(prev_u) && (prev_u - c) * (u - c) <= 0.0 &&
                u != prev_u) {
                double f = (c - prev_u) / (u - prev_u);
                double rr = prev_r + f * (r - prev_r);
                rep.involute.push_back({rr * std::cos(ang), rr * std::sin(ang)});
                break;
            }
            prev_u = u;
            prev_r = r;
        }
    }
    if (int(rep.involute.size()) < std::max(3, opts.n_involute / 2))
        throw pipeline_error(
            "horseshoe involute construction failed: the distance level does not cross the "
            "scanned sector; adjust involute_time or the sector");

    auto diameter = [&](const std::vector<Vec2>& sensors, std::vector<std::vector<double>>* keep)
        -> double {
        std::vector<std::vector<double>> times(sensors.size(),
                                               std::vector<double>(rep.involute.size()));
        std::vector<DistanceField> fields(sensors.size());
        parallel_for(sensors.size(), [&](std::size_t j) {
            fields[j] = distance_eikonal(euclid, rep.domain, sensors[j], eo);
        }, opts.threads);
        for (std::size_t j = 0; j < sensors.size(); ++j)
            for (std::size_t k = 0; k < rep.involute.size(); ++k)
                times[j][k] = fields[j].sample(rep.involute[k]);
        double diam = 0.0;
        for (std::size_t k = 0; k < rep.involute.size(); ++k)
            for (std::size_t l = k + 1; l < rep.involute.size(); ++l) {
                double g = 0.0;
                for (std::size_t j = 0; j < sensors.size(); ++j)
                    g = std::max(g, std::abs(times[j][k] - times[j][l]));
                diam = std::max(diam, g);
            }
        if (keep) *keep = times;
        return diam;
    };

    std::vector<Vec2> arch;
    for (int j = 0; j < opts.n_gamma_sensors; ++j)
        arch.push_back(hs.point_at_s(sA + (sB - sA) * j / double(opts.n_gamma_sensors - 1)));
    std::vector<std::vector<double>> partial_times;
    rep.data_diameter = diameter(arch, &partial_times);

    std::vector<Vec2> everywhere;
    for (int j = 0; j < opts.n_full_sensors; ++j)
        everywhere.push_back(hs.point_at_s(rep.domain.length() * j / double(opts.n_full_sensors)));
    rep.full_diameter = diameter(everywhere, nullptr);

    DistanceField f0 = distance_eikonal(euclid, rep.domain, rep.involute.front(), eo);
    DistanceField f1 = distance_eikonal(euclid, rep.domain, rep.involute.back(), eo);
    for (const Vec2& q : rep.involute) {
        rep.geodesic_diameter = std::max(rep.geodesic_diameter, f0.sample(q));
        rep.geodesic_diameter = std::max(rep.geodesic_diameter, f1.sample(q));
    }

    // package the involute rows as a dataset for embedding_check
    rep.partial_ds.m = int(arch.size());
    rep.partial_ds.N = long(rep.involute.size());
    rep.partial_ds.oracle = "eikonal";
    rep.partial_ds.oracle_tol = 5.0 * opts.grid_h;
    for (int j = 0; j < rep.partial_ds.m; ++j)
        rep.partial_ds.sensor_u.push_back(j / double(rep.partial_ds.m - 1));
    rep.partial_ds.times.assign(std::size_t(rep.partial_ds.N) * rep.partial_ds.m, 0.0);
    for (long i = 0; i < rep.partial_ds.N; ++i)
        for (int j = 0; j < rep.partial_ds.m; ++j)
            rep.partial_ds.at(i, j) = partial_times[std::size_t(j)][std::size_t(i)];
    return rep;
}

// ---------------------------------------------------------------------------
// Cut locus structure summary
// ---------------------------------------------------------------------------

struct CutLocusReport {
    std::vector<CutPointRecord> samples;   // genuine cut points over the fan
    int n_typical = 0, n_conjugate = 0, n_atypical = 0;
    double max_adjacent_gap = 0.0;         // polyline continuity of typical points
    double min_transversality_deg = 90.0;  // angle against the boundary at the ends
    int boundary_nonsmooth_count = 0;      // spikes of s -> d(p, z(s))
    double area_ratio = 0.0;               // two-resolution cell-count ratio
    int cells_coarse = 0, cells_fine = 0;
};

struct CutLocusOptions {
    int n_directions = 256;
    int n_boundary_probe = 192;
    double cell_h = 0.02;
    double spike_factor = 12.0;
    CutOptions cut{};
};

inline CutLocusReport cutlocus_report(const MetricSpec& spec, const DomainSpec& domain,
                                      const DomainSpec& extended, const Vec2& p,
                                      const CutLocusOptions& opts = {}) {
    CutLocusReport rep;
    rep.samples = cut_locus_sample(spec, domain, extended, p, opts.n_directions, opts.cut);
    for (const auto& r : rep.samples) {
        if (r.kind == CutKind::typical) ++rep.n_typical;
        if (r.kind == CutKind::conjugate) ++rep.n_conjugate;
        if (r.kind == CutKind::atypical) ++rep.n_atypical;
    }

    // continuity of the typical branch: adjacent fan directions must land
    // at nearby cut points (gap measured relative to the fan step)
    std::vector<const CutPointRecord*> chain;
    for (const auto& r : rep.samples)
        if (r.kind != CutKind::boundary_hit) chain.push_back(&r);
    for (std::size_t k = 1; k < chain.size(); ++k) {
        double dang = std::abs(std::remainder(
            std::atan2(chain[k]->direction.direction.y, chain[k]->direction.direction.x) -
                std::atan2(chain[k - 1]->direction.direction.y, chain[k - 1]->direction.direction.x),
            2.0 * std::numbers::pi));
        if (dang < 1.5 * (2.0 * std::numbers::pi / opts.n_directions) + 1e-9)
            rep.max_adjacent_gap =
                std::max(rep.max_adjacent_gap, norm(chain[k]->cut_point - chain[k - 1]->cut_point));
    }

    // transversality at the boundary: direction of the polyline ends
    // against the boundary tangent
    if (chain.size() >= 2) {
        for (int end = 0; end < 2; ++end) {
            const CutPointRecord* a = end == 0 ? chain.front() : chain.back();
            const CutPointRecord* b = end == 0 ? chain[1] : chain[chain.size() - 2];
            double s = domain.closest_s(a->cut_point);
            if (domain.distance_to_boundary(a->cut_point) < 0.08) {
                Vec2 seg = normalized(a->cut_point - b->cut_point);
                Vec2 tan = normalized(domain.curve.d1(domain.curve.t_of_s(s)));
                double ang = std::asin(std::clamp(std::abs(cross(tan, seg)), 0.0, 1.0)) * 180.0 /
                             std::numbers::pi;
                rep.min_transversality_deg = std::min(rep.min_transversality_deg, ang);
            }
        }
    }

    // boundary smoothness of d(p, z(s)) by second-difference spikes
    {
        std::vector<double> vals(std::size_t(opts.n_boundary_probe));
        ShootOptions so = opts.cut.shoot;
        parallel_for(vals.size(), [&](std::size_t k) {
            double s = domain.length() * double(k) / double(opts.n_boundary_probe);
            Vec2 z = domain.curve.point_at_s(s);
            BvpResult r = distance_shooting(spec, domain, p, z, so);
            vals[k] = r.converged ? r.distance : std::numeric_limits<double>::quiet_NaN();
        }, opts.cut.threads);
        std::vector<double> d2(vals.size());
        std::vector<double> mags;
        for (std::size_t k = 0; k < vals.size(); ++k) {
            double a = vals[(k + vals.size() - 1) % vals.size()];
            double b = vals[k];
            double cc = vals[(k + 1) % vals.size()];
            d2[k] = std::abs(a - 2 * b + cc);
            if (std::isfinite(d2[k])) mags.push_back(d2[k]);
        }
        std::sort(mags.begin(), mags.end());
        double med = mags.empty() ? 0.0 : mags[mags.size() / 2];
        for (std::size_t k = 0; k < d2.size(); ++k)
            if (std::isfinite(d2[k]) && d2[k] > opts.spike_factor * std::max(med, 1e-12))
                ++rep.boundary_nonsmooth_count;
    }

    // two-resolution cell counts of the sampled cut set
    auto count_cells = [&](double h) {
        std::vector<long> keys;
        for (const auto* r : chain) {
            long ix = long(std::floor(r->cut_point.x / h));
            long iy = long(std::floor(r->cut_point.y / h));
            keys.push_back(ix * 1000003 + iy);
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        return int(keys.size());
    };
    rep.cells_coarse = count_cells(opts.cell_h);
    rep.cells_fine = count_cells(opts.cell_h / 2);
    if (rep.cells_coarse > 0)
        rep.area_ratio = (double(rep.cells_fine) * 0.25) / double(rep.cells_coarse);
    return rep;
}

}  // namespace geotime

#endif  // GEOTIME_VERIFY_HPP
