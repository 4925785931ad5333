#ifndef GEOTIME_EIKONAL_HPP
#define GEOTIME_EIKONAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "geotime/domain.hpp"
#include "geotime/linalg.hpp"
#include "geotime/metric.hpp"

namespace geotime {

/// First-arrival field u with |grad u|_{g^-1} = 1 from a point source,
/// solved on a rectangular lattice masked to the domain interior. For the
/// conformal catalog entries this is the isotropic eikonal |grad u| = e^phi.
class DistanceField {
  public:
    Vec2 source;
    Vec2 origin;              // position of node (0,0)
    double h = 0.0;
    int nx = 0, ny = 0;
    std::vector<double> values;  // +inf outside mask / unreached
    std::vector<std::uint8_t> mask;
    std::string method = "eikonal";

    double& at(int i, int j) { return values[std::size_t(j) * nx + i]; }
    double at(int i, int j) const { return values[std::size_t(j) * nx + i]; }
    bool in_mask(int i, int j) const {
        return i >= 0 && i < nx && j >= 0 && j < ny && mask[std::size_t(j) * nx + i];
    }
    Vec2 node(int i, int j) const { return {origin.x + h * i, origin.y + h * j}; }

    /// Bilinear sample restricted to masked nodes; the weights of missing
    /// corners are renormalized over the valid ones (one-sided near the
    /// boundary). Returns +inf when no corner is valid.
    double sample(const Vec2& p) const {
        double fx = (p.x - origin.x) / h;
        double fy = (p.y - origin.y) / h;
        int i = int(std::floor(fx)), j = int(std::floor(fy));
        double ax = fx - i, ay = fy - j;
        double wsum = 0.0, acc = 0.0;
        const double w[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
        const int di[4] = {0, 1, 0, 1};
        const int dj[4] = {0, 0, 1, 1};
        for (int k = 0; k < 4; ++k) {
            int ii = i + di[k], jj = j + dj[k];
            if (in_mask(ii, jj) && std::isfinite(at(ii, jj))) {
                wsum += w[k];
                acc += w[k] * at(ii, jj);
            }
        }
        if (wsum <= 0.0) return std::numeric_limits<double>::infinity();
        return acc / wsum;
    }

    void write_csv(const std::string& path) const {
        std::ofstream out(path);
        out << "# geotime-distance-field v1\n";
        out << "# h=" << h << " nx=" << nx << " ny=" << ny << " origin=" << origin.x << ","
            << origin.y << " source=" << source.x << "," << source.y << " method=" << method
            << "\n";
        out << "i,j,x,y,u\n";
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (in_mask(i, j))
                    out << i << ',' << j << ',' << node(i, j).x << ',' << node(i, j).y << ','
                        << at(i, j) << '\n';
    }
};

namespace detail {

/// Binary min-heap over node indices keyed by tentative values, with a
/// position table for decrease-key.
class NodeHeap {
  public:
    explicit NodeHeap(std::size_t n) : pos_(n, -1) {}

    bool empty() const { return heap_.empty(); }

    void push_or_update(std::size_t idx, double key) {
        if (pos_[idx] < 0) {
            pos_[idx] = int(heap_.size());
            heap_.push_back({key, idx});
            sift_up(pos_[idx]);
        } else if (key < heap_[pos_[idx]].key) {
            heap_[pos_[idx]].key = key;
            sift_up(pos_[idx]);
        }
    }

    std::pair<std::size_t, double> pop() {
        auto top = heap_.front();
        swap_nodes(0, heap_.size() - 1);
        heap_.pop_back();
        pos_[top.idx] = -1;
        if (!heap_.empty()) sift_down(0);
        return {top.idx, top.key};
    }

  private:
    struct Entry {
        double key;
        std::size_t idx;
    };
    std::vector<Entry> heap_;
    std::vector<int> pos_;

    void swap_nodes(std::size_t a, std::size_t b) {
        std::swap(heap_[a], heap_[b]);
        pos_[heap_[a].idx] = int(a);
        pos_[heap_[b].idx] = int(b);
    }
    void sift_up(std::size_t i) {
        while (i > 0) {
            std::size_t p = (i - 1) / 2;
            if (heap_[p].key <= heap_[i].key) break;
            swap_nodes(i, p);
            i = p;
        }
    }
    void sift_down(std::size_t i) {
        for (;;) {
            std::size_t l = 2 * i + 1, r = 2 * i + 2, m = i;
            if (l < heap_.size() && heap_[l].key < heap_[m].key) m = l;
            if (r < heap_.size() && heap_[r].key < heap_[m].key) m = r;
            if (m == i) return;
            swap_nodes(i, m);
            i = m;
        }
    }
};

/// Metric length of the straight chart segment a-b (5-point Gauss), used
/// for the exact-ish initialization disk around the source.
inline double segment_length(const MetricSpec& spec, const Vec2& a, const Vec2& b) {
    static const double xg[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                                 0.538469310105683, 0.906179845938664};
    static const double wg[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                                 0.478628670499366, 0.236926885056189};
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) {
        double t = 0.5 + 0.5 * xg[i];
        Vec2 p = a + (b - a) * t;
        acc += wg[i] * std::exp(spec.phi_jet(p).phi);
    }
    return 0.5 * acc * norm(b - a);
}

}  // namespace detail

struct EikonalOptions {
    double h = 1.0 / 128.0;
    double init_radius_factor = 6.0;  // exact-init disk radius in units of h
    double init_radius = 0.25;        // absolute cap; effective r0 = max(f*h, min(this, safe))
    double pad = 0.0;                 // extra margin around the domain bbox
};

/// First-order upwind fast marching from a point source. Supported for the
/// conformal catalog entries only.
inline DistanceField distance_eikonal(const MetricSpec& spec, const DomainSpec& domain,
                                      const Vec2& source, const EikonalOptions& opts = {}) {
    if (!spec.conformal())
        throw domain_error(
            "distance_eikonal supports conformal metrics only; anisotropic custom_spd would "
            "need a sweeping solver, which this build does not provide");

    DistanceField f;
    f.source = source;
    f.h = opts.h;
    f.method = "eikonal";

    // lattice over the domain bounding box
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Vec2& p : domain.polyline()) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    double pad = opts.pad + 2.0 * opts.h;
    xmin -= pad; ymin -= pad; xmax += pad; ymax += pad;
    f.origin = {xmin, ymin};
    f.nx = int(std::ceil((xmax - xmin) / opts.h)) + 1;
    f.ny = int(std::ceil((ymax - ymin) / opts.h)) + 1;
    const std::size_t total = std::size_t(f.nx) * f.ny;
    f.values.assign(total, std::numeric_limits<double>::infinity());
    f.mask.assign(total, 0);

    // scanline rasterization of the domain interior
    const auto& poly = domain.polyline();
    const std::size_t K = poly.size();
    for (int j = 0; j < f.ny; ++j) {
        double y = f.origin.y + opts.h * j;
        std::vector<double> xs;
        for (std::size_t k = 0; k < K; ++k) {
            const Vec2& a = poly[k];
            const Vec2& b = poly[(k + 1) % K];
            if ((a.y > y) != (b.y > y)) xs.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            int i0 = int(std::ceil((xs[k] - f.origin.x) / opts.h));
            int i1 = int(std::floor((xs[k + 1] - f.origin.x) / opts.h));
            for (int i = std::max(0, i0); i <= std::min(f.nx - 1, i1); ++i)
                f.mask[std::size_t(j) * f.nx + i] = 1;
        }
    }

    enum : std::uint8_t { FAR = 0, NARROW = 1, KNOWN = 2 };
    std::vector<std::uint8_t> state(total, FAR);
    detail::NodeHeap heap(total);

    // Initialization disk around the source: straight-ray metric length,
    // which kills the point-source singularity error of the upwind scheme.
    // Rays that would leave the domain (possible when the boundary is
    // concave) are rejected at three interior checkpoints.
    double r0 = std::max(opts.init_radius_factor * opts.h, opts.init_radius);
    int si = int(std::round((source.x - f.origin.x) / opts.h));
    int sj = int(std::round((source.y - f.origin.y) / opts.h));
    int rad = int(std::ceil(r0 / opts.h)) + 1;
    bool seeded = false;
    for (int j = sj - rad; j <= sj + rad; ++j)
        for (int i = si - rad; i <= si + rad; ++i) {
            if (!f.in_mask(i, j)) continue;
            Vec2 p = f.node(i, j);
            double dist = norm(p - source);
            if (dist > r0) continue;
            bool ray_inside = true;
            if (dist > 1e-12)
                for (double w : {0.25, 0.5, 0.75})
                    if (domain.gap(source + (p - source) * w) > 1e-9) ray_inside = false;
            if (!ray_inside) continue;
            std::size_t idx = std::size_t(j) * f.nx + i;
            f.values[idx] = detail::segment_length(spec, source, p);
            state[idx] = KNOWN;
            seeded = true;
        }
    if (!seeded) {
        // source next to the boundary: seed the nearest masked node
        double best = 1e300;
        std::size_t best_idx = 0;
        for (std::size_t idx = 0; idx < total; ++idx) {
            if (!f.mask[idx]) continue;
            Vec2 p = f.node(int(idx % f.nx), int(idx / f.nx));
            double d = norm(p - source);
            if (d < best) {
                best = d;
                best_idx = idx;
            }
        }
        if (best > 1e299) throw pipeline_error("eikonal: empty domain mask");
        f.values[best_idx] = detail::segment_length(spec, source, f.node(int(best_idx % f.nx), int(best_idx / f.nx)));
        state[best_idx] = KNOWN;
    }

    auto slowness = [&](int i, int j) { return std::exp(spec.phi_jet(f.node(i, j)).phi); };

    auto update_node = [&](int i, int j) {
        auto known_at = [&](int ii, int jj) {
            return f.in_mask(ii, jj) && state[std::size_t(jj) * f.nx + ii] == KNOWN;
        };
        double a = std::numeric_limits<double>::infinity();
        double b = a;
        if (known_at(i - 1, j)) a = f.at(i - 1, j);
        if (known_at(i + 1, j)) a = std::min(a, f.at(i + 1, j));
        if (known_at(i, j - 1)) b = f.at(i, j - 1);
        if (known_at(i, j + 1)) b = std::min(b, f.at(i, j + 1));
        double fh = slowness(i, j) * f.h;
        double u;
        if (!std::isfinite(a) && !std::isfinite(b)) u = std::numeric_limits<double>::infinity();
        else if (!std::isfinite(a)) u = b + fh;
        else if (!std::isfinite(b)) u = a + fh;
        else if (std::abs(a - b) >= fh) u = std::min(a, b) + fh;
        else {
            double s = a + b;
            double disc = s * s - 2.0 * (a * a + b * b - fh * fh);
            u = 0.5 * (s + std::sqrt(std::max(0.0, disc)));
        }
        // one-sided diagonal candidates rescue nodes whose axis neighbors
        // are masked out along the boundary
        const double diag = std::numbers::sqrt2 * fh;
        if (known_at(i - 1, j - 1)) u = std::min(u, f.at(i - 1, j - 1) + diag);
        if (known_at(i + 1, j - 1)) u = std::min(u, f.at(i + 1, j - 1) + diag);
        if (known_at(i - 1, j + 1)) u = std::min(u, f.at(i - 1, j + 1) + diag);
        if (known_at(i + 1, j + 1)) u = std::min(u, f.at(i + 1, j + 1) + diag);
        return u;
    };

    auto push_updated = [&](int i, int j) {
        std::size_t idx = std::size_t(j) * f.nx + i;
        if (state[idx] == KNOWN) return;
        double u = update_node(i, j);
        if (u < f.values[idx]) {
            f.values[idx] = u;
            state[idx] = NARROW;
            heap.push_or_update(idx, u);
        }
    };

    auto push_neighbors = [&](int i, int j) {
        const int di[8] = {1, -1, 0, 0, 1, 1, -1, -1};
        const int dj[8] = {0, 0, 1, -1, 1, -1, 1, -1};
        for (int k = 0; k < 8; ++k) {
            int ii = i + di[k], jj = j + dj[k];
            if (!f.in_mask(ii, jj)) continue;
            push_updated(ii, jj);
        }
    };

    for (std::size_t idx = 0; idx < total; ++idx)
        if (state[idx] == KNOWN) push_neighbors(int(idx % f.nx), int(idx / f.nx));

    while (!heap.empty()) {
        auto [idx, key] = heap.pop();
        state[idx] = KNOWN;
        f.values[idx] = key;
        push_neighbors(int(idx % f.nx), int(idx / f.nx));
    }
    return f;
}

}  // namespace geotime

#endif  // GEOTIME_EIKONAL_HPP
