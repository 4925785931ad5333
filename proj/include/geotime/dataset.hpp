#ifndef GEOTIME_DATASET_HPP
#define GEOTIME_DATASET_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geotime/domain.hpp"
#include "geotime/eikonal.hpp"
#include "geotime/linalg.hpp"
#include "geotime/metric.hpp"
#include "geotime/parallel.hpp"
#include "geotime/shooting.hpp"

namespace geotime {

struct SensorArray {
    std::vector<double> s;    // boundary arc-length parameters
    std::vector<double> u;    // normalized coordinates in [0,1]
    std::vector<Vec2> pos;    // chart positions (ground-truth side only)
};

/// Sensors uniform in the arc-length parameter of Gamma. The dataset keeps
/// only the abstract u coordinate; positions stay on the truth side.
inline SensorArray make_sensors(const DomainSpec& domain, int m) {
    if (m < 8) throw config_error("sensor count must be at least 8");
    SensorArray arr;
    arr.s.resize(m);
    arr.u.resize(m);
    arr.pos.resize(m);
    for (int j = 0; j < m; ++j) {
        double u = double(j) / double(m - 1);
        double s = domain.gamma_a + (domain.gamma_b - domain.gamma_a) * u;
        arr.s[j] = s;
        arr.u[j] = u;
        arr.pos[j] = domain.curve.point_at_s(s);
    }
    return arr;
}

enum class SourceKind : int { lattice = 0, collar = 1, gamma_trace = 2, extra = 3 };

struct PlannedSource {
    Vec2 p;
    SourceKind kind;
    double depth;  // euclidean distance to the boundary, truth side only
};

struct SourcePlan {
    double h_src = 0.1;
    double collar_depth = 0.0;    // 0: default 2*h_src
    double collar_spacing = 0.0;  // 0: default = collar_depth
    double lattice_clip = 1.5;    // drop lattice points shallower than clip*collar_depth
    std::vector<Vec2> extra;      // explicit additional sources

    double collar() const { return collar_depth > 0 ? collar_depth : 2.0 * h_src; }
    double spacing() const { return collar_spacing > 0 ? collar_spacing : collar(); }
};

/// Interior lattice + inward collar ring + one source on every sensor.
/// The collar is the shallowest interior layer by construction; lattice
/// points closer to the boundary than clip*collar are dropped so depth
/// quantization near the boundary is controlled by the collar alone.
inline std::vector<PlannedSource> plan_sources(const DomainSpec& domain, const SourcePlan& plan,
                                               const SensorArray& sensors) {
    std::vector<PlannedSource> out;
    for (std::size_t j = 0; j < sensors.pos.size(); ++j)
        out.push_back({sensors.pos[j], SourceKind::gamma_trace, 0.0});

    double collar = plan.collar();
    double L = domain.length();
    int n_collar = std::max(8, int(std::floor(L / plan.spacing())));
    for (int k = 0; k < n_collar; ++k) {
        double s = L * double(k) / double(n_collar);
        double t = domain.curve.t_of_s(s);
        Vec2 c = domain.curve.eval(t);
        Vec2 inward = normalized(perp(domain.curve.d1(t)));  // CCW: left is inside
        Vec2 p = c + inward * collar;
        if (domain.inside(p)) out.push_back({p, SourceKind::collar, collar});
    }

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Vec2& q : domain.polyline()) {
        xmin = std::min(xmin, q.x);
        xmax = std::max(xmax, q.x);
        ymin = std::min(ymin, q.y);
        ymax = std::max(ymax, q.y);
    }
    double clip = plan.lattice_clip * collar;
    for (double y = ymin + 0.5 * plan.h_src; y < ymax; y += plan.h_src)
        for (double x = xmin + 0.5 * plan.h_src; x < xmax; x += plan.h_src) {
            Vec2 p{x, y};
            if (!domain.inside(p)) continue;
            double depth = domain.distance_to_boundary(p);
            if (depth < clip) continue;
            out.push_back({p, SourceKind::lattice, depth});
        }

    for (const Vec2& p : plan.extra) {
        double depth = domain.distance_to_boundary(p);
        if (!domain.inside(p) && depth > 1e-5)
            throw config_error("extra source outside the domain");
        if (depth < 1e-5) depth = 0.0;  // snapped to the boundary
        out.push_back({p, SourceKind::extra, depth});
    }
    return out;
}

struct DatasetTruth {
    std::vector<Vec2> source;
    std::vector<int> kind;
    std::vector<double> depth;
    std::vector<double> sensor_s;
    std::vector<Vec2> sensor_pos;
};

struct TravelTimeDataset {
    int m = 0;
    long N = 0;
    std::vector<double> sensor_u;
    std::vector<double> times;  // row major N x m
    double h_src = 0.0;
    double collar_depth = 0.0;
    double oracle_tol = 1e-9;
    std::string oracle = "shooting";
    std::vector<long> failed_rows;

    double at(long i, int j) const { return times[std::size_t(i) * m + j]; }
    double& at(long i, int j) { return times[std::size_t(i) * m + j]; }

    double sup_gap(long i, long k) const {
        double g = 0.0;
        for (int j = 0; j < m; ++j) g = std::max(g, std::abs(at(i, j) - at(k, j)));
        return g;
    }
};

struct OracleOptions {
    std::string method = "shooting";  // or "eikonal" for non-convex fixtures
    int multistart = 24;
    double eikonal_h = 1.0 / 256.0;
    int threads = 0;
};

struct GeneratedData {
    TravelTimeDataset ds;
    DatasetTruth truth;
};

inline GeneratedData generate_dataset(const MetricSpec& spec, const DomainSpec& domain,
                                      const SourcePlan& plan, const SensorArray& sensors,
                                      const OracleOptions& oracle = {}) {
    std::vector<PlannedSource> sources = plan_sources(domain, plan, sensors);
    if (sources.size() < 50)
        throw config_error("source plan yields fewer than 50 sources; refine h_src");

    GeneratedData out;
    TravelTimeDataset& ds = out.ds;
    ds.m = int(sensors.u.size());
    ds.N = long(sources.size());
    ds.sensor_u = sensors.u;
    ds.h_src = plan.h_src;
    ds.collar_depth = plan.collar();
    ds.oracle = oracle.method;
    ds.times.assign(std::size_t(ds.N) * ds.m, 0.0);

    out.truth.sensor_s = sensors.s;
    out.truth.sensor_pos = sensors.pos;
    for (auto& s : sources) {
        out.truth.source.push_back(s.p);
        out.truth.kind.push_back(int(s.kind));
        out.truth.depth.push_back(s.depth);
    }

    if (oracle.method == "shooting") {
        ds.oracle_tol = 1e-9;
        std::vector<std::uint8_t> failed(sources.size(), 0);
        ShootOptions so;
        so.multistart = oracle.multistart;
        parallel_for(sources.size(), [&](std::size_t i) {
            for (int j = 0; j < ds.m; ++j) {
                const Vec2& q = sensors.pos[j];
                if (norm(sources[i].p - q) < 1e-12) {
                    ds.at(long(i), j) = 0.0;
                    continue;
                }
                BvpResult r = distance_shooting(spec, domain, sources[i].p, q, so);
                if (!r.converged) {
                    ds.at(long(i), j) = std::numeric_limits<double>::quiet_NaN();
                    failed[i] = 1;
                } else {
                    ds.at(long(i), j) = r.distance;
                }
            }
        }, oracle.threads);
        for (std::size_t i = 0; i < failed.size(); ++i)
            if (failed[i]) ds.failed_rows.push_back(long(i));
    } else if (oracle.method == "eikonal") {
        ds.oracle_tol = 5.0 * oracle.eikonal_h;
        EikonalOptions eo;
        eo.h = oracle.eikonal_h;
        eo.init_radius = std::min(0.25, 12.0 * oracle.eikonal_h);
        std::vector<DistanceField> fields(std::size_t(ds.m));
        parallel_for(std::size_t(ds.m), [&](std::size_t j) {
            fields[j] = distance_eikonal(spec, domain, sensors.pos[j], eo);
        }, oracle.threads);
        for (long i = 0; i < ds.N; ++i) {
            bool bad = false;
            for (int j = 0; j < ds.m; ++j) {
                double v = fields[std::size_t(j)].sample(sources[std::size_t(i)].p);
                if (norm(sources[std::size_t(i)].p - sensors.pos[j]) < 1e-12) v = 0.0;
                if (!std::isfinite(v)) bad = true;
                ds.at(i, j) = v;
            }
            if (bad) ds.failed_rows.push_back(i);
        }
    } else {
        throw config_error("unknown oracle method: " + oracle.method);
    }
    return out;
}

// ---------------------------------------------------------------------------
// File format
//
//   line 1: geotime-dataset v1
//   line 2: m=<int> N=<int> layout=row-major [h_src=..] [collar=..]
//           [oracle=..] [oracle_tol=..]
//   line 3: sensor u parameters, ASCII decimals
//   then  : N*m float64, little endian, row major
//
// The .truth sidecar mirrors the framing with source rows (x, y, kind,
// depth) and carries the ground-truth sensor placement.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_dataset(const TravelTimeDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open " + path + " for writing");
    std::ostringstream head;
    head << "geotime-dataset v1\n";
    head << "m=" << ds.m << " N=" << ds.N << " layout=row-major";
    head << " h_src=" << detail::fmt_double(ds.h_src);
    head << " collar=" << detail::fmt_double(ds.collar_depth);
    head << " oracle=" << ds.oracle;
    head << " oracle_tol=" << detail::fmt_double(ds.oracle_tol) << "\n";
    for (int j = 0; j < ds.m; ++j) {
        if (j) head << ' ';
        head << detail::fmt_double(ds.sensor_u[j]);
    }
    head << "\n";
    out << head.str();
    out.write(reinterpret_cast<const char*>(ds.times.data()),
              std::streamsize(ds.times.size() * sizeof(double)));
    if (!out) throw data_error("short write to " + path);
}

inline void write_truth(const TravelTimeDataset& ds, const DatasetTruth& truth,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open " + path + " for writing");
    out << "geotime-truth v1\n";
    out << "m=" << ds.m << " N=" << ds.N << " fields=x,y,kind,depth layout=row-major\n";
    for (int j = 0; j < ds.m; ++j) {
        if (j) out << ' ';
        out << detail::fmt_double(truth.sensor_s[j]);
    }
    out << "\n";
    for (int j = 0; j < ds.m; ++j) {
        if (j) out << ' ';
        out << detail::fmt_double(truth.sensor_pos[j].x) << ' '
            << detail::fmt_double(truth.sensor_pos[j].y);
    }
    out << "\n";
    std::vector<double> rows;
    rows.reserve(std::size_t(ds.N) * 4);
    for (long i = 0; i < ds.N; ++i) {
        rows.push_back(truth.source[std::size_t(i)].x);
        rows.push_back(truth.source[std::size_t(i)].y);
        rows.push_back(double(truth.kind[std::size_t(i)]));
        rows.push_back(truth.depth[std::size_t(i)]);
    }
    out.write(reinterpret_cast<const char*>(rows.data()), std::streamsize(rows.size() * sizeof(double)));
    if (!out) throw data_error("short write to " + path);
}

namespace detail {

inline std::string read_line_at(std::ifstream& in, std::size_t& offset, const std::string& path) {
    std::string line;
    if (!std::getline(in, line))
        throw data_error(path + ": malformed header, unexpected end of file at byte offset " +
                         std::to_string(offset));
    offset += line.size() + 1;
    return line;
}

}  // namespace detail

inline TravelTimeDataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open dataset file " + path);
    std::size_t offset = 0;
    std::string line = detail::read_line_at(in, offset, path);
    if (line != "geotime-dataset v1")
        throw data_error(path + ": version mismatch, expected 'geotime-dataset v1', got '" + line +
                         "'");
    TravelTimeDataset ds;
    line = detail::read_line_at(in, offset, path);
    {
        std::istringstream ss(line);
        std::string tok;
        bool saw_m = false, saw_n = false, saw_layout = false;
        while (ss >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw data_error(path + ": malformed header token '" + tok + "'");
            std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "m") { ds.m = std::stoi(val); saw_m = true; }
            else if (key == "N") { ds.N = std::stol(val); saw_n = true; }
            else if (key == "layout") {
                if (val != "row-major") throw data_error(path + ": unsupported layout " + val);
                saw_layout = true;
            } else if (key == "h_src") ds.h_src = std::stod(val);
            else if (key == "collar") ds.collar_depth = std::stod(val);
            else if (key == "oracle") ds.oracle = val;
            else if (key == "oracle_tol") ds.oracle_tol = std::stod(val);
            // unknown keys ignored for forward compatibility
        }
        if (!saw_m || !saw_n || !saw_layout)
            throw data_error(path + ": header line 2 must declare m, N and layout");
        if (ds.m < 1 || ds.N < 1) throw data_error(path + ": non-positive matrix dimensions");
    }
    line = detail::read_line_at(in, offset, path);
    {
        std::istringstream ss(line);
        double u;
        while (ss >> u) ds.sensor_u.push_back(u);
        if (int(ds.sensor_u.size()) != ds.m)
            throw data_error(path + ": expected " + std::to_string(ds.m) +
                             " sensor parameters, found " + std::to_string(ds.sensor_u.size()));
        for (int j = 1; j < ds.m; ++j)
            if (!(ds.sensor_u[j] > ds.sensor_u[j - 1]))
                throw data_error(path + ": sensor parameters must increase strictly (index " +
                                 std::to_string(j) + ")");
    }
    ds.times.resize(std::size_t(ds.N) * ds.m);
    in.read(reinterpret_cast<char*>(ds.times.data()),
            std::streamsize(ds.times.size() * sizeof(double)));
    std::size_t got = std::size_t(in.gcount());
    if (got != ds.times.size() * sizeof(double))
        throw data_error(path + ": truncated matrix block, expected " +
                         std::to_string(ds.times.size() * sizeof(double)) + " bytes, file ends at byte offset " +
                         std::to_string(offset + got));
    return ds;
}

inline DatasetTruth read_truth(const std::string& path, const TravelTimeDataset& ds) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open truth sidecar " + path);
    std::size_t offset = 0;
    std::string line = detail::read_line_at(in, offset, path);
    if (line != "geotime-truth v1")
        throw data_error(path + ": version mismatch, expected 'geotime-truth v1'");
    line = detail::read_line_at(in, offset, path);  // dims; trust but verify N
    DatasetTruth t;
    line = detail::read_line_at(in, offset, path);
    {
        std::istringstream ss(line);
        double v;
        while (ss >> v) t.sensor_s.push_back(v);
    }
    line = detail::read_line_at(in, offset, path);
    {
        std::istringstream ss(line);
        double x, y;
        while (ss >> x >> y) t.sensor_pos.push_back({x, y});
    }
    std::vector<double> rows(std::size_t(ds.N) * 4);
    in.read(reinterpret_cast<char*>(rows.data()), std::streamsize(rows.size() * sizeof(double)));
    if (std::size_t(in.gcount()) != rows.size() * sizeof(double))
        throw data_error(path + ": truncated truth block at byte offset " +
                         std::to_string(offset + std::size_t(in.gcount())));
    for (long i = 0; i < ds.N; ++i) {
        t.source.push_back({rows[std::size_t(i) * 4], rows[std::size_t(i) * 4 + 1]});
        t.kind.push_back(int(rows[std::size_t(i) * 4 + 2]));
        t.depth.push_back(rows[std::size_t(i) * 4 + 3]);
    }
    return t;
}

/// Data-side sanity: rows must be distinct in sup norm (the embedding is
/// injective for convex truths). Near-duplicates are reported, not dropped.
struct RowSeparation {
    double min_gap = std::numeric_limits<double>::infinity();
    long arg_i = -1, arg_k = -1;
    std::vector<std::pair<long, long>> near_duplicates;
};

inline RowSeparation row_separation(const TravelTimeDataset& ds, double dup_tol) {
    RowSeparation rs;
    for (long i = 0; i < ds.N; ++i)
        for (long k = i + 1; k < ds.N; ++k) {
            double g = ds.sup_gap(i, k);
            if (g < rs.min_gap) {
                rs.min_gap = g;
                rs.arg_i = i;
                rs.arg_k = k;
            }
            if (g <= dup_tol) rs.near_duplicates.push_back({i, k});
        }
    return rs;
}

}  // namespace geotime

#endif  // GEOTIME_DATASET_HPP
