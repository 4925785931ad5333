#ifndef GEOTIME_REPORT_HPP
#define GEOTIME_REPORT_HPP

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "geotime/geodesic.hpp"
#include "geotime/reconstruct.hpp"
#include "geotime/verify.hpp"

namespace geotime {

inline void write_trajectory_csv(const GeodesicRecord& rec, const std::string& path) {
    std::ofstream out(path);
    out << "t,x,y,vx,vy\n";
    out << std::setprecision(17);
    for (const auto& s : rec.samples)
        out << s.t << ',' << s.point.x << ',' << s.point.y << ',' << s.velocity.x << ','
            << s.velocity.y << '\n';
}

/// Minimal standalone SVG, enough for cut locus overlays and collapse
/// scatter plots.
class SvgCanvas {
  public:
    SvgCanvas(double xmin, double xmax, double ymin, double ymax, int px = 700)
        : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), px_(px) {
        scale_ = px_ / (xmax_ - xmin_);
        py_ = int(scale_ * (ymax_ - ymin_));
        body_ << std::setprecision(7);
    }

    void polyline(const std::vector<Vec2>& pts, const std::string& color, double width,
                  bool closed = false) {
        if (pts.size() < 2) return;
        body_ << "<path d=\"M";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto [x, y] = map(pts[i]);
            body_ << (i ? " L" : "") << x << ' ' << y;
        }
        if (closed) body_ << " Z";
        body_ << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"/>\n";
    }

    void dot(const Vec2& p, double r, const std::string& color) {
        auto [x, y] = map(p);
        body_ << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r << "\" fill=\"" << color
              << "\"/>\n";
    }

    void text(const Vec2& p, const std::string& s, const std::string& color = "#333") {
        auto [x, y] = map(p);
        body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"12\" fill=\"" << color
              << "\">" << s << "</text>\n";
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px_ << "\" height=\"" << py_
            << "\" viewBox=\"0 0 " << px_ << ' ' << py_ << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body_.str() << "</svg>\n";
    }

  private:
    double xmin_, xmax_, ymin_, ymax_, scale_;
    int px_, py_;
    std::ostringstream body_;

    std::pair<double, double> map(const Vec2& p) const {
        return {(p.x - xmin_) * scale_, (ymax_ - p.y) * scale_};
    }
};

inline void write_recon_report(const ReconstructedManifold& rm, const TravelTimeDataset& ds,
                               const std::string& dir, bool blind) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    {
        std::ofstream out(fs::path(dir) / "sources.csv");
        out << std::setprecision(17);
        out << "id,boundary,via_trace,boundary_jump,chart_sensor,chart_beta,c1,c2,has_metric,"
               "g11,g12,g22,cosphere_residual,n_covectors,note\n";
        for (const auto& s : rm.sources) {
            out << s.id << ',' << int(s.boundary) << ',' << int(s.via_trace) << ','
                << s.boundary_jump << ',' << s.chart.sensor << ',' << int(s.chart.is_beta) << ','
                << s.chart.c1 << ',' << s.chart.c2 << ',' << int(s.has_metric) << ',' << s.g_fit.xx
                << ',' << s.g_fit.xy << ',' << s.g_fit.yy << ',' << s.cosphere_residual << ','
                << s.n_covectors << ",\"" << s.note << "\"\n";
        }
    }
    {
        std::ofstream out(fs::path(dir) / "gamma.csv");
        out << std::setprecision(17);
        out << "u,lambda,trace_row\n";
        for (std::size_t j = 0; j < rm.gg.u.size(); ++j)
            out << rm.gg.u[j] << ',' << rm.gg.lambda[j] << ',' << rm.gg.gamma_row[j] << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "report.txt");
        out << "geotime-report v1\n";
        out << "mode: " << (blind ? "blind" : "sighted") << "\n";
        out << "sources: " << ds.N << "  sensors: " << ds.m << "\n";
        out << "declared h_src: " << ds.h_src << "  collar: " << ds.collar_depth
            << "  oracle: " << ds.oracle << " (tol " << ds.oracle_tol << ")\n";
        out << "boundary-classified: " << rm.n_boundary << "\n";
        out << "metric fitted: " << rm.n_metric << "\n";
        out << "chart failures: " << rm.n_chart_failures << "\n";
        out << "min row sup-gap: " << rm.separation.min_gap << " (rows " << rm.separation.arg_i
            << "," << rm.separation.arg_k << ")\n";
        out << "near-duplicate rows: " << rm.separation.near_duplicates.size() << "\n";
        if (!rm.separation.near_duplicates.empty())
            out << "DATA DEGENERACY: sup-norm near-duplicate rows detected; the travel time data "
                   "does not separate these sources\n";
        if (!ds.failed_rows.empty()) out << "oracle-failed rows: " << ds.failed_rows.size() << "\n";
    }
}

inline void write_manifest(const std::string& dir, const std::string& command,
                           std::uint64_t config_hash, unsigned long seed,
                           const std::vector<std::pair<std::string, std::string>>& extras = {}) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream out(fs::path(dir) / "manifest.txt");
    out << "geotime-manifest v1\n";
    out << "command: " << command << "\n";
    out << "config_hash: " << std::hex << config_hash << std::dec << "\n";
    out << "seed: " << seed << "\n";
    for (auto& [k, v] : extras) out << k << ": " << v << "\n";
}

}  // namespace geotime

#endif  // GEOTIME_REPORT_HPP
