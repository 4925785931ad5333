#ifndef GEOTIME_CONFIG_HPP
#define GEOTIME_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geotime/dataset.hpp"
#include "geotime/domain.hpp"
#include "geotime/metric.hpp"
#include "geotime/reconstruct.hpp"

namespace geotime {

/// Parsed `geotime-config v1` file: metric catalog entry, boundary curve
/// (explicit Fourier tables or a named preset), measurement arc, sampling
/// plans and tolerance overrides. Whitespace-separated `key = values` lines,
/// `#` comments.
struct RunConfig {
    MetricSpec metric;
    std::vector<double> bx_a, bx_b, by_a, by_b;  // explicit Fourier tables
    std::string boundary_preset;                 // circle R | ellipse A B | horseshoe R W GAP
    std::vector<double> preset_params;
    double gamma_lo = 0.0, gamma_hi = 0.0;
    bool gamma_is_fraction = true;
    int sensors = 32;
    SourcePlan plan;
    OracleOptions oracle;
    ReconOptions recon;
    double ext_eps = 0.1;
    unsigned long seed = 0;
    std::string raw_text;

    FourierCurve boundary_curve() const {
        if (!boundary_preset.empty()) {
            if (boundary_preset == "circle") {
                return FourierCurve::circle(preset_params.at(0));
            } else if (boundary_preset == "ellipse") {
                return FourierCurve::ellipse(preset_params.at(0), preset_params.at(1));
            } else if (boundary_preset == "horseshoe") {
                return horseshoe_curve(preset_params.at(0), preset_params.at(1), preset_params.at(2));
            }
            throw config_error("unknown boundary preset " + boundary_preset);
        }
        return FourierCurve(bx_a, bx_b, by_a, by_b);
    }

    DomainSpec domain() const {
        FourierCurve c = boundary_curve();
        double L = c.total_length();
        double lo = gamma_is_fraction ? gamma_lo * L : gamma_lo;
        double hi = gamma_is_fraction ? gamma_hi * L : gamma_hi;
        return DomainSpec(std::move(c), lo, hi);
    }

    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ULL;
        for (char c : raw_text) {
            h ^= std::uint64_t(static_cast<unsigned char>(c));
            h *= 1099511628211ULL;
        }
        return h;
    }
};

namespace detail {

inline std::vector<double> parse_numbers(const std::string& s, int line_no) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string tok;
    while (ss >> tok) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw config_error("line " + std::to_string(line_no) + ": expected a number, got '" +
                               tok + "'");
        }
    }
    return out;
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in, const std::string& name = "<config>") {
    RunConfig cfg;
    std::string line;
    int line_no = 0;
    std::ostringstream raw;
    bool header_seen = false;
    bool gamma_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        raw << line << '\n';
        std::string stripped = line;
        auto hashpos = stripped.find('#');
        if (hashpos != std::string::npos) stripped.resize(hashpos);
        while (!stripped.empty() && (stripped.back() == ' ' || stripped.back() == '\t' || stripped.back() == '\r'))
            stripped.pop_back();
        std::size_t first = stripped.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        stripped = stripped.substr(first);

        if (!header_seen) {
            if (stripped != "geotime-config v1")
                throw config_error(name + " line " + std::to_string(line_no) +
                                   ": first line must be 'geotime-config v1'");
            header_seen = true;
            continue;
        }

        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw config_error(name + " line " + std::to_string(line_no) + ": expected key = value");
        std::string key = stripped.substr(0, eq);
        std::string val = stripped.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::size_t vfirst = val.find_first_not_of(" \t");
        val = vfirst == std::string::npos ? "" : val.substr(vfirst);

        auto nums = [&]() { return detail::parse_numbers(val, line_no); };
        try {
            if (key == "metric.id") {
                if (val == "euclidean") cfg.metric.id = MetricCatalog::euclidean;
                else if (val == "conformal_bump") cfg.metric.id = MetricCatalog::conformal_bump;
                else if (val == "constant_curvature") cfg.metric.id = MetricCatalog::constant_curvature;
                else if (val == "custom_spd") cfg.metric.id = MetricCatalog::custom_spd;
                else throw config_error("unknown metric id '" + val + "'");
            } else if (key == "metric.params") {
                cfg.metric.params = nums();
            } else if (key == "metric.poly_degree") {
                int d = int(nums().at(0));
                cfg.metric.p11.degree = cfg.metric.p12.degree = cfg.metric.p22.degree = d;
            } else if (key == "metric.poly11") {
                cfg.metric.p11.coeff = nums();
            } else if (key == "metric.poly12") {
                cfg.metric.p12.coeff = nums();
            } else if (key == "metric.poly22") {
                cfg.metric.p22.coeff = nums();
            } else if (key == "chart") {
                auto v = nums();
                if (v.size() != 4) throw config_error("chart needs 4 numbers");
                cfg.metric.chart = {v[0], v[1], v[2], v[3]};
            } else if (key == "boundary.preset") {
                std::istringstream ss(val);
                ss >> cfg.boundary_preset;
                std::string rest;
                std::getline(ss, rest);
                cfg.preset_params = detail::parse_numbers(rest, line_no);
            } else if (key == "boundary.x") {
                auto v = nums();
                cfg.bx_a.clear();
                cfg.bx_b.assign(1, 0.0);
                cfg.bx_a.push_back(v.at(0));
                for (std::size_t i = 1; i + 1 < v.size(); i += 2) {
                    cfg.bx_a.push_back(v[i]);
                    cfg.bx_b.push_back(v[i + 1]);
                }
            } else if (key == "boundary.y") {
                auto v = nums();
                cfg.by_a.clear();
                cfg.by_b.assign(1, 0.0);
                cfg.by_a.push_back(v.at(0));
                for (std::size_t i = 1; i + 1 < v.size(); i += 2) {
                    cfg.by_a.push_back(v[i]);
                    cfg.by_b.push_back(v[i + 1]);
                }
            } else if (key == "gamma" || key == "gamma_frac") {
                auto v = nums();
                if (v.size() != 2) throw config_error("gamma needs 2 numbers");
                cfg.gamma_lo = v[0];
                cfg.gamma_hi = v[1];
                cfg.gamma_is_fraction = (key == "gamma_frac");
                gamma_seen = true;
            } else if (key == "sensors") {
                cfg.sensors = int(nums().at(0));
            } else if (key == "sources.h") {
                cfg.plan.h_src = nums().at(0);
            } else if (key == "sources.collar_depth") {
                cfg.plan.collar_depth = nums().at(0);
            } else if (key == "sources.collar_spacing") {
                cfg.plan.collar_spacing = nums().at(0);
            } else if (key == "sources.lattice_clip") {
                cfg.plan.lattice_clip = nums().at(0);
            } else if (key == "sources.extra") {
                std::istringstream ss(val);
                std::string group;
                while (std::getline(ss, group, ';')) {
                    auto v = detail::parse_numbers(group, line_no);
                    if (v.empty()) continue;
                    if (v.size() != 2) throw config_error("sources.extra groups need 2 numbers");
                    cfg.plan.extra.push_back({v[0], v[1]});
                }
            } else if (key == "seed") {
                cfg.seed = (unsigned long)(nums().at(0));
            } else if (key == "ext.eps") {
                cfg.ext_eps = nums().at(0);
            } else if (key == "oracle.method") {
                cfg.oracle.method = val;
            } else if (key == "oracle.multistart") {
                cfg.oracle.multistart = int(nums().at(0));
            } else if (key == "oracle.eikonal_h") {
                cfg.oracle.eikonal_h = nums().at(0);
            } else if (key == "recon.v_grid") {
                cfg.recon.v_grid = int(nums().at(0));
            } else if (key == "recon.v_cap") {
                cfg.recon.v_cap = nums().at(0);
            } else if (key == "recon.tol_grad") {
                cfg.recon.tol_grad = nums().at(0);
            } else if (key == "recon.kappa_spike") {
                cfg.recon.kappa_spike = nums().at(0);
            } else if (key == "recon.kappa_cont") {
                cfg.recon.kappa_cont = nums().at(0);
            } else if (key == "recon.tol_T") {
                cfg.recon.tol_T = nums().at(0);
            } else if (key == "recon.c_jump") {
                cfg.recon.c_jump = nums().at(0);
            } else if (key == "recon.h_neighbors") {
                cfg.recon.h_neighbors = int(nums().at(0));
            } else {
                throw config_error("unknown key '" + key + "'");
            }
        } catch (const config_error& e) {
            std::string msg = e.what();
            if (msg.find("line ") == 0 || msg.find(name) == 0) throw;
            throw config_error(name + " line " + std::to_string(line_no) + ": " + msg);
        } catch (const std::exception& e) {
            throw config_error(name + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header_seen) throw config_error(name + ": empty config, missing 'geotime-config v1' header");
    if (!gamma_seen) throw config_error(name + ": gamma (or gamma_frac) must be declared");
    if (cfg.boundary_preset.empty() && (cfg.bx_a.empty() || cfg.by_a.empty()))
        throw config_error(name + ": boundary tables (boundary.x / boundary.y) or a preset required");
    if (cfg.metric.id == MetricCatalog::custom_spd &&
        (cfg.metric.p11.coeff.empty() || cfg.metric.p22.coeff.empty()))
        throw config_error(name + ": custom_spd requires metric.poly11/poly12/poly22 tables");
    cfg.raw_text = raw.str();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path);
    return parse_config(in, path);
}

}  // namespace geotime

#endif  // GEOTIME_CONFIG_HPP
