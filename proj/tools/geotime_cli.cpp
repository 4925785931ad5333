// Command line front end: simulate travel time datasets, run the blind
// reconstruction, verify against ground truth, and reproduce the cut locus
// and horseshoe collapse studies.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>

#include "geotime/geotime.hpp"

namespace fs = std::filesystem;
using namespace geotime;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitPipeline = 4;

struct CommonArgs {
    std::string out_dir = "run";
    unsigned long seed = 0;
    int threads = 0;
};

int cmd_simulate(const std::string& config_path, const CommonArgs& common, bool allow_nonconvex,
                 double h_src_override, int sensors_override) {
    RunConfig cfg = load_config(config_path);
    if (common.seed) cfg.seed = common.seed;
    if (h_src_override > 0) cfg.plan.h_src = h_src_override;
    if (sensors_override > 0) cfg.sensors = sensors_override;

    DomainSpec domain = cfg.domain();
    if (!domain.curve.is_simple())
        throw config_error("boundary curve is not simple (self-intersection detected)");
    ConvexityReport conv = check_strict_convexity(domain, cfg.metric);
    if (!conv.pass && !allow_nonconvex)
        throw config_error("domain fails strict convexity (max Pi = " + std::to_string(conv.max_pi) +
                           " at s = " + std::to_string(conv.arg_s) +
                           "); pass --allow-nonconvex to simulate anyway");
    if (!conv.pass && cfg.oracle.method == "shooting")
        throw config_error("non-convex domains need oracle.method = eikonal");

    SensorArray sensors = make_sensors(domain, cfg.sensors);
    OracleOptions oracle = cfg.oracle;
    oracle.threads = common.threads;
    GeneratedData gen = generate_dataset(cfg.metric, domain, cfg.plan, sensors, oracle);

    fs::create_directories(common.out_dir);
    std::string ds_path = (fs::path(common.out_dir) / "dataset.gtt").string();
    write_dataset(gen.ds, ds_path);
    write_truth(gen.ds, gen.truth, ds_path + ".truth");
    write_manifest(common.out_dir, "simulate", cfg.hash(), cfg.seed,
                   {{"config", config_path},
                    {"convexity_max_pi", std::to_string(conv.max_pi)},
                    {"oracle", gen.ds.oracle},
                    {"oracle_tol", std::to_string(gen.ds.oracle_tol)}});

    std::cout << "dataset: " << ds_path << "\n"
              << "sources N = " << gen.ds.N << ", sensors m = " << gen.ds.m << "\n"
              << "oracle = " << gen.ds.oracle << " (tol " << gen.ds.oracle_tol << ")\n"
              << "convexity margin (max Pi) = " << conv.max_pi << "\n"
              << "failed rows = " << gen.ds.failed_rows.size() << "\n";
    return kExitOk;
}

int cmd_reconstruct(const std::string& dataset_path, const CommonArgs& common, bool blind,
                    const ReconOptions& overrides) {
    TravelTimeDataset ds = read_dataset(dataset_path);
    ReconOptions opts = overrides;
    opts.threads = common.threads <= 0 ? default_thread_count() : common.threads;
    ReconstructedManifold rm = reconstruct_all(ds, opts);
    write_recon_report(rm, ds, common.out_dir, blind);
    write_manifest(common.out_dir, "reconstruct", 0, common.seed,
                   {{"dataset", dataset_path}, {"blind", blind ? "1" : "0"}});
    std::cout << "sources: " << ds.N << " classified, " << rm.n_boundary << " boundary, "
              << rm.n_metric << " with fitted metric\n"
              << "report bundle: " << common.out_dir << "\n";
    long hard_failures = 0;
    for (auto& s : rm.sources)
        if (s.chart.sensor < 0) ++hard_failures;
    return hard_failures == long(rm.sources.size()) ? kExitPipeline : kExitOk;
}

int cmd_verify(const std::string& dataset_path, const std::string& config_path,
               const CommonArgs& common) {
    TravelTimeDataset ds = read_dataset(dataset_path);
    DatasetTruth truth = read_truth(dataset_path + ".truth", ds);
    RunConfig cfg = load_config(config_path);
    DomainSpec domain = cfg.domain();
    ReconOptions opts = cfg.recon;
    opts.threads = common.threads <= 0 ? default_thread_count() : common.threads;
    ReconstructedManifold rm = reconstruct_all(ds, opts);

    BoundaryConfusion conf = boundary_confusion(rm, truth, 3.0 * ds.collar_depth);
    EmbeddingStats emb = embedding_check(ds);

    // metric error table on a seeded subsample (the per-source truth pull
    // costs several shooting solves each)
    std::mt19937_64 rng(cfg.seed + 17);
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < rm.sources.size(); ++i)
        if (rm.sources[i].has_metric && !rm.sources[i].boundary) ids.push_back(i);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::size_t n_check = std::min<std::size_t>(ids.size(), 160);
    std::vector<double> errs(n_check, std::numeric_limits<double>::quiet_NaN());
    parallel_for(n_check, [&](std::size_t k) {
        const SourceRecon& sr = rm.sources[ids[k]];
        TruthChart tc =
            TruthChart::at_sensor(cfg.metric, domain, truth.sensor_s[std::size_t(sr.chart.sensor)]);
        Mat2 g_true = tc.metric_in_chart(truth.source[ids[k]]);
        errs[k] = frobenius(sr.g_fit - g_true) / frobenius(g_true);
    }, opts.threads);

    fs::create_directories(common.out_dir);
    {
        std::ofstream out(fs::path(common.out_dir) / "metric_errors.csv");
        out << std::setprecision(17) << "id,x,y,rel_frobenius\n";
        for (std::size_t k = 0; k < n_check; ++k)
            out << ids[k] << ',' << truth.source[ids[k]].x << ',' << truth.source[ids[k]].y << ','
                << errs[k] << '\n';
    }
    std::vector<double> sorted = errs;
    sorted.erase(std::remove_if(sorted.begin(), sorted.end(),
                                [](double v) { return !std::isfinite(v); }),
                 sorted.end());
    std::sort(sorted.begin(), sorted.end());
    auto pct = [&](double q) {
        return sorted.empty() ? -1.0 : sorted[std::size_t(q * double(sorted.size() - 1))];
    };
    {
        std::ofstream out(fs::path(common.out_dir) / "verify_report.txt");
        out << "geotime-verify v1\n";
        out << "boundary confusion: tp=" << conf.tp << " fp=" << conf.fp << " fn=" << conf.fn
            << " tn=" << conf.tn << "\n";
        out << "  precision=" << conf.precision() << " recall=" << conf.recall() << "\n";
        out << "  errors inside margin band: fp=" << conf.fp_margin << " fn=" << conf.fn_margin
            << "\n";
        out << "embedding min row gap: " << emb.min_gap << " over " << emb.n_pairs << " pairs\n";
        out << "near-duplicate rows: " << emb.collapsed.size() << "\n";
        out << "metric rel Frobenius (n=" << sorted.size() << "): p50=" << pct(0.5)
            << " p90=" << pct(0.9) << " max=" << pct(1.0) << "\n";
    }
    write_manifest(common.out_dir, "verify", cfg.hash(), cfg.seed, {{"dataset", dataset_path}});
    std::cout << "boundary precision " << conf.precision() << ", recall " << conf.recall()
              << "; metric p90 " << pct(0.9) << "\n"
              << "report: " << common.out_dir << "/verify_report.txt\n";
    return kExitOk;
}

int cmd_cutlocus(const std::string& config_path, const CommonArgs& common, double px, double py,
                 int n_directions) {
    RunConfig cfg = load_config(config_path);
    DomainSpec domain = cfg.domain();
    DomainSpec extended = extend_domain(domain, cfg.metric, cfg.ext_eps);
    CutLocusOptions opts;
    opts.n_directions = n_directions;
    opts.cut.threads = common.threads <= 0 ? default_thread_count() : common.threads;
    CutLocusReport rep = cutlocus_report(cfg.metric, domain, extended, {px, py}, opts);

    fs::create_directories(common.out_dir);
    {
        std::ofstream out(fs::path(common.out_dir) / "cutlocus.csv");
        out << std::setprecision(17) << "dir_x,dir_y,cut_time,exit_time,conjugate_time,kind,count,x,y\n";
        for (const auto& r : rep.samples)
            out << r.direction.direction.x << ',' << r.direction.direction.y << ',' << r.cut_time
                << ',' << r.exit_time << ',' << r.conjugate_time << ',' << to_string(r.kind) << ','
                << r.minimizer_count << ',' << r.cut_point.x << ',' << r.cut_point.y << '\n';
    }
    {
        std::ofstream out(fs::path(common.out_dir) / "cutlocus_report.txt");
        out << "geotime-cutlocus v1\n";
        out << "point: (" << px << ", " << py << ")  directions: " << n_directions << "\n";
        out << "typical: " << rep.n_typical << "  conjugate: " << rep.n_conjugate
            << "  atypical: " << rep.n_atypical << "\n";
        out << "max adjacent typical gap: " << rep.max_adjacent_gap << "\n";
        out << "min transversality angle (deg): " << rep.min_transversality_deg << "\n";
        out << "boundary non-smooth parameters: " << rep.boundary_nonsmooth_count << "\n";
        out << "two-resolution area ratio: " << rep.area_ratio << " (cells " << rep.cells_coarse
            << " -> " << rep.cells_fine << ")\n";
    }
    {
        SvgCanvas svg(cfg.metric.chart.xmin, cfg.metric.chart.xmax, cfg.metric.chart.ymin,
                      cfg.metric.chart.ymax);
        svg.polyline(domain.polyline(), "#2266aa", 1.5, true);
        svg.dot({px, py}, 4, "#117711");
        for (const auto& r : rep.samples) {
            const char* color = r.kind == CutKind::conjugate  ? "#cc2222"
                                : r.kind == CutKind::atypical ? "#8822cc"
                                                              : "#ee8800";
            svg.dot(r.cut_point, 2, color);
        }
        svg.save((fs::path(common.out_dir) / "cutlocus.svg").string());
    }
    write_manifest(common.out_dir, "cutlocus", cfg.hash(), cfg.seed, {});
    std::cout << "cut samples: " << rep.samples.size() << " (typical " << rep.n_typical
              << ", conjugate " << rep.n_conjugate << ", atypical " << rep.n_atypical << ")\n"
              << "report: " << common.out_dir << "\n";
    return kExitOk;
}

int cmd_counterexample(const CommonArgs& common, double grid_h) {
    HorseshoeOptions opts;
    if (grid_h > 0) opts.grid_h = grid_h;
    opts.threads = common.threads <= 0 ? default_thread_count() : common.threads;
    CollapseReport rep = counterexample_horseshoe(opts);

    fs::create_directories(common.out_dir);
    {
        std::ofstream out(fs::path(common.out_dir) / "collapse_report.txt");
        out << "geotime-collapse v1\n";
        out << "convexity max Pi: " << rep.convexity_max_pi << " (positive: not convex)\n";
        out << "involute points: " << rep.involute.size() << "\n";
        out << "data diameter (arch sensing): " << rep.data_diameter << "\n";
        out << "data diameter (full boundary): " << rep.full_diameter << "\n";
        out << "geodesic diameter: " << rep.geodesic_diameter << "\n";
        out << "collapse: the arch data cannot distinguish the involute sources, full-boundary "
               "data can\n";
    }
    {
        SvgCanvas svg(-1.6, 1.6, -1.6, 1.6);
        svg.polyline(rep.domain.polyline(), "#2266aa", 1.5, true);
        svg.dot(rep.anchor, 4, "#117711");
        for (const Vec2& p : rep.involute) svg.dot(p, 3, "#cc2222");
        // arch sensors
        for (int j = 0; j < 10; ++j) {
            double s = rep.domain.gamma_a +
                       (rep.domain.gamma_b - rep.domain.gamma_a) * j / 9.0;
            svg.dot(rep.domain.curve.point_at_s(s), 2.5, "#ee8800");
        }
        svg.save((fs::path(common.out_dir) / "collapse.svg").string());
    }
    write_manifest(common.out_dir, "counterexample", 0, common.seed, {});
    std::cout << "data diameter " << rep.data_diameter << " vs geodesic diameter "
              << rep.geodesic_diameter << " (full sensing: " << rep.full_diameter << ")\n"
              << "report: " << common.out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geotime: travel time simulation and boundary-data manifold reconstruction"};
    app.require_subcommand(1);

    CommonArgs common;
    app.add_option("--threads", common.threads, "worker threads (0 = logical cores)");

    std::string config_path, dataset_path;
    bool allow_nonconvex = false, blind = false;
    double h_src_override = 0.0, grid_h = 0.0, px = 0.0, py = 0.0;
    int sensors_override = 0, n_directions = 256;
    ReconOptions recon_overrides;

    auto* sim = app.add_subcommand("simulate", "generate a travel time dataset from a config");
    sim->add_option("--config", config_path, "geotime-config v1 file")->required();
    sim->add_option("--out", common.out_dir, "output directory");
    sim->add_option("--seed", common.seed, "run seed (recorded in the manifest)");
    sim->add_flag("--allow-nonconvex", allow_nonconvex, "skip the strict convexity gate");
    sim->add_option("--h-src", h_src_override, "override source lattice spacing");
    sim->add_option("--sensors", sensors_override, "override sensor count");

    auto* rec = app.add_subcommand("reconstruct", "run the blind reconstruction on a dataset");
    rec->add_option("--dataset", dataset_path, "dataset file")->required();
    rec->add_option("--out", common.out_dir, "output directory");
    rec->add_flag("--blind", blind, "forbid any ground-truth sidecar access (recorded)");
    rec->add_option("--tol-grad", recon_overrides.tol_grad, "gradient matching tolerance");
    rec->add_option("--tol-T", recon_overrides.tol_T, "ray-set time tolerance");
    rec->add_option("--c-jump", recon_overrides.c_jump, "boundary jump threshold");
    rec->add_option("--v-grid", recon_overrides.v_grid, "direction grid size");

    auto* ver = app.add_subcommand("verify", "compare a reconstruction against ground truth");
    ver->add_option("--dataset", dataset_path, "dataset file (sidecar required)")->required();
    ver->add_option("--config", config_path, "config used for the simulation")->required();
    ver->add_option("--out", common.out_dir, "output directory");

    auto* cut = app.add_subcommand("cutlocus", "sample and classify the cut locus of a point");
    cut->add_option("--config", config_path, "geotime-config v1 file")->required();
    cut->add_option("--px", px, "source x")->required();
    cut->add_option("--py", py, "source y")->required();
    cut->add_option("--directions", n_directions, "fan size");
    cut->add_option("--out", common.out_dir, "output directory");

    auto* cex = app.add_subcommand("counterexample", "horseshoe collapse demonstration");
    cex->add_option("--grid-h", grid_h, "eikonal grid spacing");
    cex->add_option("--out", common.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(config_path, common, allow_nonconvex, h_src_override,
                                sensors_override);
        if (rec->parsed()) return cmd_reconstruct(dataset_path, common, blind, recon_overrides);
        if (ver->parsed()) return cmd_verify(dataset_path, config_path, common);
        if (cut->parsed()) return cmd_cutlocus(config_path, common, px, py, n_directions);
        if (cex->parsed()) return cmd_counterexample(common, grid_h);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return kExitPipeline;
    }
    return kExitOk;
}
