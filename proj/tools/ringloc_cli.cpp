// ringloc command-line front end: synthetic data generation, map building,
// single-query localization, batch evaluation, and the self-test battery.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ringloc/evaluation.hpp"
#include "ringloc/selftest.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace ringloc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIncompatible = 2;
constexpr int kExitBadData = 3;
constexpr int kExitPropertyFail = 4;

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void apply_config_file(const std::string& path, PipelineConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json j = json::parse(in);
    if (j.contains("side_cells")) cfg.grid.side_cells = j["side_cells"].get<int>();
    if (j.contains("cell_size_m")) cfg.grid.cell_size_m = j["cell_size_m"].get<double>();
    if (j.contains("z_min_m")) cfg.grid.z_min_m = j["z_min_m"].get<double>();
    if (j.contains("z_max_m")) cfg.grid.z_max_m = j["z_max_m"].get<double>();
    if (j.contains("n_z_channels")) cfg.grid.n_z_channels = j["n_z_channels"].get<int>();
    if (j.contains("ground_z_m")) cfg.ground_z_m = j["ground_z_m"].get<double>();
    if (j.contains("n_theta")) cfg.n_theta = j["n_theta"].get<int>();
    if (j.contains("n_omega")) cfg.n_omega = j["n_omega"].get<int>();
    if (j.contains("bank_seed")) cfg.bank_seed = j["bank_seed"].get<std::uint64_t>();
    if (j.contains("refine_window_deg"))
        cfg.localizer.refine_window_deg = j["refine_window_deg"].get<double>();
    if (j.contains("refine_step_deg"))
        cfg.localizer.refine_step_deg = j["refine_step_deg"].get<double>();
    if (j.contains("max_translation_cells"))
        cfg.localizer.max_translation_cells = j["max_translation_cells"].get<int>();
    cfg.grid.validate();
    cfg.localizer.validate();
}

std::string scan_path(const std::string& dir, int id) {
    char name[64];
    std::snprintf(name, sizeof(name), "scan_%d.bin", id);
    return (fs::path(dir) / name).string();
}

std::vector<std::pair<PointCloud, Pose2>> load_observations(const std::string& scan_dir,
                                                            const std::string& poses_file) {
    std::vector<std::pair<PointCloud, Pose2>> obs;
    for (const auto& [id, pose] : load_poses(poses_file))
        obs.emplace_back(load_cloud(scan_path(scan_dir, id)), pose);
    return obs;
}

json pose_json(const Pose2& p) {
    return json{{"theta", p.theta}, {"x", p.x}, {"y", p.y}};
}

int cmd_synth(std::uint64_t seed, const std::string& out_dir, double extent_m, int structures,
              double length_m, double step_m, double max_range_m, double dropout,
              double noise_m, bool random_heading) {
    fs::create_directories(out_dir);
    const PointCloud world = generate_world(seed, extent_m, structures);
    save_cloud(world, (fs::path(out_dir) / "world.bin").string());

    // Circular loop trajectory, arc-length parameterized.
    const double radius = extent_m * 0.3;
    const int n_poses = step_m > 0.0 ? static_cast<int>(length_m / step_m) : 0;
    Rng heading_rng(seed ^ 0x5ca1ab1eULL);
    std::vector<std::pair<int, Pose2>> poses;
    for (int i = 0; i < n_poses; ++i) {
        const double s = (i * step_m) / radius;
        const double heading =
            random_heading ? heading_rng.uniform(0.0, kTwoPi) : s + kTwoPi / 4.0;
        Pose2 pose(heading, radius * std::cos(s), radius * std::sin(s));
        const PointCloud scan = render_scan(world, pose, max_range_m, dropout, noise_m,
                                            seed * 1000003ULL + static_cast<std::uint64_t>(i));
        save_cloud(scan, scan_path(out_dir, i));
        poses.emplace_back(i, pose);
    }
    save_poses(poses, (fs::path(out_dir) / "poses.txt").string());
    std::printf("world points: %zu\nscans: %d\n", world.size(), n_poses);
    return kExitOk;
}

int cmd_build_map(const std::string& scan_dir, const std::string& poses_file, double interval_m,
                  const std::string& out_map, const PipelineConfig& cfg, int threads) {
    const auto obs = load_observations(scan_dir, poses_file);
    if (obs.empty()) {
        std::fprintf(stderr, "error: no observations in %s\n", poses_file.c_str());
        return kExitBadData;
    }
    const KeyframeDatabase db = build_map(obs, interval_m, cfg, threads);
    save_map(db, out_map);
    std::printf("keyframes: %zu\nfingerprint: %016llx\n", db.size(),
                static_cast<unsigned long long>(db.fingerprint));
    return kExitOk;
}

int cmd_localize(const std::string& map_file, const std::string& scan_file,
                 const PipelineConfig* override_cfg, int threads) {
    KeyframeDatabase db = load_map(map_file);
    if (override_cfg && override_cfg->fingerprint() != db.fingerprint) {
        std::fprintf(stderr, "error: config fingerprint does not match map %s\n",
                     map_file.c_str());
        return kExitIncompatible;
    }
    const PointCloud cloud = load_cloud(scan_file);
    if (cloud.empty()) {
        std::fprintf(stderr, "error: empty observation %s\n", scan_file.c_str());
        return kExitBadData;
    }

    const FilterBank bank = FilterBank::seeded(db.config.grid.n_z_channels, db.config.bank_seed);
    auto t0 = std::chrono::steady_clock::now();
    const Keyframe query = make_keyframe(-1, Pose2(), cloud, db.config, bank);
    const double repr_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    const RankedRetrieval ranked = pr_by_pe_search(query, db, db.config.localizer, threads);
    const double search_ms = ms_since(t0);

    const auto& [best_id, coarse] = ranked.entries.front();
    const Keyframe* best_kf = nullptr;
    for (const Keyframe& kf : db.keyframes)
        if (kf.id == best_id) best_kf = &kf;

    t0 = std::chrono::steady_clock::now();
    const PairEstimate refined = refine_pose(query, *best_kf, coarse, bank, db.config.localizer);
    const double refine_ms = ms_since(t0);

    json out{{"retrieved_id", best_id},
             {"relative_pose", pose_json(refined.pose)},
             {"global_pose", pose_json(compose_global_pose(best_kf->pose, refined.pose))},
             {"rotation_score", refined.rotation_score},
             {"translation_score", refined.translation_score},
             {"timing_ms",
              {{"representation", repr_ms}, {"search", search_ms}, {"refinement", refine_ms}}}};
    std::printf("%s\n", out.dump(2).c_str());
    return kExitOk;
}

int cmd_evaluate(const std::string& map_file, const std::string& query_dir,
                 const std::string& gt_poses, const std::string& report_prefix, double revisit_m,
                 bool icp, int threads) {
    const KeyframeDatabase db = load_map(map_file);
    std::vector<EvalQuery> queries;
    for (const auto& [id, pose] : load_poses(gt_poses))
        queries.push_back({id, pose, load_cloud(scan_path(query_dir, id))});
    if (queries.empty()) {
        std::fprintf(stderr, "error: no queries in %s\n", gt_poses.c_str());
        return kExitBadData;
    }

    EvalOptions opt;
    opt.n_threads = threads;
    opt.icp = icp;
    const std::vector<QueryOutcome> outcomes = evaluate_queries(db, queries, opt);
    const auto sweep = revisit_sweep(outcomes);

    write_report_json(sweep, revisit_m, report_prefix + "_report.json");
    write_report_csv(sweep, report_prefix + "_report.csv");
    write_outcomes_csv(outcomes, report_prefix + "_outcomes.csv");
    const MetricsReport primary = compute_metrics(outcomes, revisit_m);
    write_pr_curve_csv(primary.pr_curve, report_prefix + "_pr_curve.csv");

    std::printf("queries: %zu\nrecall@1 (r=%.1f m): %.4f\ngl_succ_one_stage: %.4f\n",
                outcomes.size(), revisit_m,
                primary.recall_at_n.empty() ? 0.0 : primary.recall_at_n[0],
                primary.gl_succ_one_stage);
    return kExitOk;
}

int cmd_selftest(std::uint64_t seed, int grid_side, bool inject_fault) {
    SelftestOptions opt;
    opt.seed = seed;
    opt.grid_side = grid_side;
    opt.inject_polar_fault = inject_fault;
    const auto results = run_selftest(opt);
    bool all_pass = true;
    for (const PropertyResult& r : results) {
        std::printf("%-36s %s  (%s)\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                    r.detail.c_str());
        if (!r.pass) all_pass = false;
    }
    if (!all_pass) {
        std::fprintf(stderr, "selftest failed (seed %llu)\n",
                     static_cast<unsigned long long>(seed));
        return kExitPropertyFail;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ringloc: rotation/translation-equivariant BEV global localization"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    int threads = 1;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "master random seed");
    app.add_option("--threads", threads, "worker thread count");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic world and scan trajectory");
    std::string out_dir;
    double extent_m = 120.0, length_m = 200.0, step_m = 5.0, max_range_m = 70.0;
    double dropout = 0.0, noise_m = 0.0;
    int structures = 50;
    bool random_heading = false;
    synth->add_option("--out", out_dir, "output directory")->required();
    synth->add_option("--extent-m", extent_m, "world half-extent");
    synth->add_option("--structures", structures, "structure count");
    synth->add_option("--length-m", length_m, "trajectory length");
    synth->add_option("--step-m", step_m, "pose spacing");
    synth->add_option("--max-range-m", max_range_m, "sensor range");
    synth->add_option("--dropout", dropout, "per-point dropout rate");
    synth->add_option("--noise-m", noise_m, "Gaussian position noise sigma");
    synth->add_flag("--random-heading", random_heading, "draw headings uniformly in [0, 2pi)");

    // build-map
    auto* build = app.add_subcommand("build-map", "build a keyframe map from scans + poses");
    std::string scan_dir, poses_file, map_out;
    double interval_m = 20.0;
    build->add_option("--scans", scan_dir, "scan directory")->required();
    build->add_option("--poses", poses_file, "poses file")->required();
    build->add_option("--interval-m", interval_m, "keyframe sampling interval");
    build->add_option("--out", map_out, "output map file")->required();

    // localize
    auto* loc = app.add_subcommand("localize", "localize one scan against a map");
    std::string map_file, scan_file;
    loc->add_option("--map", map_file, "map file")->required();
    loc->add_option("--scan", scan_file, "query scan (.bin/.xyz)")->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "batch evaluation with the full metric suite");
    std::string eval_map, query_dir, gt_poses, report_prefix = "report";
    double revisit_m = 10.0;
    bool icp = false;
    eval->add_option("--map", eval_map, "map file")->required();
    eval->add_option("--queries", query_dir, "query scan directory")->required();
    eval->add_option("--gt-poses", gt_poses, "ground-truth query poses")->required();
    eval->add_option("--report", report_prefix, "report path prefix");
    eval->add_option("--revisit-m", revisit_m, "primary revisit threshold");
    eval->add_flag("--icp", icp, "enable ICP pose polish");

    // selftest
    auto* self = app.add_subcommand("selftest", "run the invariant property battery");
    int grid_side = 64;
    bool inject_fault = false;
    self->add_option("--grid-side", grid_side, "property-suite grid side");
    self->add_flag("--inject-polar-fault", inject_fault,
                   "mutation check: route the Radon pathway through the polar transform");

    double refine_window_deg = -1.0;
    app.add_option("--refine-window-deg", refine_window_deg, "refinement half-window override");

    // let the shared --config/--seed/--threads flags appear after the subcommand
    for (CLI::App* sub : {synth, build, loc, eval, self}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        PipelineConfig cfg;
        if (!config_path.empty()) apply_config_file(config_path, cfg);
        if (refine_window_deg >= 0.0) cfg.localizer.refine_window_deg = refine_window_deg;

        if (synth->parsed())
            return cmd_synth(seed, out_dir, extent_m, structures, length_m, step_m, max_range_m,
                             dropout, noise_m, random_heading);
        if (build->parsed())
            return cmd_build_map(scan_dir, poses_file, interval_m, map_out, cfg, threads);
        if (loc->parsed())
            return cmd_localize(map_file, scan_file, config_path.empty() ? nullptr : &cfg,
                                threads);
        if (eval->parsed())
            return cmd_evaluate(eval_map, query_dir, gt_poses, report_prefix, revisit_m, icp,
                                threads);
        if (self->parsed())
            return cmd_selftest(seed == 0 ? 1 : seed, grid_side, inject_fault);
    } catch (const MapFingerprintError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIncompatible;
    } catch (const MapVersionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIncompatible;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadData;
    }
    return kExitUsage;
}
