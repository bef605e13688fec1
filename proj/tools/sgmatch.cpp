// Command-line front end: match two shapes, match a shape to itself,
// re-evaluate or export a saved report, sample clouds, run the robustness
// sweep. Exit codes: 0 ok, 1 bad input, 2 pipeline failure.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgm/error.hpp"
#include "sgm/pipeline.hpp"
#include "sgm/report_io.hpp"
#include "sgm/shape.hpp"

namespace {

namespace fs = std::filesystem;
using namespace sgm;

struct CommonOptions {
    PipelineConfig config;
    std::string out_dir = "sgmatch_out";
    bool cloud_a = false;
    bool cloud_b = false;
};

void add_pipeline_options(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--t-steps", opt.config.hks.t_steps, "diffusion time samples");
    cmd->add_option("--t-min", opt.config.hks.t_min, "smallest diffusion time");
    cmd->add_option("--t-max", opt.config.hks.t_max, "largest diffusion time");
    cmd->add_option("--k-min", opt.config.k_min, "smallest segment count tried");
    cmd->add_option("--k-max", opt.config.k_max, "largest segment count tried");
    cmd->add_option("--sigma", opt.config.matching.sigma, "affinity bandwidth");
    cmd->add_option("--max-sym", opt.config.matching.max_symmetry_order,
                    "largest admissible symmetric match set");
    cmd->add_option("--gap", opt.config.matching.gap_ratio,
                    "likelihood drop that ends a match set");
    cmd->add_option("--seed", opt.config.seed, "random seed");
    cmd->add_option("--knn", opt.config.knn, "point-cloud neighborhood size");
    cmd->add_flag("--exclude-unmatched", opt.config.exclude_unmatched,
                  "drop unmatched regions from the accuracy denominator");
}

double seconds_since(std::chrono::steady_clock::time_point begin) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
}

std::optional<ShapeKind> cloud_hint(bool flag) {
    if (flag) return ShapeKind::PointCloud;
    return std::nullopt;
}

void print_summary(const CorrespondenceReport& r, const std::string& out_dir) {
    std::printf("segments: %d + %d (k = %d, graph distance %.12g)\n",
                r.graph_a.node_count(), r.graph_b.node_count(), r.k, r.graph_distance);
    std::size_t sym_pairs = 0;
    for (const auto& cands : r.sym.match_a) sym_pairs += cands.size();
    std::printf("symmetric pairs: %zu (unmatched %zu + %zu)\n", sym_pairs,
                r.sym.unmatched_a.size(), r.sym.unmatched_b.size());
    if (!r.config.symmetric_only)
        std::printf("one-to-one pairs: %zu (unresolved %zu + %zu)\n", r.one.pairs.size(),
                    r.one.unresolved_a.size(), r.one.unresolved_b.size());
    if (r.accuracy >= 0.0) std::printf("accuracy: %.12g\n", r.accuracy);
    if (r.accuracy_one_to_one >= 0.0)
        std::printf("accuracy_one_to_one: %.12g\n", r.accuracy_one_to_one);
    std::printf("total: %.2fs, artifacts in %s\n", r.total_seconds, out_dir.c_str());
}

int run_match_command(const CommonOptions& opt, const std::string& path_a,
                      const std::string& path_b, const std::string& gt_path) {
    const auto begin = std::chrono::steady_clock::now();
    const Shape a = load_shape(path_a, cloud_hint(opt.cloud_a), opt.config.knn);
    const Shape b = load_shape(path_b, cloud_hint(opt.cloud_b), opt.config.knn);
    GroundTruthMap gt;
    const GroundTruthMap* gt_ptr = nullptr;
    if (!gt_path.empty()) {
        gt = load_ground_truth(gt_path, a.n(), b.n());
        gt_ptr = &gt;
    }
    const double load_seconds = seconds_since(begin);

    CorrespondenceReport report = run_match(a, b, opt.config, gt_ptr);
    report.path_a = path_a;
    report.path_b = path_b;
    report.timings.insert(report.timings.begin(), {"load", load_seconds});
    report.total_seconds += load_seconds;

    write_report_bundle(report, a, b, opt.out_dir);
    print_summary(report, opt.out_dir);
    return 0;
}

int run_self_command(const CommonOptions& opt, const std::string& path) {
    const auto begin = std::chrono::steady_clock::now();
    const Shape shape = load_shape(path, cloud_hint(opt.cloud_a), opt.config.knn);
    const double load_seconds = seconds_since(begin);

    CorrespondenceReport report = run_self_symmetry(shape, opt.config);
    report.path_a = report.path_b = path;
    report.timings.insert(report.timings.begin(), {"load", load_seconds});
    report.total_seconds += load_seconds;

    write_report_bundle(report, shape, shape, opt.out_dir);
    std::printf("self-assigned nodes: %zu\n", report.self_assigned.size());
    print_summary(report, opt.out_dir);
    return 0;
}

int run_eval_command(const std::string& report_path, const std::string& gt_path,
                     bool exclude_unmatched) {
    std::ifstream in(report_path, std::ios::binary);
    if (!in) throw InputError("cannot open: " + report_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const CorrespondenceReport report = report_from_json(buf.str());

    const Shape a = load_shape(report.path_a, report.kind_a, report.config.knn);
    if (a.n() != report.vertices_a)
        throw InputError("shape at " + report.path_a + " no longer matches the report");
    const GroundTruthMap gt = load_ground_truth(gt_path, report.vertices_a, report.vertices_b);

    const bool exclude = exclude_unmatched || report.config.exclude_unmatched;
    const double acc = region_accuracy(a.vertex_area, report.labels_a, report.labels_b, gt,
                                       symmetric_match_sets(report.sym), exclude);
    std::printf("accuracy %.12g\n", acc);
    if (!report.config.symmetric_only) {
        auto one_sets = one_to_one_match_sets(report.one, report.graph_a.node_count());
        for (int node : report.self_assigned) one_sets.at(static_cast<std::size_t>(node)) = {node};
        const double acc_one = region_accuracy(a.vertex_area, report.labels_a, report.labels_b,
                                               gt, one_sets, exclude);
        std::printf("accuracy_one_to_one %.12g\n", acc_one);
    }
    return 0;
}

int run_sample_command(const std::string& mesh_path, int points, double noise,
                       std::uint64_t seed, std::string out_path, std::string map_path,
                       int knn) {
    const Shape mesh = load_shape(mesh_path, ShapeKind::Mesh, knn);
    const SampledCloud sampled = sample_point_cloud(mesh, points, noise, seed, knn);

    const std::string stem = fs::path(mesh_path).stem().string();
    if (out_path.empty()) out_path = stem + "_sample.xyz";
    if (map_path.empty()) map_path = stem + "_sample_gt.txt";

    // undo both normalizations so the samples sit on the input mesh
    const Eigen::MatrixX3d original =
        sampled.cloud.vertices /
        (sampled.cloud.normalization_scale * mesh.normalization_scale);
    save_xyz(out_path, original);
    std::ofstream map_out(map_path, std::ios::binary);
    if (!map_out) throw InputError("cannot open for writing: " + map_path);
    for (int v : sampled.nearest_vertex) map_out << v << "\n";

    std::printf("wrote %d points to %s (cloud-to-mesh map in %s)\n", sampled.cloud.n(),
                out_path.c_str(), map_path.c_str());
    return 0;
}

int run_sweep_command(const CommonOptions& opt, const std::string& list_path,
                      std::vector<int> densities, std::vector<double> noises, int trials) {
    std::ifstream in(list_path);
    if (!in) throw InputError("cannot open: " + list_path);
    std::vector<std::string> meshes;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        // relative entries are resolved against the list file
        fs::path p(line);
        if (p.is_relative()) p = fs::path(list_path).parent_path() / p;
        meshes.push_back(p.string());
    }
    if (densities.empty()) densities = {6000, 3000, 1500, 500};
    if (noises.empty()) noises = {0.0, 0.01, 0.02};

    const auto cells = run_robustness_sweep(meshes, opt.config, densities, noises, trials);

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw InputError("cannot create output directory: " + opt.out_dir);
    const std::string csv = (fs::path(opt.out_dir) / "sweep.csv").string();
    write_sweep_csv(cells, csv);
    for (const auto& c : cells)
        std::printf("%-14s %6d pts  noise %.3g  accuracy %.4f  (%d runs)\n", c.mode.c_str(),
                    c.points, c.noise, c.accuracy, c.runs);
    std::printf("table written to %s\n", csv.c_str());
    return 0;
}

int run_export_command(const std::string& report_path, std::string out_path, bool symmetric) {
    std::ifstream in(report_path, std::ios::binary);
    if (!in) throw InputError("cannot open: " + report_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const CorrespondenceReport report = report_from_json(buf.str());

    if (out_path.empty())
        out_path = (fs::path(report_path).parent_path() / "constraints.json").string();
    const IndicatorConstraints c = make_indicator_constraints(report, symmetric);
    write_indicator_constraints(c, out_path);
    std::printf("wrote %zu %s constraints to %s\n", c.constraints.size(), c.mode.c_str(),
                out_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"region-level correspondences between non-rigid shapes"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string path_a, path_b, gt_path;

    CLI::App* match = app.add_subcommand("match", "match two shapes");
    match->add_option("shape_a", path_a, "first shape (OFF/PLY/XYZ)")->required();
    match->add_option("shape_b", path_b, "second shape")->required();
    match->add_option("--out", opt.out_dir, "output directory");
    add_pipeline_options(match, opt);
    match->add_option("--gt", gt_path, "vertex map from shape A to shape B");
    match->add_flag("--symmetric-only", opt.config.symmetric_only,
                    "skip the one-to-one stage");
    match->add_flag("--cloud-a", opt.cloud_a, "treat shape A as a point cloud");
    match->add_flag("--cloud-b", opt.cloud_b, "treat shape B as a point cloud");

    CLI::App* self = app.add_subcommand("self", "match a shape against itself");
    self->add_option("shape", path_a, "shape (OFF/PLY/XYZ)")->required();
    self->add_option("--out", opt.out_dir, "output directory");
    add_pipeline_options(self, opt);
    self->add_flag("--cloud", opt.cloud_a, "treat the shape as a point cloud");

    std::string report_path;
    bool eval_exclude = false;
    CLI::App* eval = app.add_subcommand("eval", "re-score a saved report");
    eval->add_option("report", report_path, "report.json from a match run")->required();
    eval->add_option("--gt", gt_path, "vertex map from shape A to shape B")->required();
    eval->add_flag("--exclude-unmatched", eval_exclude,
                   "drop unmatched regions from the denominator");

    int sample_points = 1000;
    double sample_noise = 0.0;
    std::uint64_t sample_seed = 42;
    int sample_knn = kPointCloudKnn;
    std::string sample_out, sample_map;
    CLI::App* sample = app.add_subcommand("sample", "sample a point cloud from a mesh");
    sample->add_option("mesh", path_a, "mesh (OFF/PLY)")->required();
    sample->add_option("--points", sample_points, "sample count")->required();
    sample->add_option("--noise", sample_noise, "noise amplitude, fraction of shape width");
    sample->add_option("--seed", sample_seed, "random seed");
    sample->add_option("--knn", sample_knn, "point-cloud neighborhood size");
    sample->add_option("--out", sample_out, "cloud file (.xyz)");
    sample->add_option("--map-out", sample_map, "cloud-to-mesh vertex map file");

    std::vector<int> sweep_densities;
    std::vector<double> sweep_noises;
    int sweep_trials = 4;
    CLI::App* sweep = app.add_subcommand("sweep", "density/noise robustness table");
    sweep->add_option("pairlist", path_a, "file with one mesh path per line")->required();
    sweep->add_option("--out", opt.out_dir, "output directory");
    add_pipeline_options(sweep, opt);
    sweep->add_option("--densities", sweep_densities, "sample counts to test");
    sweep->add_option("--noises", sweep_noises, "noise fractions to test");
    sweep->add_option("--trials", sweep_trials, "sampling repetitions per cell");

    bool export_symmetric = false;
    std::string export_out;
    CLI::App* exp = app.add_subcommand("export-constraints",
                                       "region indicator constraints from a report");
    exp->add_option("report", report_path, "report.json from a match run")->required();
    exp->add_option("--out", export_out, "constraints file");
    exp->add_flag("--symmetric", export_symmetric,
                  "one constraint per symmetric pair instead of one-to-one");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // bad usage is an input error
    }

    try {
        if (match->parsed()) return run_match_command(opt, path_a, path_b, gt_path);
        if (self->parsed()) return run_self_command(opt, path_a);
        if (eval->parsed()) return run_eval_command(report_path, gt_path, eval_exclude);
        if (sample->parsed())
            return run_sample_command(path_a, sample_points, sample_noise, sample_seed,
                                      sample_out, sample_map, sample_knn);
        if (sweep->parsed())
            return run_sweep_command(opt, path_a, sweep_densities, sweep_noises, sweep_trials);
        if (exp->parsed()) return run_export_command(report_path, export_out, export_symmetric);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const PipelineError& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
