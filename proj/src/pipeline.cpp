#include "sgm/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <set>
#include <utility>

#include "sgm/error.hpp"
#include "sgm/kernels.hpp"
#include "sgm/rank_align.hpp"
#include "sgm/rng.hpp"

namespace sgm {

namespace {

class StageClock {
  public:
    explicit StageClock(std::vector<StageTiming>& out) : out_(out) {}

    void start(std::string name) {
        name_ = std::move(name);
        begin_ = std::chrono::steady_clock::now();
    }

    void stop() {
        const auto end = std::chrono::steady_clock::now();
        out_.push_back({name_, std::chrono::duration<double>(end - begin_).count()});
    }

  private:
    std::vector<StageTiming>& out_;
    std::string name_;
    std::chrono::steady_clock::time_point begin_;
};

double elapsed_since(std::chrono::steady_clock::time_point begin) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
}

void compute_accuracies(CorrespondenceReport& report, const Shape& a,
                        const GroundTruthMap& gt) {
    report.accuracy = region_accuracy(a.vertex_area, report.labels_a, report.labels_b, gt,
                                      symmetric_match_sets(report.sym),
                                      report.config.exclude_unmatched);
    if (report.config.symmetric_only) return;
    std::vector<std::vector<int>> one_sets =
        one_to_one_match_sets(report.one, report.graph_a.node_count());
    for (int node : report.self_assigned) one_sets[static_cast<std::size_t>(node)] = {node};
    report.accuracy_one_to_one =
        region_accuracy(a.vertex_area, report.labels_a, report.labels_b, gt, one_sets,
                        report.config.exclude_unmatched);
}

} // namespace

double region_accuracy(const Eigen::VectorXd& areas_a, const std::vector<int>& labels_a,
                       const std::vector<int>& labels_b, const GroundTruthMap& gt,
                       const std::vector<std::vector<int>>& allowed_b, bool exclude_unmatched) {
    if (labels_a.size() != gt.size() || labels_a.size() != static_cast<std::size_t>(areas_a.size()))
        throw PipelineError("accuracy inputs disagree on vertex count");

    double hit = 0.0;
    double total = 0.0;
    for (std::size_t v = 0; v < labels_a.size(); ++v) {
        const int target = gt[v];
        if (target < 0) continue; // no correspondence exists
        if (static_cast<std::size_t>(target) >= labels_b.size())
            throw PipelineError("ground-truth index out of range");
        const auto& allowed = allowed_b[static_cast<std::size_t>(labels_a[v])];
        if (allowed.empty() && exclude_unmatched) continue;
        total += areas_a[static_cast<Eigen::Index>(v)];
        const int label = labels_b[static_cast<std::size_t>(target)];
        if (std::count(allowed.begin(), allowed.end(), label) > 0)
            hit += areas_a[static_cast<Eigen::Index>(v)];
    }
    return total > 0.0 ? hit / total : 0.0;
}

std::vector<std::vector<int>> symmetric_match_sets(const SymmetricMatching& sym) {
    std::vector<std::vector<int>> sets(sym.match_a.size());
    for (std::size_t i = 0; i < sym.match_a.size(); ++i)
        for (const MatchCandidate& c : sym.match_a[i]) sets[i].push_back(c.node);
    return sets;
}

std::vector<std::vector<int>> one_to_one_match_sets(const OneToOneMatching& one, int n_nodes) {
    std::vector<std::vector<int>> sets(static_cast<std::size_t>(n_nodes));
    for (const auto& [a, b] : one.pairs) sets[static_cast<std::size_t>(a)] = {b};
    return sets;
}

CorrespondenceReport run_match(const Shape& a, const Shape& b, const PipelineConfig& config,
                               const GroundTruthMap* gt) {
    const auto begin = std::chrono::steady_clock::now();
    CorrespondenceReport report;
    report.config = config;
    report.kind_a = a.kind;
    report.kind_b = b.kind;
    report.vertices_a = a.n();
    report.vertices_b = b.n();
    StageClock clock(report.timings);

    clock.start("descriptors_a");
    const Eigen::MatrixXd desc_a = compute_hks(a, config.hks);
    clock.stop();

    clock.start("descriptors_b");
    const Eigen::MatrixXd desc_b = compute_hks(b, config.hks);
    clock.stop();

    clock.start("alignment");
    const Eigen::MatrixXd desc_b_aligned =
        rank_align(desc_b, b.vertex_area, desc_a, a.vertex_area);
    clock.stop();

    clock.start("segmentation");
    SegmentationResult seg = select_k(a, desc_a, b, desc_b_aligned, config.k_min, config.k_max,
                                      config.seed, config.tiny_area_frac, config.use_degree_list);
    clock.stop();
    report.k = seg.k;
    report.graph_distance = seg.graph_distance;
    report.graph_a = std::move(seg.graph_a);
    report.graph_b = std::move(seg.graph_b);
    report.labels_a = report.graph_a.vertex_node;
    report.labels_b = report.graph_b.vertex_node;

    clock.start("matching");
    report.sym = match_graphs(report.graph_a, report.graph_b, config.matching);
    clock.stop();

    if (config.symmetric_only) {
        for (int i = 0; i < report.graph_a.node_count(); ++i) report.one.unresolved_a.push_back(i);
        for (int j = 0; j < report.graph_b.node_count(); ++j) report.one.unresolved_b.push_back(j);
    } else {
        clock.start("symmetry_breaking");
        report.one = break_symmetry(report.graph_a, report.graph_b, report.sym, a, b);
        clock.stop();
    }

    if (gt != nullptr) {
        clock.start("evaluation");
        compute_accuracies(report, a, *gt);
        clock.stop();
    }
    report.total_seconds = elapsed_since(begin);
    return report;
}

CorrespondenceReport run_match(const std::string& path_a, const std::string& path_b,
                               const PipelineConfig& config, const std::string& gt_path,
                               std::optional<ShapeKind> kind_a, std::optional<ShapeKind> kind_b) {
    const auto begin = std::chrono::steady_clock::now();
    std::vector<StageTiming> load_timing;
    StageClock clock(load_timing);
    clock.start("load");
    const Shape a = load_shape(path_a, kind_a, config.knn);
    const Shape b = load_shape(path_b, kind_b, config.knn);
    clock.stop();

    GroundTruthMap gt;
    const bool have_gt = !gt_path.empty();
    if (have_gt) gt = load_ground_truth(gt_path, a.n(), b.n());

    CorrespondenceReport report = run_match(a, b, config, have_gt ? &gt : nullptr);
    report.path_a = path_a;
    report.path_b = path_b;
    report.timings.insert(report.timings.begin(), load_timing.begin(), load_timing.end());
    report.total_seconds = elapsed_since(begin);
    return report;
}

CorrespondenceReport run_self_symmetry(const Shape& shape, const PipelineConfig& config) {
    const auto begin = std::chrono::steady_clock::now();
    CorrespondenceReport report;
    report.config = config;
    report.self_mode = true;
    report.kind_a = report.kind_b = shape.kind;
    report.vertices_a = report.vertices_b = shape.n();
    StageClock clock(report.timings);

    clock.start("descriptors_a");
    const Eigen::MatrixXd desc = compute_hks(shape, config.hks);
    clock.stop();

    // both sides are the same shape: alignment is the identity and the joint
    // segmentation degenerates to a single clustering
    clock.start("segmentation");
    SegmentationResult seg = select_k(shape, desc, shape, desc, config.k_min, config.k_max,
                                      config.seed, config.tiny_area_frac, config.use_degree_list);
    clock.stop();
    report.k = seg.k;
    report.graph_distance = seg.graph_distance;
    report.graph_a = std::move(seg.graph_a);
    report.graph_b = report.graph_a;
    report.labels_a = report.graph_a.vertex_node;
    report.labels_b = report.labels_a;

    clock.start("matching");
    report.sym = match_graphs(report.graph_a, report.graph_b, config.matching);
    clock.stop();

    clock.start("symmetry_breaking");
    report.one = break_symmetry(report.graph_a, report.graph_b, report.sym, shape, shape);
    clock.stop();

    // self mode leaves nothing unassigned: unresolved nodes map to themselves
    std::set<int> resolved_a;
    std::set<int> resolved_b;
    for (const auto& [pa, pb] : report.one.pairs) {
        resolved_a.insert(pa);
        resolved_b.insert(pb);
    }
    for (int i = 0; i < report.graph_a.node_count(); ++i)
        if (!resolved_a.count(i) && !resolved_b.count(i)) {
            report.one.pairs.emplace_back(i, i);
            resolved_a.insert(i);
            resolved_b.insert(i);
            report.self_assigned.push_back(i);
        }
    std::sort(report.one.pairs.begin(), report.one.pairs.end());
    report.one.unresolved_a.clear();
    report.one.unresolved_b.clear();
    for (int i = 0; i < report.graph_a.node_count(); ++i) {
        if (!resolved_a.count(i)) report.one.unresolved_a.push_back(i);
        if (!resolved_b.count(i)) report.one.unresolved_b.push_back(i);
    }

    report.total_seconds = elapsed_since(begin);
    return report;
}

CorrespondenceReport run_self_symmetry(const std::string& path, const PipelineConfig& config,
                                       std::optional<ShapeKind> kind) {
    const auto begin = std::chrono::steady_clock::now();
    std::vector<StageTiming> load_timing;
    StageClock clock(load_timing);
    clock.start("load");
    const Shape shape = load_shape(path, kind, config.knn);
    clock.stop();

    CorrespondenceReport report = run_self_symmetry(shape, config);
    report.path_a = report.path_b = path;
    report.timings.insert(report.timings.begin(), load_timing.begin(), load_timing.end());
    report.total_seconds = elapsed_since(begin);
    return report;
}

namespace {

// positions in the source mesh's normalized frame (scaling is uniform and
// translation-free, so dividing by the stored scale recovers them)
Eigen::MatrixX3d unscaled_positions(const Shape& s) {
    return s.vertices / s.normalization_scale;
}

// mesh-vertex ground truth onto a sampled cloud: nearest sample, with
// vertices that no sample maps back to excluded as uncovered
GroundTruthMap mesh_to_cloud_gt(const Shape& mesh, const SampledCloud& sample) {
    std::vector<char> covered(static_cast<std::size_t>(mesh.n()), 0);
    for (int v : sample.nearest_vertex) covered[static_cast<std::size_t>(v)] = 1;

    Eigen::VectorXi nearest;
    const Eigen::MatrixX3d cloud_pos = unscaled_positions(sample.cloud);
    kernels::nearest_point(mesh.vertices, cloud_pos, nearest);

    GroundTruthMap gt(static_cast<std::size_t>(mesh.n()), -1);
    for (int v = 0; v < mesh.n(); ++v)
        if (covered[static_cast<std::size_t>(v)]) gt[static_cast<std::size_t>(v)] = nearest[v];
    return gt;
}

GroundTruthMap cloud_to_cloud_gt(const SampledCloud& from, const SampledCloud& to) {
    Eigen::VectorXi nearest;
    kernels::nearest_point(unscaled_positions(from.cloud), unscaled_positions(to.cloud), nearest);
    return GroundTruthMap(nearest.data(), nearest.data() + nearest.size());
}

} // namespace

std::vector<SweepCell> run_robustness_sweep(const std::vector<std::string>& mesh_paths,
                                            const PipelineConfig& config,
                                            const std::vector<int>& densities,
                                            const std::vector<double>& noises, int trials) {
    if (mesh_paths.empty()) throw InputError("sweep needs at least one mesh");

    std::vector<SweepCell> cells;
    for (const std::string& mode : {std::string("mesh_to_cloud"), std::string("cloud_to_cloud")})
        for (int points : densities)
            for (double noise : noises) cells.push_back({mode, points, noise, 0.0, 0});

    auto cell_at = [&](const std::string& mode, int points, double noise) -> SweepCell& {
        for (SweepCell& c : cells)
            if (c.mode == mode && c.points == points && c.noise == noise) return c;
        throw PipelineError("sweep cell lookup failed");
    };

    for (const std::string& path : mesh_paths) {
        const Shape mesh = load_shape(path, ShapeKind::Mesh, config.knn);
        for (int points : densities) {
            for (double noise : noises) {
                for (int trial = 0; trial < trials; ++trial) {
                    // the same trial seeds recur across cells and meshes so
                    // density/noise comparisons are paired
                    const std::uint64_t run_seed = derive_seed(config.seed, 9000 + trial);
                    PipelineConfig run_config = config;
                    run_config.seed = run_seed;

                    const SampledCloud first =
                        sample_point_cloud(mesh, points, noise, run_seed, config.knn);
                    {
                        const GroundTruthMap gt = mesh_to_cloud_gt(mesh, first);
                        CorrespondenceReport rep =
                            run_match(mesh, first.cloud, run_config, &gt);
                        SweepCell& cell = cell_at("mesh_to_cloud", points, noise);
                        cell.accuracy += rep.accuracy;
                        cell.runs += 1;
                    }
                    {
                        const SampledCloud second = sample_point_cloud(
                            mesh, points, noise, derive_seed(run_seed, 1), config.knn);
                        const GroundTruthMap gt = cloud_to_cloud_gt(first, second);
                        CorrespondenceReport rep =
                            run_match(first.cloud, second.cloud, run_config, &gt);
                        SweepCell& cell = cell_at("cloud_to_cloud", points, noise);
                        cell.accuracy += rep.accuracy;
                        cell.runs += 1;
                    }
                }
            }
        }
    }

    for (SweepCell& cell : cells)
        if (cell.runs > 0) cell.accuracy /= cell.runs;
    return cells;
}

} // namespace sgm
