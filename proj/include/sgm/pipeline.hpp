#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgm/graph_match.hpp"
#include "sgm/hks.hpp"
#include "sgm/shape.hpp"
#include "sgm/shape_graph.hpp"
#include "sgm/symmetry_break.hpp"

namespace sgm {

struct PipelineConfig {
    HksParams hks;
    int k_min = 5;
    int k_max = 10;
    MatchingParams matching;
    std::uint64_t seed = 42;
    double tiny_area_frac = 0.0025;
    bool use_degree_list = false;
    int knn = kPointCloudKnn;
    // accuracy treatment of regions without a match: count their area as
    // wrong (default) or drop it from the denominator
    bool exclude_unmatched = false;
    // stop after spectral matching; the one-to-one stage is skipped and every
    // node is reported unresolved
    bool symmetric_only = false;
};

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

// Everything one matching run produces. Accuracies are -1 without ground
// truth. In self mode, nodes the matcher left unresolved are assigned to
// themselves and listed in self_assigned.
struct CorrespondenceReport {
    PipelineConfig config;
    std::string path_a, path_b;
    ShapeKind kind_a = ShapeKind::Mesh, kind_b = ShapeKind::Mesh;
    int vertices_a = 0, vertices_b = 0;
    int k = 0;
    double graph_distance = 0.0;
    ShapeGraph graph_a, graph_b;
    std::vector<int> labels_a, labels_b; // per-vertex node ids
    SymmetricMatching sym;
    OneToOneMatching one;
    bool self_mode = false;
    std::vector<int> self_assigned;
    double accuracy = -1.0;            // symmetric match sets
    double accuracy_one_to_one = -1.0; // resolved pairs only
    std::vector<StageTiming> timings;
    double total_seconds = 0.0;
};

// Area-weighted fraction of vertices whose ground-truth image lands in an
// allowed region. allowed_b[node_a] lists acceptable B nodes; gt entries of
// -1 are skipped entirely. exclude_unmatched removes vertices of matchless
// regions from the denominator instead of counting them wrong.
double region_accuracy(const Eigen::VectorXd& areas_a, const std::vector<int>& labels_a,
                       const std::vector<int>& labels_b, const GroundTruthMap& gt,
                       const std::vector<std::vector<int>>& allowed_b,
                       bool exclude_unmatched = false);

// per-A-node target sets from either matching flavor
std::vector<std::vector<int>> symmetric_match_sets(const SymmetricMatching& sym);
std::vector<std::vector<int>> one_to_one_match_sets(const OneToOneMatching& one, int n_nodes);

// descriptors -> alignment -> joint segmentation -> spectral matching ->
// symmetry breaking, with per-stage wall times
CorrespondenceReport run_match(const Shape& a, const Shape& b, const PipelineConfig& config,
                               const GroundTruthMap* gt = nullptr);
CorrespondenceReport run_match(const std::string& path_a, const std::string& path_b,
                               const PipelineConfig& config, const std::string& gt_path = "",
                               std::optional<ShapeKind> kind_a = std::nullopt,
                               std::optional<ShapeKind> kind_b = std::nullopt);

// one shape matched against itself; every node ends up assigned
CorrespondenceReport run_self_symmetry(const Shape& shape, const PipelineConfig& config);
CorrespondenceReport run_self_symmetry(const std::string& path, const PipelineConfig& config,
                                       std::optional<ShapeKind> kind = std::nullopt);

struct SweepCell {
    std::string mode; // "mesh_to_cloud" or "cloud_to_cloud"
    int points = 0;
    double noise = 0.0;
    double accuracy = 0.0; // mean symmetric-mode accuracy over meshes and trials
    int runs = 0;
};

// Samples each mesh at every density/noise level with `trials` different
// seeds, matches mesh-to-cloud and cloud-to-cloud, and evaluates by
// nearest-point transfer (mesh vertices never covered by a sample are
// excluded). Returns one averaged cell per mode/density/noise combination.
std::vector<SweepCell> run_robustness_sweep(
    const std::vector<std::string>& mesh_paths, const PipelineConfig& config,
    const std::vector<int>& densities = {6000, 3000, 1500, 500},
    const std::vector<double>& noises = {0.0, 0.01, 0.02}, int trials = 4);

} // namespace sgm
