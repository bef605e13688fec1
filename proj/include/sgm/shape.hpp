#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sgm {

enum class ShapeKind { Mesh, PointCloud };

// Unified surface representation. Meshes carry triangles; point clouds carry a
// symmetrized kNN graph. Both expose the same adjacency/area interface so the
// rest of the pipeline never branches on the representation.
//
// Positions are rescaled at load time: meshes to unit total surface area,
// point clouds to unit bounding-box diagonal. Vertex areas always sum to 1.
struct Shape {
    ShapeKind kind = ShapeKind::Mesh;
    Eigen::MatrixX3d vertices;
    std::vector<std::array<int, 3>> triangles;   // meshes only
    std::vector<std::vector<int>> adjacency;     // sorted neighbor lists
    Eigen::VectorXd vertex_area;                 // sums to 1
    double normalization_scale = 1.0;            // factor applied to input positions

    int n() const { return static_cast<int>(vertices.rows()); }

    double edge_length(int a, int b) const {
        return (vertices.row(a) - vertices.row(b)).norm();
    }

    // Diagonal of the axis-aligned bounding box ("shape width").
    double bbox_diagonal() const;
};

constexpr int kPointCloudKnn = 6;

// Build a validated mesh Shape from raw vertices/triangles: drops degenerate
// triangles and unreferenced vertices, rescales to unit area, computes
// one-third barycentric vertex areas and adjacency.
Shape make_mesh(const Eigen::MatrixX3d& vertices,
                const std::vector<std::array<int, 3>>& triangles);

// Build a point-cloud Shape: rescales to unit bbox diagonal, builds the
// symmetrized k-nearest-neighbor graph, uniform vertex areas.
Shape make_point_cloud(const Eigen::MatrixX3d& points, int knn = kPointCloudKnn);

// Load OFF / ASCII PLY / XYZ. The hint forces point-cloud treatment of files
// that carry faces (faces are then ignored).
Shape load_shape(const std::string& path,
                 std::optional<ShapeKind> kind_hint = std::nullopt,
                 int knn = kPointCloudKnn);

// Per-vertex area weights (mesh: one-third of incident triangle areas,
// point cloud: uniform), normalized to sum 1.
Eigen::VectorXd vertex_areas(const Shape& shape);

// Area-uniform surface sampling with optional uniform coordinate noise.
// nearest_vertex[i] is the index of the mesh vertex closest to sample i
// (after noise), used by the evaluation transfer protocol.
struct SampledCloud {
    Shape cloud;
    std::vector<int> nearest_vertex;
};

SampledCloud sample_point_cloud(const Shape& mesh, int n_points, double noise_frac,
                                std::uint64_t seed, int knn = kPointCloudKnn);

// Dense vertex-to-vertex ground-truth map (line i = target index of source i).
using GroundTruthMap = std::vector<int>;

GroundTruthMap load_ground_truth(const std::string& path, int n_source, int n_target);

// Writers.
void save_off(const std::string& path, const Eigen::MatrixX3d& vertices,
              const std::vector<std::array<int, 3>>& triangles);
void save_xyz(const std::string& path, const Eigen::MatrixX3d& points);
void save_ply_colored(const std::string& path, const Shape& shape,
                      const std::vector<std::array<std::uint8_t, 3>>& colors);

} // namespace sgm
