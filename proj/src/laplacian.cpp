#include "sgm/laplacian.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "sgm/error.hpp"

namespace sgm {

namespace {

Laplacian mesh_laplacian(const Shape& shape) {
    const int n = shape.n();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(shape.triangles.size() * 12);

    for (const std::array<int, 3>& t : shape.triangles) {
        // Half-cotangent of the angle at each corner weights the opposite edge.
        for (int c = 0; c < 3; ++c) {
            const int a = t[c];
            const int i = t[(c + 1) % 3];
            const int j = t[(c + 2) % 3];
            const Eigen::Vector3d u = shape.vertices.row(i) - shape.vertices.row(a);
            const Eigen::Vector3d v = shape.vertices.row(j) - shape.vertices.row(a);
            const double cross = u.cross(v).norm();
            if (cross <= 0.0) throw PipelineError("degenerate triangle in laplacian");
            const double w = 0.5 * u.dot(v) / cross;
            trip.emplace_back(i, j, -w);
            trip.emplace_back(j, i, -w);
            trip.emplace_back(i, i, w);
            trip.emplace_back(j, j, w);
        }
    }

    Laplacian lap;
    lap.stiffness.resize(n, n);
    lap.stiffness.setFromTriplets(trip.begin(), trip.end());
    lap.mass = shape.vertex_area;
    return lap;
}

Laplacian cloud_laplacian(const Shape& shape) {
    const int n = shape.n();
    // h = mean length over the symmetrized edge set (each edge once).
    double total_len = 0.0;
    long long edges = 0;
    for (int a = 0; a < n; ++a) {
        for (int b : shape.adjacency[a]) {
            if (b <= a) continue;
            total_len += shape.edge_length(a, b);
            ++edges;
        }
    }
    if (edges == 0) throw PipelineError("point cloud graph has no edges");
    const double h = total_len / static_cast<double>(edges);
    double factor = 5.0;
    if (const char* env = std::getenv("SGM_BW_FACTOR")) factor = std::atof(env);
    const double inv = 1.0 / (factor * h * h);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(edges) * 4);
    for (int a = 0; a < n; ++a) {
        for (int b : shape.adjacency[a]) {
            if (b <= a) continue;
            const double d = shape.edge_length(a, b);
            const double w = std::exp(-d * d * inv);
            trip.emplace_back(a, b, -w);
            trip.emplace_back(b, a, -w);
            trip.emplace_back(a, a, w);
            trip.emplace_back(b, b, w);
        }
    }

    Laplacian lap;
    lap.stiffness.resize(n, n);
    lap.stiffness.setFromTriplets(trip.begin(), trip.end());
    lap.mass = shape.vertex_area;
    return lap;
}

} // namespace

Laplacian build_laplacian(const Shape& shape) {
    if (shape.n() < 2) throw PipelineError("shape too small for a laplacian");
    Laplacian lap =
        (shape.kind == ShapeKind::Mesh) ? mesh_laplacian(shape) : cloud_laplacian(shape);

    // Row sums must vanish (constant functions are in the kernel).
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(shape.n());
    const Eigen::VectorXd rowsum = lap.stiffness * ones;
    const double scale = std::max(1.0, lap.stiffness.coeffs().abs().maxCoeff());
    if (rowsum.lpNorm<Eigen::Infinity>() > 1e-9 * scale)
        throw PipelineError("laplacian row sums do not vanish");
    if ((lap.mass.array() <= 0.0).any()) throw PipelineError("non-positive mass entry");
    return lap;
}

} // namespace sgm
