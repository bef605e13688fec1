#pragma once

#include <vector>

#include "sgm/shape.hpp"

namespace sgm {

// Gaussian radial displacement painted on a sphere: the radius at surface
// direction p grows by amplitude * exp(-angle(p, direction)^2 / (2 width^2)).
struct RadialBump {
    Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
    double amplitude = 0.5;
    double width = 0.3; // angular stddev, radians
};

// Icosahedron refined by `subdivisions` 1-to-4 splits: 10*4^s + 2 vertices.
Shape icosphere(int subdivisions, const std::vector<RadialBump>& bumps = {});

// Latitude/longitude sphere with segments*(rings-1) + 2 vertices.
// segments >= 3, rings >= 2. Mirror-symmetric about the xz-plane when bumps are.
Shape uv_sphere(int segments, int rings, const std::vector<RadialBump>& bumps = {});

// Flat grid of unit cells in the xy-plane; mask[y*nx + x] keeps a cell, each
// kept cell becomes two triangles. Used to build planar test silhouettes.
Shape grid_mesh(int nx, int ny, const std::vector<bool>& mask, double cell = 1.0);

} // namespace sgm
