#include "sgm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "sgm/error.hpp"

namespace sgm {

namespace {

Eigen::Vector3d displace(const Eigen::Vector3d& unit_p, const std::vector<RadialBump>& bumps) {
    double r = 1.0;
    for (const RadialBump& b : bumps) {
        const Eigen::Vector3d d = b.direction.normalized();
        const double cosang = std::clamp(unit_p.dot(d), -1.0, 1.0);
        const double ang = std::acos(cosang);
        r += b.amplitude * std::exp(-ang * ang / (2.0 * b.width * b.width));
    }
    return unit_p * r;
}

Shape finish_sphere(std::vector<Eigen::Vector3d> verts,
                    const std::vector<std::array<int, 3>>& tris,
                    const std::vector<RadialBump>& bumps) {
    Eigen::MatrixX3d v(static_cast<long long>(verts.size()), 3);
    for (std::size_t i = 0; i < verts.size(); ++i) v.row(i) = displace(verts[i], bumps);
    return make_mesh(v, tris);
}

} // namespace

Shape icosphere(int subdivisions, const std::vector<RadialBump>& bumps) {
    if (subdivisions < 0 || subdivisions > 7) throw PipelineError("bad subdivision count");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> verts = {
        {-1, t, 0},  {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (Eigen::Vector3d& p : verts) p.normalize();
    std::vector<std::array<int, 3>> tris = {
        {0, 11, 5}, {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
        {5, 11, 4}, {11, 10, 2}, {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
        {3, 2, 6},  {3, 6, 8},   {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
        {8, 6, 7},  {9, 8, 1}};

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int idx = static_cast<int>(verts.size());
            verts.push_back((verts[a] + verts[b]).normalized());
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(tris.size() * 4);
        for (const std::array<int, 3>& tr : tris) {
            const int ab = mid(tr[0], tr[1]);
            const int bc = mid(tr[1], tr[2]);
            const int ca = mid(tr[2], tr[0]);
            next.push_back({tr[0], ab, ca});
            next.push_back({tr[1], bc, ab});
            next.push_back({tr[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        tris = std::move(next);
    }
    return finish_sphere(std::move(verts), tris, bumps);
}

Shape uv_sphere(int segments, int rings, const std::vector<RadialBump>& bumps) {
    if (segments < 3 || rings < 2) throw PipelineError("bad uv sphere resolution");
    const double pi = std::acos(-1.0);
    std::vector<Eigen::Vector3d> verts;
    verts.reserve(static_cast<std::size_t>(segments) * (rings - 1) + 2);
    verts.emplace_back(0, 0, 1); // north pole
    for (int i = 1; i < rings; ++i) {
        const double theta = pi * i / rings;
        for (int j = 0; j < segments; ++j) {
            const double phi = 2.0 * pi * j / segments;
            verts.emplace_back(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                               std::cos(theta));
        }
    }
    verts.emplace_back(0, 0, -1); // south pole
    const int south = static_cast<int>(verts.size()) - 1;
    auto at = [&](int ring, int seg) { return 1 + (ring - 1) * segments + (seg % segments); };

    std::vector<std::array<int, 3>> tris;
    for (int j = 0; j < segments; ++j) tris.push_back({0, at(1, j), at(1, j + 1)});
    for (int i = 1; i + 1 < rings; ++i) {
        for (int j = 0; j < segments; ++j) {
            const int a = at(i, j), b = at(i, j + 1), c = at(i + 1, j), d = at(i + 1, j + 1);
            tris.push_back({a, c, d});
            tris.push_back({a, d, b});
        }
    }
    for (int j = 0; j < segments; ++j) tris.push_back({south, at(rings - 1, j + 1), at(rings - 1, j)});
    return finish_sphere(std::move(verts), tris, bumps);
}

Shape grid_mesh(int nx, int ny, const std::vector<bool>& mask, double cell) {
    if (nx < 1 || ny < 1 || static_cast<int>(mask.size()) != nx * ny)
        throw PipelineError("bad grid mask");
    std::vector<int> corner((nx + 1) * (ny + 1), -1);
    std::vector<Eigen::Vector3d> verts;
    auto corner_id = [&](int x, int y) {
        int& id = corner[y * (nx + 1) + x];
        if (id < 0) {
            id = static_cast<int>(verts.size());
            verts.emplace_back(cell * x, cell * y, 0.0);
        }
        return id;
    };
    std::vector<std::array<int, 3>> tris;
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            if (!mask[y * nx + x]) continue;
            const int a = corner_id(x, y);
            const int b = corner_id(x + 1, y);
            const int c = corner_id(x + 1, y + 1);
            const int d = corner_id(x, y + 1);
            tris.push_back({a, b, c});
            tris.push_back({a, c, d});
        }
    }
    if (tris.empty()) throw PipelineError("grid mask keeps no cells");
    Eigen::MatrixX3d v(static_cast<long long>(verts.size()), 3);
    for (std::size_t i = 0; i < verts.size(); ++i) v.row(i) = verts[i];
    return make_mesh(v, tris);
}

} // namespace sgm
