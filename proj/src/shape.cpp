#include "sgm/shape.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sgm/error.hpp"
#include "sgm/kernels.hpp"
#include "sgm/rng.hpp"

namespace sgm {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Whitespace tokens with '#' line comments stripped.
std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    bool in_comment = false;
    for (char c : text) {
        if (c == '#') in_comment = true;
        if (c == '\n') in_comment = false;
        if (in_comment || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) tokens.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

struct TokenCursor {
    const std::vector<std::string>& tokens;
    std::size_t pos = 0;
    std::string path;

    bool done() const { return pos >= tokens.size(); }

    const std::string& next() {
        if (done()) throw InputError(path + ": unexpected end of file");
        return tokens[pos++];
    }

    long long next_int() {
        const std::string& t = next();
        try {
            std::size_t used = 0;
            long long v = std::stoll(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw InputError(path + ": expected integer, got '" + t + "'");
        }
    }

    double next_double() {
        const std::string& t = next();
        try {
            std::size_t used = 0;
            double v = std::stod(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw InputError(path + ": expected number, got '" + t + "'");
        }
    }
};

struct RawGeometry {
    Eigen::MatrixX3d vertices;
    std::vector<std::array<int, 3>> triangles;
};

// Fan-triangulates polygons with more than three vertices.
void push_polygon(std::vector<std::array<int, 3>>& triangles, const std::vector<int>& poly,
                  const std::string& path) {
    if (poly.size() < 3) throw InputError(path + ": face with fewer than 3 vertices");
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
        triangles.push_back({poly[0], poly[i], poly[i + 1]});
}

RawGeometry parse_off(const std::string& text, const std::string& path) {
    std::vector<std::string> tokens = tokenize(text);
    TokenCursor cur{tokens, 0, path};
    if (cur.next() != "OFF") throw InputError(path + ": missing OFF header");
    const long long nv = cur.next_int();
    const long long nf = cur.next_int();
    cur.next_int(); // edge count, ignored
    if (nv < 0 || nf < 0) throw InputError(path + ": negative element count");

    RawGeometry geo;
    geo.vertices.resize(nv, 3);
    for (long long i = 0; i < nv; ++i)
        for (int d = 0; d < 3; ++d) geo.vertices(i, d) = cur.next_double();

    std::vector<int> poly;
    for (long long f = 0; f < nf; ++f) {
        const long long k = cur.next_int();
        if (k < 3 || k > nv) throw InputError(path + ": invalid face vertex count");
        poly.clear();
        for (long long j = 0; j < k; ++j) poly.push_back(static_cast<int>(cur.next_int()));
        push_polygon(geo.triangles, poly, path);
    }
    return geo;
}

struct PlyProperty {
    bool is_list = false;
    std::string name;
};

struct PlyElement {
    std::string name;
    long long count = 0;
    std::vector<PlyProperty> properties;
};

RawGeometry parse_ply(const std::string& text, const std::string& path) {
    std::istringstream in(text);
    std::string line;
    auto next_line = [&](std::string& out) {
        if (!std::getline(in, out)) throw InputError(path + ": unexpected end of PLY header");
        if (!out.empty() && out.back() == '\r') out.pop_back();
    };

    next_line(line);
    if (line != "ply") throw InputError(path + ": missing ply header");

    std::vector<PlyElement> elements;
    bool ascii = false;
    for (;;) {
        next_line(line);
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "comment" || word == "obj_info" || word.empty()) continue;
        if (word == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = (fmt == "ascii");
        } else if (word == "element") {
            PlyElement el;
            ls >> el.name >> el.count;
            elements.push_back(el);
        } else if (word == "property") {
            if (elements.empty()) throw InputError(path + ": property before element");
            PlyProperty prop;
            std::string type;
            ls >> type;
            if (type == "list") {
                std::string count_type, item_type;
                ls >> count_type >> item_type >> prop.name;
                prop.is_list = true;
            } else {
                ls >> prop.name;
            }
            elements.back().properties.push_back(prop);
        } else if (word == "end_header") {
            break;
        } else {
            throw InputError(path + ": unrecognized PLY header line '" + line + "'");
        }
    }
    if (!ascii) throw InputError(path + ": only ASCII PLY is supported");

    std::string body;
    std::ostringstream rest;
    rest << in.rdbuf();
    body = rest.str();
    std::vector<std::string> tokens = tokenize(body);
    TokenCursor cur{tokens, 0, path};

    RawGeometry geo;
    for (const PlyElement& el : elements) {
        if (el.name == "vertex") {
            int ix = -1, iy = -1, iz = -1;
            for (std::size_t p = 0; p < el.properties.size(); ++p) {
                if (el.properties[p].is_list)
                    throw InputError(path + ": list property on vertex element");
                if (el.properties[p].name == "x") ix = static_cast<int>(p);
                if (el.properties[p].name == "y") iy = static_cast<int>(p);
                if (el.properties[p].name == "z") iz = static_cast<int>(p);
            }
            if (ix < 0 || iy < 0 || iz < 0)
                throw InputError(path + ": vertex element lacks x/y/z properties");
            geo.vertices.resize(el.count, 3);
            std::vector<double> row(el.properties.size());
            for (long long i = 0; i < el.count; ++i) {
                for (double& v : row) v = cur.next_double();
                geo.vertices(i, 0) = row[ix];
                geo.vertices(i, 1) = row[iy];
                geo.vertices(i, 2) = row[iz];
            }
        } else {
            // Generic row walk; faces keep the values of their first list property.
            const bool is_face = (el.name == "face");
            std::vector<int> poly;
            for (long long i = 0; i < el.count; ++i) {
                bool captured = false;
                for (const PlyProperty& prop : el.properties) {
                    if (prop.is_list) {
                        const long long k = cur.next_int();
                        if (k < 0) throw InputError(path + ": negative list length");
                        poly.clear();
                        for (long long j = 0; j < k; ++j)
                            poly.push_back(static_cast<int>(cur.next_int()));
                        if (is_face && !captured) {
                            push_polygon(geo.triangles, poly, path);
                            captured = true;
                        }
                    } else {
                        cur.next_double();
                    }
                }
            }
        }
    }
    return geo;
}

RawGeometry parse_xyz(const std::string& text, const std::string& path) {
    // Line structured: x y z per line, extra columns (normals etc.) ignored.
    std::vector<Eigen::Vector3d> points;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> parts;
        std::string tok;
        while (ls >> tok) parts.push_back(tok);
        if (parts.empty()) continue;
        if (parts.size() < 3) throw InputError(path + ": point line with fewer than 3 values");
        Eigen::Vector3d p;
        for (int d = 0; d < 3; ++d) {
            try {
                std::size_t used = 0;
                p[d] = std::stod(parts[d], &used);
                if (used != parts[d].size()) throw std::invalid_argument(parts[d]);
            } catch (const std::exception&) {
                throw InputError(path + ": expected number, got '" + parts[d] + "'");
            }
        }
        points.push_back(p);
    }
    RawGeometry geo;
    geo.vertices.resize(static_cast<long long>(points.size()), 3);
    for (std::size_t i = 0; i < points.size(); ++i) geo.vertices.row(i) = points[i];
    return geo;
}

std::string lower_extension(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

std::vector<std::vector<int>> sorted_unique_adjacency(std::vector<std::vector<int>> adjacency) {
    for (std::vector<int>& nbrs : adjacency) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    return adjacency;
}

double triangle_area(const Eigen::MatrixX3d& v, const std::array<int, 3>& t) {
    const Eigen::Vector3d a = v.row(t[0]);
    const Eigen::Vector3d b = v.row(t[1]);
    const Eigen::Vector3d c = v.row(t[2]);
    return 0.5 * (b - a).cross(c - a).norm();
}

} // namespace

double Shape::bbox_diagonal() const {
    if (vertices.rows() == 0) return 0.0;
    const Eigen::RowVector3d lo = vertices.colwise().minCoeff();
    const Eigen::RowVector3d hi = vertices.colwise().maxCoeff();
    return (hi - lo).norm();
}

Shape make_mesh(const Eigen::MatrixX3d& vertices,
                const std::vector<std::array<int, 3>>& triangles) {
    const int nv = static_cast<int>(vertices.rows());
    if (nv < 3) throw InputError("mesh has fewer than 3 vertices");
    for (const std::array<int, 3>& t : triangles)
        for (int v : t)
            if (v < 0 || v >= nv) throw InputError("triangle index out of range");

    double total = 0.0;
    std::vector<double> areas(triangles.size());
    for (std::size_t i = 0; i < triangles.size(); ++i) {
        areas[i] = triangle_area(vertices, triangles[i]);
        total += areas[i];
    }
    if (!(total > 0.0)) throw InputError("mesh has zero surface area");

    std::vector<std::array<int, 3>> kept;
    kept.reserve(triangles.size());
    for (std::size_t i = 0; i < triangles.size(); ++i)
        if (areas[i] >= 1e-12 * total) kept.push_back(triangles[i]);
    if (kept.empty()) throw InputError("mesh has no non-degenerate triangles");

    // Drop unreferenced vertices, preserving the original ordering.
    std::vector<bool> used(nv, false);
    for (const std::array<int, 3>& t : kept)
        for (int v : t) used[v] = true;
    std::vector<int> remap(nv, -1);
    int nk = 0;
    for (int v = 0; v < nv; ++v)
        if (used[v]) remap[v] = nk++;

    Shape s;
    s.kind = ShapeKind::Mesh;
    s.vertices.resize(nk, 3);
    for (int v = 0; v < nv; ++v)
        if (used[v]) s.vertices.row(remap[v]) = vertices.row(v);
    s.triangles.reserve(kept.size());
    for (const std::array<int, 3>& t : kept)
        s.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});

    double kept_area = 0.0;
    for (const std::array<int, 3>& t : s.triangles) kept_area += triangle_area(s.vertices, t);
    const double scale = 1.0 / std::sqrt(kept_area);
    s.vertices *= scale;
    s.normalization_scale = scale;

    s.vertex_area = vertex_areas(s);

    std::vector<std::vector<int>> adjacency(nk);
    for (const std::array<int, 3>& t : s.triangles) {
        for (int e = 0; e < 3; ++e) {
            const int a = t[e];
            const int b = t[(e + 1) % 3];
            adjacency[a].push_back(b);
            adjacency[b].push_back(a);
        }
    }
    s.adjacency = sorted_unique_adjacency(std::move(adjacency));
    return s;
}

Shape make_point_cloud(const Eigen::MatrixX3d& points, int knn) {
    const int n = static_cast<int>(points.rows());
    if (knn < 1) throw InputError("neighbor count must be at least 1");
    if (n < knn + 1)
        throw InputError("point cloud has fewer than " + std::to_string(knn + 1) + " points");

    Shape s;
    s.kind = ShapeKind::PointCloud;
    s.vertices = points;
    const double diag = s.bbox_diagonal();
    if (!(diag > 0.0)) throw InputError("point cloud has zero extent");
    const double scale = 1.0 / diag;
    s.vertices *= scale;
    s.normalization_scale = scale;

    Eigen::MatrixXi nbrs;
    kernels::knn_neighbors(s.vertices, knn, nbrs);
    std::vector<std::vector<int>> adjacency(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < knn; ++j) {
            const int b = nbrs(i, j);
            adjacency[i].push_back(b);
            adjacency[b].push_back(i);
        }
    }
    s.adjacency = sorted_unique_adjacency(std::move(adjacency));
    s.vertex_area = vertex_areas(s);
    return s;
}

Shape load_shape(const std::string& path, std::optional<ShapeKind> kind_hint, int knn) {
    const std::string text = read_file(path);
    const std::string ext = lower_extension(path);

    RawGeometry geo;
    if (ext == ".off") {
        geo = parse_off(text, path);
    } else if (ext == ".ply") {
        geo = parse_ply(text, path);
    } else if (ext == ".xyz" || ext == ".pts" || ext == ".txt") {
        geo = parse_xyz(text, path);
    } else {
        // Unknown extension: sniff the leading token.
        std::vector<std::string> tokens = tokenize(text);
        if (!tokens.empty() && tokens[0] == "OFF")
            geo = parse_off(text, path);
        else if (!tokens.empty() && tokens[0] == "ply")
            geo = parse_ply(text, path);
        else
            geo = parse_xyz(text, path);
    }

    const bool as_mesh = kind_hint ? (*kind_hint == ShapeKind::Mesh) : !geo.triangles.empty();
    if (as_mesh) {
        if (geo.triangles.empty())
            throw InputError(path + ": mesh requested but file has no faces");
        return make_mesh(geo.vertices, geo.triangles);
    }
    return make_point_cloud(geo.vertices, knn);
}

Eigen::VectorXd vertex_areas(const Shape& shape) {
    const int n = shape.n();
    if (n == 0) throw InputError("empty shape");
    if (shape.kind == ShapeKind::PointCloud || shape.triangles.empty())
        return Eigen::VectorXd::Constant(n, 1.0 / n);

    Eigen::VectorXd area = Eigen::VectorXd::Zero(n);
    for (const std::array<int, 3>& t : shape.triangles) {
        const double third = triangle_area(shape.vertices, t) / 3.0;
        for (int v : t) area[v] += third;
    }
    const double total = area.sum();
    if (!(total > 0.0)) throw PipelineError("vertex areas sum to zero");
    return area / total;
}

SampledCloud sample_point_cloud(const Shape& mesh, int n_points, double noise_frac,
                                std::uint64_t seed, int knn) {
    if (mesh.kind != ShapeKind::Mesh || mesh.triangles.empty())
        throw InputError("surface sampling requires a triangle mesh");
    if (n_points < knn + 1) throw InputError("too few sample points requested");
    if (noise_frac < 0.0 || noise_frac > 0.5)
        throw InputError("noise fraction must be in [0, 0.5]");

    const std::size_t nt = mesh.triangles.size();
    std::vector<double> cdf(nt);
    double acc = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
        acc += triangle_area(mesh.vertices, mesh.triangles[i]);
        cdf[i] = acc;
    }
    for (double& c : cdf) c /= acc;

    const double amp = noise_frac * mesh.bbox_diagonal();
    Rng rng(seed);
    Eigen::MatrixX3d samples(n_points, 3);
    for (int i = 0; i < n_points; ++i) {
        const double u = rng.uniform();
        const std::size_t ti =
            std::min(nt - 1, static_cast<std::size_t>(
                                 std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin()));
        double r1 = rng.uniform();
        double r2 = rng.uniform();
        if (r1 + r2 > 1.0) {
            r1 = 1.0 - r1;
            r2 = 1.0 - r2;
        }
        const std::array<int, 3>& t = mesh.triangles[ti];
        const Eigen::RowVector3d a = mesh.vertices.row(t[0]);
        const Eigen::RowVector3d b = mesh.vertices.row(t[1]);
        const Eigen::RowVector3d c = mesh.vertices.row(t[2]);
        Eigen::RowVector3d p = a + r1 * (b - a) + r2 * (c - a);
        for (int d = 0; d < 3; ++d) p[d] += rng.uniform(-amp, amp);
        samples.row(i) = p;
    }

    SampledCloud out;
    Eigen::VectorXi nearest;
    kernels::nearest_point(samples, mesh.vertices, nearest);
    out.nearest_vertex.assign(nearest.data(), nearest.data() + nearest.size());
    out.cloud = make_point_cloud(samples, knn);
    return out;
}

GroundTruthMap load_ground_truth(const std::string& path, int n_source, int n_target) {
    const std::string text = read_file(path);
    std::vector<std::string> tokens = tokenize(text);
    TokenCursor cur{tokens, 0, path};
    GroundTruthMap map;
    map.reserve(tokens.size());
    while (!cur.done()) {
        const long long v = cur.next_int();
        if (v < -1 || v >= n_target)
            throw InputError(path + ": ground-truth index " + std::to_string(v) +
                             " out of range");
        map.push_back(static_cast<int>(v));
    }
    if (static_cast<int>(map.size()) != n_source)
        throw InputError(path + ": expected " + std::to_string(n_source) + " entries, got " +
                         std::to_string(map.size()));
    return map;
}

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << std::setprecision(17);
    return out;
}

} // namespace

void save_off(const std::string& path, const Eigen::MatrixX3d& vertices,
              const std::vector<std::array<int, 3>>& triangles) {
    std::ofstream out = open_output(path);
    out << "OFF\n" << vertices.rows() << ' ' << triangles.size() << " 0\n";
    for (long long i = 0; i < vertices.rows(); ++i)
        out << vertices(i, 0) << ' ' << vertices(i, 1) << ' ' << vertices(i, 2) << '\n';
    for (const std::array<int, 3>& t : triangles)
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (!out) throw InputError("write failed: " + path);
}

void save_xyz(const std::string& path, const Eigen::MatrixX3d& points) {
    std::ofstream out = open_output(path);
    for (long long i = 0; i < points.rows(); ++i)
        out << points(i, 0) << ' ' << points(i, 1) << ' ' << points(i, 2) << '\n';
    if (!out) throw InputError("write failed: " + path);
}

void save_ply_colored(const std::string& path, const Shape& shape,
                      const std::vector<std::array<std::uint8_t, 3>>& colors) {
    if (static_cast<int>(colors.size()) != shape.n())
        throw PipelineError("color count does not match vertex count");
    std::ofstream out = open_output(path);
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << shape.n() << '\n';
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    if (!shape.triangles.empty()) {
        out << "element face " << shape.triangles.size() << '\n';
        out << "property list uchar int vertex_indices\n";
    }
    out << "end_header\n";
    for (int i = 0; i < shape.n(); ++i)
        out << shape.vertices(i, 0) << ' ' << shape.vertices(i, 1) << ' ' << shape.vertices(i, 2)
            << ' ' << int(colors[i][0]) << ' ' << int(colors[i][1]) << ' ' << int(colors[i][2])
            << '\n';
    for (const std::array<int, 3>& t : shape.triangles)
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (!out) throw InputError("write failed: " + path);
}

} // namespace sgm
