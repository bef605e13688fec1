#include "sgm/shape_graph.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>

#include "sgm/error.hpp"
#include "sgm/kmeans.hpp"
#include "sgm/rng.hpp"

namespace sgm {

namespace {

struct ProtoNode {
    int cluster = -1;
    std::vector<int> vertices;
    double area = 0.0;
    bool alive = true;
    bool unmergeable = false; // isolated tiny region with no neighbor
};

// Connected components of each nearest-centroid set, in deterministic order
// (ascending seed vertex).
std::vector<ProtoNode> initial_regions(const Shape& shape, const Eigen::VectorXi& nearest,
                                       std::vector<int>& node_of) {
    const int n = shape.n();
    node_of.assign(n, -1);
    std::vector<ProtoNode> nodes;
    std::vector<int> stack;
    for (int seed = 0; seed < n; ++seed) {
        if (node_of[seed] >= 0) continue;
        const int cluster = nearest[seed];
        const int id = static_cast<int>(nodes.size());
        ProtoNode node;
        node.cluster = cluster;
        stack.assign(1, seed);
        node_of[seed] = id;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            node.vertices.push_back(v);
            node.area += shape.vertex_area[v];
            for (int w : shape.adjacency[v]) {
                if (node_of[w] < 0 && nearest[w] == cluster) {
                    node_of[w] = id;
                    stack.push_back(w);
                }
            }
        }
        std::sort(node.vertices.begin(), node.vertices.end());
        nodes.push_back(std::move(node));
    }
    return nodes;
}

// Repeatedly merge the smallest too-small region into the neighbor with the
// longest shared boundary (summed cross-edge lengths).
void merge_tiny(const Shape& shape, std::vector<ProtoNode>& nodes, std::vector<int>& node_of,
                double tiny_area_frac) {
    const double threshold = tiny_area_frac; // vertex areas sum to 1
    for (;;) {
        int tiny = -1;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!nodes[i].alive || nodes[i].unmergeable || nodes[i].area >= threshold) continue;
            if (tiny < 0 || nodes[i].area < nodes[tiny].area) tiny = static_cast<int>(i);
        }
        if (tiny < 0) break;

        std::map<int, double> boundary; // neighbor node -> shared length
        for (int v : nodes[tiny].vertices)
            for (int w : shape.adjacency[v])
                if (node_of[w] != tiny) boundary[node_of[w]] += shape.edge_length(v, w);
        if (boundary.empty()) {
            // isolated component, nothing to merge into; leave it alone
            nodes[tiny].unmergeable = true;
            continue;
        }
        int target = -1;
        double best = -1.0;
        for (const auto& [nb, len] : boundary) {
            if (len > best) {
                best = len;
                target = nb;
            }
        }

        ProtoNode& into = nodes[target];
        ProtoNode& from = nodes[tiny];
        for (int v : from.vertices) node_of[v] = target;
        into.vertices.insert(into.vertices.end(), from.vertices.begin(), from.vertices.end());
        std::sort(into.vertices.begin(), into.vertices.end());
        into.area += from.area;
        from.alive = false;
        from.vertices.clear();
    }
}

// R* = the connected component containing R inside
// R union {v : nearest(v) == cluster or second(v) == cluster}.
std::vector<int> expand_region(const Shape& shape, const std::vector<int>& region, int node_id,
                               int cluster, const std::vector<int>& node_of,
                               const Eigen::VectorXi& nearest, const Eigen::VectorXi& second) {
    auto allowed = [&](int v) {
        return node_of[v] == node_id || nearest[v] == cluster || second[v] == cluster;
    };
    std::vector<char> seen(shape.n(), 0);
    std::vector<int> stack;
    std::vector<int> out;
    for (int v : region) {
        seen[v] = 1;
        stack.push_back(v);
    }
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        out.push_back(v);
        for (int w : shape.adjacency[v]) {
            if (!seen[w] && allowed(w)) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool sorted_intersects(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j])
            ++i;
        else if (b[j] < a[i])
            ++j;
        else
            return true;
    }
    return false;
}

std::vector<int> degree_counts(const ShapeGraph& g) {
    std::vector<int> hist;
    for (const std::vector<int>& nbrs : g.adjacency) {
        const std::size_t deg = nbrs.size();
        if (hist.size() <= deg) hist.resize(deg + 1, 0);
        ++hist[deg];
    }
    return hist;
}

} // namespace

std::vector<int> ShapeGraph::degrees() const {
    std::vector<int> out;
    out.reserve(adjacency.size());
    for (const std::vector<int>& nbrs : adjacency) out.push_back(static_cast<int>(nbrs.size()));
    return out;
}

ShapeGraph build_shape_graph(const Shape& shape, const Eigen::VectorXi& nearest,
                             const Eigen::VectorXi& second, double tiny_area_frac) {
    if (nearest.size() != shape.n() || second.size() != shape.n())
        throw PipelineError("clustering does not cover the shape");

    std::vector<int> node_of;
    std::vector<ProtoNode> proto = initial_regions(shape, nearest, node_of);
    merge_tiny(shape, proto, node_of, tiny_area_frac);

    // compact alive nodes, keeping creation order
    std::vector<int> remap(proto.size(), -1);
    ShapeGraph g;
    for (std::size_t i = 0; i < proto.size(); ++i) {
        if (!proto[i].alive) continue;
        remap[i] = g.node_count();
        GraphNode node;
        node.cluster = proto[i].cluster;
        node.vertices = std::move(proto[i].vertices);
        node.area = 0.0;
        for (int v : node.vertices) node.area += shape.vertex_area[v];
        g.nodes.push_back(std::move(node));
    }
    g.vertex_node.resize(shape.n());
    for (int v = 0; v < shape.n(); ++v) g.vertex_node[v] = remap[node_of[v]];

    for (int i = 0; i < g.node_count(); ++i)
        g.nodes[i].expanded = expand_region(shape, g.nodes[i].vertices, i, g.nodes[i].cluster,
                                            g.vertex_node, nearest, second);

    g.adjacency.assign(g.node_count(), {});
    for (int a = 0; a < g.node_count(); ++a)
        for (int b = a + 1; b < g.node_count(); ++b)
            if (sorted_intersects(g.nodes[a].expanded, g.nodes[b].expanded)) {
                g.adjacency[a].push_back(b);
                g.adjacency[b].push_back(a);
            }
    for (std::vector<int>& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
    return g;
}

double degree_histogram_distance(const ShapeGraph& a, const ShapeGraph& b) {
    std::vector<int> ha = degree_counts(a);
    std::vector<int> hb = degree_counts(b);
    const std::size_t len = std::max(ha.size(), hb.size());
    ha.resize(len, 0);
    hb.resize(len, 0);
    double dist = 0.0;
    for (std::size_t i = 0; i < len; ++i) dist += std::abs(ha[i] - hb[i]);
    dist += std::abs(a.node_count() - b.node_count());
    return dist;
}

double degree_list_distance(const ShapeGraph& a, const ShapeGraph& b) {
    std::vector<int> da = a.degrees();
    std::vector<int> db = b.degrees();
    std::sort(da.begin(), da.end());
    std::sort(db.begin(), db.end());
    const std::size_t len = std::max(da.size(), db.size());
    da.resize(len, 0);
    db.resize(len, 0);
    double dist = 0.0;
    for (std::size_t i = 0; i < len; ++i) dist += std::abs(da[i] - db[i]);
    dist += std::abs(a.node_count() - b.node_count());
    return dist;
}

SegmentationResult select_k(const Shape& shape_a, const Eigen::MatrixXd& desc_a,
                            const Shape& shape_b, const Eigen::MatrixXd& desc_b,
                            int k_min, int k_max, std::uint64_t seed, double tiny_area_frac,
                            bool use_degree_list) {
    if (k_min < 2 || k_max > 20 || k_min > k_max) throw InputError("cluster range must lie in [2, 20]");
    if (desc_a.cols() != desc_b.cols()) throw PipelineError("descriptor widths differ");
    const int na = shape_a.n();
    const int nb = shape_b.n();

    Eigen::MatrixXd merged(na + nb, desc_a.cols());
    merged.topRows(na) = desc_a;
    merged.bottomRows(nb) = desc_b;

    SegmentationResult best;
    bool have = false;
    for (int k = k_min; k <= k_max; ++k) {
        ClusterResult clusters = kmeans_cluster(merged, k, derive_seed(seed, k));
        ShapeGraph ga = build_shape_graph(shape_a, clusters.nearest.head(na),
                                          clusters.second.head(na), tiny_area_frac);
        ShapeGraph gb = build_shape_graph(shape_b, clusters.nearest.tail(nb),
                                          clusters.second.tail(nb), tiny_area_frac);
        const double dist = use_degree_list ? degree_list_distance(ga, gb)
                                            : degree_histogram_distance(ga, gb);
        if (!have || dist < best.graph_distance) {
            best.k = k;
            best.graph_a = std::move(ga);
            best.graph_b = std::move(gb);
            best.centroids = std::move(clusters.centroids);
            best.graph_distance = dist;
            have = true;
        }
    }
    return best;
}

} // namespace sgm
