#include "sgm/geodesics.hpp"

#include <limits>
#include <queue>
#include <utility>

#include "sgm/error.hpp"

namespace sgm {

std::vector<double> geodesic_distances(const Shape& shape, const std::vector<int>& sources) {
    const int n = shape.n();
    for (int s : sources)
        if (s < 0 || s >= n) throw PipelineError("geodesic source index out of range");

    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    for (int s : sources) {
        if (dist[s] > 0.0) {
            dist[s] = 0.0;
            heap.emplace(0.0, s);
        }
    }
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (int w : shape.adjacency[v]) {
            const double nd = d + shape.edge_length(v, w);
            if (nd < dist[w]) {
                dist[w] = nd;
                heap.emplace(nd, w);
            }
        }
    }
    return dist;
}

std::vector<double> geodesic_distances(const Shape& shape, int source) {
    return geodesic_distances(shape, std::vector<int>{source});
}

} // namespace sgm
