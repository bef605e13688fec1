#include "sgm/symmetry_break.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <set>

#include "sgm/geodesics.hpp"

namespace sgm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double region_mean_distance(const std::vector<int>& verts, const std::vector<double>& dist) {
    double sum = 0.0;
    for (int v : verts) sum += dist[static_cast<std::size_t>(v)];
    return sum / static_cast<double>(verts.size());
}

} // namespace

OneToOneMatching break_symmetry(const ShapeGraph& ga, const ShapeGraph& gb,
                                const SymmetricMatching& sym, const Shape& shape_a,
                                const Shape& shape_b) {
    const int na = ga.node_count();
    const int nb = gb.node_count();

    std::vector<std::set<int>> cand_a(static_cast<std::size_t>(na));
    std::vector<std::set<int>> cand_b(static_cast<std::size_t>(nb));
    for (int i = 0; i < na; ++i)
        for (const MatchCandidate& c : sym.match_a[static_cast<std::size_t>(i)])
            cand_a[static_cast<std::size_t>(i)].insert(c.node);
    for (int j = 0; j < nb; ++j)
        for (const MatchCandidate& c : sym.match_b[static_cast<std::size_t>(j)])
            cand_b[static_cast<std::size_t>(j)].insert(c.node);

    std::vector<char> fixed_a(static_cast<std::size_t>(na), 0);
    std::vector<char> fixed_b(static_cast<std::size_t>(nb), 0);
    OneToOneMatching out;

    auto fix_pair = [&](int i, int j) {
        out.pairs.emplace_back(i, j);
        fixed_a[static_cast<std::size_t>(i)] = 1;
        fixed_b[static_cast<std::size_t>(j)] = 1;
        cand_a[static_cast<std::size_t>(i)].clear();
        cand_b[static_cast<std::size_t>(j)].clear();
        for (auto& set : cand_a) set.erase(j);
        for (auto& set : cand_b) set.erase(i);
    };

    // clean one-to-one pairs stand on their own
    std::vector<std::pair<int, int>> ones;
    for (int i = 0; i < na; ++i) {
        const auto& set = cand_a[static_cast<std::size_t>(i)];
        if (set.size() != 1) continue;
        const int j = *set.begin();
        const auto& back = cand_b[static_cast<std::size_t>(j)];
        if (back.size() == 1 && *back.begin() == i) ones.emplace_back(i, j);
    }
    for (const auto& [i, j] : ones) fix_pair(i, j);

    // seed the propagation from the tightest square group
    std::vector<int> v_set, w_set;
    bool seeded = false;
    {
        int best_order = 0;
        double best_area = 0.0;
        int best_i = -1, best_j = -1;
        for (int i = 0; i < na; ++i) {
            const auto& fwd = cand_a[static_cast<std::size_t>(i)];
            if (fwd.size() < 2) continue;
            for (int j : fwd) {
                const auto& back = cand_b[static_cast<std::size_t>(j)];
                if (back.size() < 2) continue;
                const int order = static_cast<int>(fwd.size() + back.size());
                double area = 0.0;
                for (int k : back) area += ga.nodes[static_cast<std::size_t>(k)].area;
                for (int l : fwd) area += gb.nodes[static_cast<std::size_t>(l)].area;
                if (best_i < 0 || order < best_order ||
                    (order == best_order && area < best_area)) {
                    best_order = order;
                    best_area = area;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_i >= 0) {
            // lowest A index of the group, then the lowest B index it can
            // actually reach (identical to lowest-lowest on clean groups)
            const int a0 = *cand_b[static_cast<std::size_t>(best_j)].begin();
            const int b0 = *cand_a[static_cast<std::size_t>(a0)].begin();
            v_set = ga.nodes[static_cast<std::size_t>(a0)].vertices;
            w_set = gb.nodes[static_cast<std::size_t>(b0)].vertices;
            fix_pair(a0, b0);
            seeded = true;
        } else if (!ones.empty()) {
            for (const auto& [i, j] : ones) {
                const auto& va = ga.nodes[static_cast<std::size_t>(i)].vertices;
                const auto& vb = gb.nodes[static_cast<std::size_t>(j)].vertices;
                v_set.insert(v_set.end(), va.begin(), va.end());
                w_set.insert(w_set.end(), vb.begin(), vb.end());
            }
            seeded = true;
        }
    }

    if (!seeded) {
        // nothing to anchor the propagation: report everything unresolved
        out.pairs.clear();
        for (int i = 0; i < na; ++i) out.unresolved_a.push_back(i);
        for (int j = 0; j < nb; ++j) out.unresolved_b.push_back(j);
        return out;
    }

    while (true) {
        int pick = -1;
        {
            bool any = false;
            for (int i = 0; i < na; ++i)
                if (!fixed_a[static_cast<std::size_t>(i)] &&
                    !cand_a[static_cast<std::size_t>(i)].empty())
                    any = true;
            if (!any) break;
        }
        const std::vector<double> dist_v = geodesic_distances(shape_a, v_set);
        const std::vector<double> dist_w = geodesic_distances(shape_b, w_set);

        double pick_dist = kInf;
        for (int i = 0; i < na; ++i) {
            if (fixed_a[static_cast<std::size_t>(i)] || cand_a[static_cast<std::size_t>(i)].empty())
                continue;
            const double d = region_mean_distance(ga.nodes[static_cast<std::size_t>(i)].vertices,
                                                  dist_v);
            if (pick < 0 || d < pick_dist) {
                pick = i;
                pick_dist = d;
            }
        }
        int best_j = -1;
        double best_dist = kInf;
        for (int j : cand_a[static_cast<std::size_t>(pick)]) {
            const double d = region_mean_distance(gb.nodes[static_cast<std::size_t>(j)].vertices,
                                                  dist_w);
            if (best_j < 0 || d < best_dist) {
                best_j = j;
                best_dist = d;
            }
        }

        const auto& va = ga.nodes[static_cast<std::size_t>(pick)].vertices;
        const auto& vb = gb.nodes[static_cast<std::size_t>(best_j)].vertices;
        v_set.insert(v_set.end(), va.begin(), va.end());
        w_set.insert(w_set.end(), vb.begin(), vb.end());
        fix_pair(pick, best_j);
    }

    std::sort(out.pairs.begin(), out.pairs.end());
    for (int i = 0; i < na; ++i)
        if (!fixed_a[static_cast<std::size_t>(i)]) out.unresolved_a.push_back(i);
    for (int j = 0; j < nb; ++j)
        if (!fixed_b[static_cast<std::size_t>(j)]) out.unresolved_b.push_back(j);
    return out;
}

} // namespace sgm
