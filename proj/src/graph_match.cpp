#include "sgm/graph_match.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <string>
#include <utility>

#include "sgm/error.hpp"
#include "sgm/kernels.hpp"

namespace sgm {

namespace {

// Candidates kept for one node, by the gap rule: sort likelihoods high to
// low, cut at the first value below gap_ratio times its predecessor, and
// drop the node entirely when the kept prefix would exceed the symmetry cap.
std::vector<MatchCandidate> gap_select(std::vector<MatchCandidate> cands,
                                       const MatchingParams& params) {
    cands.erase(std::remove_if(cands.begin(), cands.end(),
                               [](const MatchCandidate& c) { return c.likelihood <= 0.0; }),
                cands.end());
    std::sort(cands.begin(), cands.end(), [](const MatchCandidate& a, const MatchCandidate& b) {
        if (a.likelihood != b.likelihood) return a.likelihood > b.likelihood;
        return a.node < b.node;
    });
    std::size_t cut = cands.size();
    for (std::size_t t = 1; t < cands.size(); ++t) {
        if (cands[t].likelihood < params.gap_ratio * cands[t - 1].likelihood) {
            cut = t;
            break;
        }
    }
    if (cut > static_cast<std::size_t>(params.max_symmetry_order)) return {};
    cands.resize(cut);
    return cands;
}

} // namespace

Eigen::MatrixXi graph_distances(const ShapeGraph& g) {
    const int n = g.node_count();
    Eigen::MatrixXi dist = Eigen::MatrixXi::Constant(n, n, -1);
    for (int src = 0; src < n; ++src) {
        dist(src, src) = 0;
        std::deque<int> queue{src};
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            for (int w : g.adjacency[static_cast<std::size_t>(v)])
                if (dist(src, w) < 0) {
                    dist(src, w) = dist(src, v) + 1;
                    queue.push_back(w);
                }
        }
    }
    return dist;
}

std::vector<int> node_histogram(const ShapeGraph& g, int i) {
    if (i < 0 || i >= g.node_count()) throw PipelineError("histogram node out of range");
    const int n = g.node_count();
    std::vector<int> dist(static_cast<std::size_t>(n), -1);
    dist[static_cast<std::size_t>(i)] = 0;
    std::deque<int> queue{i};
    int ecc = 0;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        ecc = std::max(ecc, dist[static_cast<std::size_t>(v)]);
        for (int w : g.adjacency[static_cast<std::size_t>(v)])
            if (dist[static_cast<std::size_t>(w)] < 0) {
                dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
                queue.push_back(w);
            }
    }
    std::vector<int> hist(static_cast<std::size_t>(ecc), 0);
    for (int v = 0; v < n; ++v)
        if (dist[static_cast<std::size_t>(v)] > 0) ++hist[static_cast<std::size_t>(dist[static_cast<std::size_t>(v)] - 1)];
    return hist;
}

double unary_cost(const std::vector<int>& ha, const std::vector<int>& hb) {
    const std::size_t len = std::max(ha.size(), hb.size());
    double sum = 0.0;
    for (std::size_t r = 0; r < len; ++r) {
        const double a = r < ha.size() ? ha[r] : 0.0;
        const double b = r < hb.size() ? hb[r] : 0.0;
        sum += (a - b) * (a - b);
    }
    return std::sqrt(sum);
}

Eigen::MatrixXd assemble_affinity(const ShapeGraph& ga, const ShapeGraph& gb,
                                  const MatchingParams& params) {
    const int na = ga.node_count();
    const int nb = gb.node_count();
    if (na == 0 || nb == 0) throw PipelineError("cannot match an empty shape graph");
    if (na > params.max_nodes || nb > params.max_nodes)
        throw PipelineError("shape graph has " + std::to_string(std::max(na, nb)) +
                            " nodes, above the matching limit of " +
                            std::to_string(params.max_nodes));

    const Eigen::MatrixXi dist_a = graph_distances(ga);
    const Eigen::MatrixXi dist_b = graph_distances(gb);

    std::vector<std::vector<int>> hist_a(static_cast<std::size_t>(na));
    std::vector<std::vector<int>> hist_b(static_cast<std::size_t>(nb));
    for (int i = 0; i < na; ++i) hist_a[static_cast<std::size_t>(i)] = node_histogram(ga, i);
    for (int j = 0; j < nb; ++j) hist_b[static_cast<std::size_t>(j)] = node_histogram(gb, j);

    Eigen::MatrixXd cost(na, nb);
    std::vector<char> active(static_cast<std::size_t>(na) * static_cast<std::size_t>(nb));
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) {
            cost(i, j) = unary_cost(hist_a[static_cast<std::size_t>(i)],
                                    hist_b[static_cast<std::size_t>(j)]);
            const double affinity = std::exp(-cost(i, j) / params.sigma);
            active[static_cast<std::size_t>(i * nb + j)] = affinity >= params.prune_threshold;
        }

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(na * nb, na * nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            if (active[static_cast<std::size_t>(i * nb + j)])
                m(i * nb + j, i * nb + j) = std::exp(-cost(i, j) / params.sigma);

    kernels::affinity_offdiag(dist_a, dist_b, cost, active, params.sigma, m);

    // pairwise terms live in a subordinate scale: divide by their count so
    // the unary diagonal keeps control of the relaxation
    long long nnz = 0;
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            if (r != c && m(r, c) > params.nnz_floor) ++nnz;
    if (nnz > 0) {
        const double scale = 1.0 / static_cast<double>(nnz);
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c)
                if (r != c) m(r, c) *= scale;
    }
    return m;
}

Eigen::VectorXd leading_eigenvector(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd y(n);
    for (int it = 0; it < 10000; ++it) {
        kernels::matvec(m, x, y);
        const double top = y.maxCoeff();
        if (top <= 0.0) return Eigen::VectorXd::Zero(n);
        y /= top;
        const double delta = (y - x).cwiseAbs().maxCoeff();
        x.swap(y);
        if (delta <= 1e-10) break;
    }
    return x;
}

SymmetricMatching discretize(const Eigen::VectorXd& x, int na, int nb,
                             const MatchingParams& params) {
    if (x.size() != static_cast<Eigen::Index>(na) * nb)
        throw PipelineError("likelihood vector does not cover the candidate grid");

    std::vector<std::vector<char>> keep_a(static_cast<std::size_t>(na),
                                          std::vector<char>(static_cast<std::size_t>(nb), 0));
    std::vector<std::vector<char>> keep_b(static_cast<std::size_t>(nb),
                                          std::vector<char>(static_cast<std::size_t>(na), 0));
    for (int i = 0; i < na; ++i) {
        std::vector<MatchCandidate> cands;
        for (int j = 0; j < nb; ++j) cands.push_back({j, x[i * nb + j]});
        for (const MatchCandidate& c : gap_select(std::move(cands), params))
            keep_a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c.node)] = 1;
    }
    for (int j = 0; j < nb; ++j) {
        std::vector<MatchCandidate> cands;
        for (int i = 0; i < na; ++i) cands.push_back({i, x[i * nb + j]});
        for (const MatchCandidate& c : gap_select(std::move(cands), params))
            keep_b[static_cast<std::size_t>(j)][static_cast<std::size_t>(c.node)] = 1;
    }

    SymmetricMatching out;
    out.match_a.resize(static_cast<std::size_t>(na));
    out.match_b.resize(static_cast<std::size_t>(nb));
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            if (keep_a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
                keep_b[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
                out.match_a[static_cast<std::size_t>(i)].push_back({j, x[i * nb + j]});
                out.match_b[static_cast<std::size_t>(j)].push_back({i, x[i * nb + j]});
            }
    auto by_likelihood = [](const MatchCandidate& a, const MatchCandidate& b) {
        if (a.likelihood != b.likelihood) return a.likelihood > b.likelihood;
        return a.node < b.node;
    };
    for (auto& set : out.match_a) std::sort(set.begin(), set.end(), by_likelihood);
    for (auto& set : out.match_b) std::sort(set.begin(), set.end(), by_likelihood);
    for (int i = 0; i < na; ++i)
        if (out.match_a[static_cast<std::size_t>(i)].empty()) out.unmatched_a.push_back(i);
    for (int j = 0; j < nb; ++j)
        if (out.match_b[static_cast<std::size_t>(j)].empty()) out.unmatched_b.push_back(j);
    return out;
}

SymmetricMatching match_graphs(const ShapeGraph& ga, const ShapeGraph& gb,
                               const MatchingParams& params) {
    const Eigen::MatrixXd m = assemble_affinity(ga, gb, params);
    const Eigen::VectorXd x = leading_eigenvector(m);
    return discretize(x, ga.node_count(), gb.node_count(), params);
}

} // namespace sgm
