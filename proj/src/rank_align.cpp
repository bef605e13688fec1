#include "sgm/rank_align.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sgm/error.hpp"

namespace sgm {

namespace {

// Sorted unique values with their midpoint CDF positions
// q_j = (area below) + (tied area at the value) / 2, areas normalized to 1.
struct WeightedCdf {
    std::vector<double> values;
    std::vector<double> positions;
};

WeightedCdf build_cdf(const Eigen::MatrixXd& values, int col, const Eigen::VectorXd& areas) {
    const int n = static_cast<int>(values.rows());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return values(a, col) < values(b, col); });

    const double total = areas.sum();
    WeightedCdf cdf;
    double below = 0.0;
    int i = 0;
    while (i < n) {
        const double v = values(order[i], col);
        if (!std::isfinite(v)) throw PipelineError("non-finite descriptor value");
        double tied = 0.0;
        int j = i;
        while (j < n && values(order[j], col) == v) {
            tied += areas[order[j]];
            ++j;
        }
        cdf.values.push_back(v);
        cdf.positions.push_back((below + tied / 2.0) / total);
        below += tied;
        i = j;
    }
    return cdf;
}

double quantile(const WeightedCdf& cdf, double p) {
    const std::vector<double>& q = cdf.positions;
    const std::vector<double>& v = cdf.values;
    auto it = std::lower_bound(q.begin(), q.end(), p);
    if (it == q.end()) return v.back();
    const std::size_t j = static_cast<std::size_t>(it - q.begin());
    if (*it == p || j == 0) return v[j];
    const double t = (p - q[j - 1]) / (q[j] - q[j - 1]);
    return v[j - 1] + t * (v[j] - v[j - 1]);
}

} // namespace

Eigen::MatrixXd rank_align(const Eigen::MatrixXd& src_values, const Eigen::VectorXd& src_areas,
                           const Eigen::MatrixXd& ref_values, const Eigen::VectorXd& ref_areas) {
    if (src_values.rows() != src_areas.size() || ref_values.rows() != ref_areas.size())
        throw PipelineError("area size does not match descriptor rows");
    if (src_values.cols() != ref_values.cols())
        throw PipelineError("descriptor channel counts differ");
    if ((src_areas.array() <= 0.0).any() || (ref_areas.array() <= 0.0).any())
        throw PipelineError("non-positive area weight");

    const int n = static_cast<int>(src_values.rows());
    const int d = static_cast<int>(src_values.cols());
    Eigen::MatrixXd out(n, d);
    for (int c = 0; c < d; ++c) {
        const WeightedCdf src = build_cdf(src_values, c, src_areas);
        const WeightedCdf ref = build_cdf(ref_values, c, ref_areas);
        for (int i = 0; i < n; ++i) {
            // exact position lookup: the value is one of src's knots
            const double v = src_values(i, c);
            const std::size_t j = static_cast<std::size_t>(
                std::lower_bound(src.values.begin(), src.values.end(), v) - src.values.begin());
            out(i, c) = quantile(ref, src.positions[j]);
        }
    }
    return out;
}

} // namespace sgm
