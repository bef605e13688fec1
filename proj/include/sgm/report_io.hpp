#pragma once

#include <string>
#include <vector>

#include "sgm/pipeline.hpp"

namespace sgm {

// Deterministic JSON for the report: same inputs and seed give the same
// bytes. Wall times are excluded here (see timings_to_json) so reruns stay
// byte-identical.
std::string report_to_json(const CorrespondenceReport& report);

// Inverse of report_to_json for the serialized fields. Graph node vertex
// sets are rebuilt from the labels; graph adjacency and timings are not part
// of the report file (the graph dumps carry them).
CorrespondenceReport report_from_json(const std::string& text);

std::string timings_to_json(const CorrespondenceReport& report);
std::string graph_to_json(const ShapeGraph& g);
std::string matching_to_json(const SymmetricMatching& sym, const MatchingParams& params);
std::string one_to_one_to_json(const OneToOneMatching& one, const std::vector<int>& self_assigned);

// report.json, timings.json, labels_*.txt, graph_*.json, matching.json,
// one_to_one.json and colored region PLYs, all under dir (created if needed)
void write_report_bundle(const CorrespondenceReport& report, const Shape& a, const Shape& b,
                         const std::string& dir);

void write_sweep_csv(const std::vector<SweepCell>& cells, const std::string& path);
std::vector<SweepCell> read_sweep_csv(const std::string& path);

// Region indicator constraints for downstream solvers: per matched pair of
// regions, a characteristic vector on each shape (value on the region's
// vertices, zero elsewhere), so the area-weighted sum of an indicator equals
// its region's area.
struct IndicatorConstraint {
    int node_a = -1;
    int node_b = -1;
    std::vector<int> support_a;
    std::vector<int> support_b;
    double value = 1.0;
};

struct IndicatorConstraints {
    int vertices_a = 0;
    int vertices_b = 0;
    std::string mode; // "one_to_one" or "symmetric"
    std::vector<IndicatorConstraint> constraints;
};

// symmetric mode emits one constraint per mutual pair; one-to-one mode one
// per resolved pair (including self assignments)
IndicatorConstraints make_indicator_constraints(const CorrespondenceReport& report,
                                                bool symmetric);
void write_indicator_constraints(const IndicatorConstraints& c, const std::string& path);
IndicatorConstraints read_indicator_constraints(const std::string& path);

// dense vector with `value` on the support and zero elsewhere
Eigen::VectorXd indicator_dense(const std::vector<int>& support, double value, int n);

} // namespace sgm
