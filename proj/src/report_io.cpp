#include "sgm/report_io.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sgm/error.hpp"

namespace sgm {

namespace {

using nlohmann::json;

// object keys come out sorted, so identical reports serialize identically
std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << text;
    if (!out) throw InputError("write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json parse(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InputError(std::string("invalid JSON in ") + what);
    return j;
}

const char* kind_name(ShapeKind kind) {
    return kind == ShapeKind::Mesh ? "mesh" : "point_cloud";
}

ShapeKind kind_from_name(const std::string& name) {
    if (name == "mesh") return ShapeKind::Mesh;
    if (name == "point_cloud") return ShapeKind::PointCloud;
    throw InputError("unknown shape kind: " + name);
}

json params_to_json(const PipelineConfig& c) {
    return json{{"exclude_unmatched", c.exclude_unmatched},
                {"gap_ratio", c.matching.gap_ratio},
                {"hks_max_eigenpairs", c.hks.max_eigenpairs},
                {"hks_t_max", c.hks.t_max},
                {"hks_t_min", c.hks.t_min},
                {"hks_t_steps", c.hks.t_steps},
                {"k_max", c.k_max},
                {"k_min", c.k_min},
                {"knn", c.knn},
                {"matching_max_nodes", c.matching.max_nodes},
                {"max_symmetry_order", c.matching.max_symmetry_order},
                {"nnz_floor", c.matching.nnz_floor},
                {"prune_threshold", c.matching.prune_threshold},
                {"seed", c.seed},
                {"sigma", c.matching.sigma},
                {"symmetric_only", c.symmetric_only},
                {"tiny_area_frac", c.tiny_area_frac},
                {"use_degree_list", c.use_degree_list}};
}

PipelineConfig params_from_json(const json& p) {
    PipelineConfig c;
    c.exclude_unmatched = p.at("exclude_unmatched").get<bool>();
    c.matching.gap_ratio = p.at("gap_ratio").get<double>();
    c.hks.max_eigenpairs = p.at("hks_max_eigenpairs").get<int>();
    c.hks.t_max = p.at("hks_t_max").get<double>();
    c.hks.t_min = p.at("hks_t_min").get<double>();
    c.hks.t_steps = p.at("hks_t_steps").get<int>();
    c.k_max = p.at("k_max").get<int>();
    c.k_min = p.at("k_min").get<int>();
    c.knn = p.at("knn").get<int>();
    c.matching.max_nodes = p.at("matching_max_nodes").get<int>();
    c.matching.max_symmetry_order = p.at("max_symmetry_order").get<int>();
    c.matching.nnz_floor = p.at("nnz_floor").get<double>();
    c.matching.prune_threshold = p.at("prune_threshold").get<double>();
    c.seed = p.at("seed").get<std::uint64_t>();
    c.matching.sigma = p.at("sigma").get<double>();
    c.symmetric_only = p.at("symmetric_only").get<bool>();
    c.tiny_area_frac = p.at("tiny_area_frac").get<double>();
    c.use_degree_list = p.at("use_degree_list").get<bool>();
    return c;
}

json sym_pairs_to_json(const SymmetricMatching& sym) {
    json pairs = json::array();
    for (std::size_t i = 0; i < sym.match_a.size(); ++i)
        for (const MatchCandidate& c : sym.match_a[i])
            pairs.push_back(json{{"a", static_cast<int>(i)},
                                 {"b", c.node},
                                 {"likelihood", c.likelihood}});
    return pairs;
}

json matching_body(const SymmetricMatching& sym) {
    return json{{"pairs", sym_pairs_to_json(sym)},
                {"unmatched_a", sym.unmatched_a},
                {"unmatched_b", sym.unmatched_b}};
}

SymmetricMatching matching_from_json(const json& m, int na, int nb) {
    SymmetricMatching sym;
    sym.match_a.resize(static_cast<std::size_t>(na));
    sym.match_b.resize(static_cast<std::size_t>(nb));
    for (const json& p : m.at("pairs")) {
        const int a = p.at("a").get<int>();
        const int b = p.at("b").get<int>();
        const double v = p.at("likelihood").get<double>();
        sym.match_a.at(static_cast<std::size_t>(a)).push_back({b, v});
        sym.match_b.at(static_cast<std::size_t>(b)).push_back({a, v});
    }
    // match_a keeps file order; match_b is re-sorted the way the matcher
    // emits it (likelihood falling, node id rising)
    for (auto& cands : sym.match_b)
        std::sort(cands.begin(), cands.end(), [](const MatchCandidate& x, const MatchCandidate& y) {
            if (x.likelihood != y.likelihood) return x.likelihood > y.likelihood;
            return x.node < y.node;
        });
    sym.unmatched_a = m.at("unmatched_a").get<std::vector<int>>();
    sym.unmatched_b = m.at("unmatched_b").get<std::vector<int>>();
    return sym;
}

json one_to_one_body(const OneToOneMatching& one, const std::vector<int>& self_assigned) {
    json pairs = json::array();
    for (const auto& [a, b] : one.pairs) {
        const bool self = std::find(self_assigned.begin(), self_assigned.end(), a) !=
                          self_assigned.end() &&
                          a == b;
        pairs.push_back(json{{"a", a}, {"b", b}, {"resolved", !self}});
    }
    return json{{"pairs", pairs},
                {"self_assigned", self_assigned},
                {"unresolved_a", one.unresolved_a},
                {"unresolved_b", one.unresolved_b}};
}

} // namespace

std::string report_to_json(const CorrespondenceReport& report) {
    json j{{"accuracy", report.accuracy},
           {"accuracy_one_to_one", report.accuracy_one_to_one},
           {"graph_distance", report.graph_distance},
           {"inputs",
            json{{"kind_a", kind_name(report.kind_a)},
                 {"kind_b", kind_name(report.kind_b)},
                 {"path_a", report.path_a},
                 {"path_b", report.path_b},
                 {"vertices_a", report.vertices_a},
                 {"vertices_b", report.vertices_b}}},
           {"k", report.k},
           {"labels_a", report.labels_a},
           {"labels_b", report.labels_b},
           {"matching", matching_body(report.sym)},
           {"one_to_one", one_to_one_body(report.one, report.self_assigned)},
           {"params", params_to_json(report.config)},
           {"segments_a", report.graph_a.node_count()},
           {"segments_b", report.graph_b.node_count()},
           {"self_mode", report.self_mode}};
    return dump(j);
}

CorrespondenceReport report_from_json(const std::string& text) {
    const json j = parse(text, "report");
    CorrespondenceReport r;
    r.config = params_from_json(j.at("params"));
    const json& in = j.at("inputs");
    r.path_a = in.at("path_a").get<std::string>();
    r.path_b = in.at("path_b").get<std::string>();
    r.kind_a = kind_from_name(in.at("kind_a").get<std::string>());
    r.kind_b = kind_from_name(in.at("kind_b").get<std::string>());
    r.vertices_a = in.at("vertices_a").get<int>();
    r.vertices_b = in.at("vertices_b").get<int>();
    r.k = j.at("k").get<int>();
    r.graph_distance = j.at("graph_distance").get<double>();
    r.labels_a = j.at("labels_a").get<std::vector<int>>();
    r.labels_b = j.at("labels_b").get<std::vector<int>>();
    const int na = j.at("segments_a").get<int>();
    const int nb = j.at("segments_b").get<int>();
    // graphs are rebuilt only as vertex memberships; adjacency, expansions
    // and areas live in the graph dumps and are not reloaded here
    r.graph_a.nodes.resize(static_cast<std::size_t>(na));
    r.graph_b.nodes.resize(static_cast<std::size_t>(nb));
    r.graph_a.vertex_node = r.labels_a;
    r.graph_b.vertex_node = r.labels_b;
    for (std::size_t v = 0; v < r.labels_a.size(); ++v)
        r.graph_a.nodes.at(static_cast<std::size_t>(r.labels_a[v]))
            .vertices.push_back(static_cast<int>(v));
    for (std::size_t v = 0; v < r.labels_b.size(); ++v)
        r.graph_b.nodes.at(static_cast<std::size_t>(r.labels_b[v]))
            .vertices.push_back(static_cast<int>(v));
    r.sym = matching_from_json(j.at("matching"), na, nb);
    const json& o = j.at("one_to_one");
    for (const json& p : o.at("pairs"))
        r.one.pairs.emplace_back(p.at("a").get<int>(), p.at("b").get<int>());
    r.self_assigned = o.at("self_assigned").get<std::vector<int>>();
    r.one.unresolved_a = o.at("unresolved_a").get<std::vector<int>>();
    r.one.unresolved_b = o.at("unresolved_b").get<std::vector<int>>();
    r.self_mode = j.at("self_mode").get<bool>();
    r.accuracy = j.at("accuracy").get<double>();
    r.accuracy_one_to_one = j.at("accuracy_one_to_one").get<double>();
    return r;
}

std::string timings_to_json(const CorrespondenceReport& report) {
    json stages = json::array();
    for (const StageTiming& t : report.timings)
        stages.push_back(json{{"name", t.name}, {"seconds", t.seconds}});
    return dump(json{{"stages", stages}, {"total_seconds", report.total_seconds}});
}

std::string graph_to_json(const ShapeGraph& g) {
    json nodes = json::array();
    for (int i = 0; i < g.node_count(); ++i) {
        const GraphNode& n = g.nodes[static_cast<std::size_t>(i)];
        nodes.push_back(json{{"area", n.area},
                             {"centroid_id", n.cluster},
                             {"id", i},
                             {"size", static_cast<int>(n.vertices.size())}});
    }
    json edges = json::array();
    for (int i = 0; i < g.node_count(); ++i)
        for (int k : g.adjacency[static_cast<std::size_t>(i)])
            if (i < k) edges.push_back(json::array({i, k}));
    return dump(json{{"edges", edges}, {"nodes", nodes}});
}

std::string matching_to_json(const SymmetricMatching& sym, const MatchingParams& params) {
    json j = matching_body(sym);
    j["params"] = json{{"gap_ratio", params.gap_ratio},
                       {"max_nodes", params.max_nodes},
                       {"max_symmetry_order", params.max_symmetry_order},
                       {"nnz_floor", params.nnz_floor},
                       {"prune_threshold", params.prune_threshold},
                       {"sigma", params.sigma}};
    return dump(j);
}

std::string one_to_one_to_json(const OneToOneMatching& one, const std::vector<int>& self_assigned) {
    return dump(one_to_one_body(one, self_assigned));
}

namespace {

constexpr std::array<std::array<std::uint8_t, 3>, 20> kPalette = {{
    {31, 119, 180},  {174, 199, 232}, {255, 127, 14},  {255, 187, 120}, {44, 160, 44},
    {152, 223, 138}, {214, 39, 40},   {255, 152, 150}, {148, 103, 189}, {197, 176, 213},
    {140, 86, 75},   {196, 156, 148}, {227, 119, 194}, {247, 182, 210}, {127, 127, 127},
    {199, 199, 199}, {188, 189, 34},  {219, 219, 141}, {23, 190, 207},  {158, 218, 229},
}};

void write_labels(const std::string& path, const std::vector<int>& labels) {
    std::ostringstream out;
    for (int l : labels) out << l << '\n';
    write_text(path, out.str());
}

void write_regions_ply(const std::string& path, const Shape& shape,
                       const std::vector<int>& labels) {
    std::vector<std::array<std::uint8_t, 3>> colors(labels.size());
    for (std::size_t v = 0; v < labels.size(); ++v)
        colors[v] = kPalette[static_cast<std::size_t>(labels[v]) % kPalette.size()];
    save_ply_colored(path, shape, colors);
}

} // namespace

void write_report_bundle(const CorrespondenceReport& report, const Shape& a, const Shape& b,
                         const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory: " + dir);
    const fs::path base(dir);
    write_text((base / "report.json").string(), report_to_json(report));
    write_text((base / "timings.json").string(), timings_to_json(report));
    write_text((base / "graph_a.json").string(), graph_to_json(report.graph_a));
    write_text((base / "graph_b.json").string(), graph_to_json(report.graph_b));
    write_text((base / "matching.json").string(),
               matching_to_json(report.sym, report.config.matching));
    write_text((base / "one_to_one.json").string(),
               one_to_one_to_json(report.one, report.self_assigned));
    write_labels((base / "labels_a.txt").string(), report.labels_a);
    write_labels((base / "labels_b.txt").string(), report.labels_b);
    write_regions_ply((base / "regions_a.ply").string(), a, report.labels_a);
    write_regions_ply((base / "regions_b.ply").string(), b, report.labels_b);
}

void write_sweep_csv(const std::vector<SweepCell>& cells, const std::string& path) {
    std::ostringstream out;
    out << "mode,points,noise,accuracy,runs\n";
    char buf[64];
    for (const SweepCell& c : cells) {
        out << c.mode << ',' << c.points << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", c.noise);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", c.accuracy);
        out << buf << ',' << c.runs << '\n';
    }
    write_text(path, out.str());
}

std::vector<SweepCell> read_sweep_csv(const std::string& path) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line) || line != "mode,points,noise,accuracy,runs")
        throw InputError("unexpected sweep CSV header in " + path);
    std::vector<SweepCell> cells;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        SweepCell c;
        std::string field;
        std::getline(row, c.mode, ',');
        std::getline(row, field, ',');
        c.points = std::stoi(field);
        std::getline(row, field, ',');
        c.noise = std::stod(field);
        std::getline(row, field, ',');
        c.accuracy = std::stod(field);
        std::getline(row, field, ',');
        c.runs = std::stoi(field);
        cells.push_back(std::move(c));
    }
    return cells;
}

IndicatorConstraints make_indicator_constraints(const CorrespondenceReport& report,
                                                bool symmetric) {
    IndicatorConstraints out;
    out.vertices_a = report.vertices_a;
    out.vertices_b = report.vertices_b;
    out.mode = symmetric ? "symmetric" : "one_to_one";

    std::vector<std::vector<int>> support_a(report.graph_a.nodes.size());
    std::vector<std::vector<int>> support_b(report.graph_b.nodes.size());
    for (std::size_t v = 0; v < report.labels_a.size(); ++v)
        support_a.at(static_cast<std::size_t>(report.labels_a[v])).push_back(static_cast<int>(v));
    for (std::size_t v = 0; v < report.labels_b.size(); ++v)
        support_b.at(static_cast<std::size_t>(report.labels_b[v])).push_back(static_cast<int>(v));

    auto add = [&](int a, int b) {
        IndicatorConstraint c;
        c.node_a = a;
        c.node_b = b;
        c.support_a = support_a.at(static_cast<std::size_t>(a));
        c.support_b = support_b.at(static_cast<std::size_t>(b));
        out.constraints.push_back(std::move(c));
    };
    if (symmetric) {
        for (std::size_t i = 0; i < report.sym.match_a.size(); ++i)
            for (const MatchCandidate& c : report.sym.match_a[i]) add(static_cast<int>(i), c.node);
    } else {
        for (const auto& [a, b] : report.one.pairs) add(a, b);
    }
    return out;
}

void write_indicator_constraints(const IndicatorConstraints& c, const std::string& path) {
    json list = json::array();
    for (const IndicatorConstraint& ic : c.constraints)
        list.push_back(json{{"node_a", ic.node_a},
                            {"node_b", ic.node_b},
                            {"support_a", ic.support_a},
                            {"support_b", ic.support_b},
                            {"value", ic.value}});
    write_text(path, dump(json{{"constraints", list},
                               {"mode", c.mode},
                               {"vertices_a", c.vertices_a},
                               {"vertices_b", c.vertices_b}}));
}

IndicatorConstraints read_indicator_constraints(const std::string& path) {
    const json j = parse(read_text(path), "constraints");
    IndicatorConstraints out;
    out.vertices_a = j.at("vertices_a").get<int>();
    out.vertices_b = j.at("vertices_b").get<int>();
    out.mode = j.at("mode").get<std::string>();
    for (const json& e : j.at("constraints")) {
        IndicatorConstraint c;
        c.node_a = e.at("node_a").get<int>();
        c.node_b = e.at("node_b").get<int>();
        c.support_a = e.at("support_a").get<std::vector<int>>();
        c.support_b = e.at("support_b").get<std::vector<int>>();
        c.value = e.at("value").get<double>();
        out.constraints.push_back(std::move(c));
    }
    return out;
}

Eigen::VectorXd indicator_dense(const std::vector<int>& support, double value, int n) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int v : support) {
        if (v < 0 || v >= n) throw InputError("indicator support index out of range");
        x[v] = value;
    }
    return x;
}

} // namespace sgm
