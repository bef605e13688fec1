#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sgm/error.hpp"
#include "sgm/report_io.hpp"
#include "sgm/synthetic.hpp"

using namespace sgm;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// small report with every field off its default, sizes consistent
CorrespondenceReport hand_report() {
    CorrespondenceReport r;
    r.config.seed = 123;
    r.config.k_min = 2;
    r.config.k_max = 3;
    r.config.hks.t_min = 0.031;
    r.config.matching.sigma = 0.4;
    r.config.exclude_unmatched = true;
    r.path_a = "a.off";
    r.path_b = "b.xyz";
    r.kind_a = ShapeKind::Mesh;
    r.kind_b = ShapeKind::PointCloud;
    r.vertices_a = 5;
    r.vertices_b = 4;
    r.k = 3;
    r.graph_distance = 1.0 / 3.0;
    r.labels_a = {0, 0, 1, 2, 2};
    r.labels_b = {1, 0, 0, 1};
    r.graph_a.nodes.resize(3);
    r.graph_b.nodes.resize(2);
    r.graph_a.vertex_node = r.labels_a;
    r.graph_b.vertex_node = r.labels_b;
    r.sym.match_a = {{{1, 0.9}, {0, 0.9}}, {}, {{0, 2.0 / 3.0}}};
    r.sym.match_b = {{{0, 0.9}, {2, 2.0 / 3.0}}, {{0, 0.9}}};
    r.one.pairs = {{0, 1}, {2, 0}};
    r.one.unresolved_a = {1};
    r.accuracy = 1.0 / 3.0;
    return r;
}

Shape blob() {
    std::vector<RadialBump> bumps;
    bumps.push_back({Eigen::Vector3d::UnitZ(), 0.55, 0.35});
    bumps.push_back({Eigen::Vector3d::UnitX(), 0.4, 0.25});
    return icosphere(2, bumps);
}

PipelineConfig small_config() {
    PipelineConfig cfg;
    cfg.k_min = 4;
    cfg.k_max = 5;
    return cfg;
}

} // namespace

TEST_CASE("report JSON round-trips byte for byte") {
    const CorrespondenceReport r = hand_report();
    const std::string text = report_to_json(r);
    const CorrespondenceReport back = report_from_json(text);
    CHECK(report_to_json(back) == text);

    CHECK(back.kind_b == ShapeKind::PointCloud);
    CHECK(back.config.seed == 123);
    CHECK(back.config.exclude_unmatched);
    CHECK(back.graph_distance == r.graph_distance);
    CHECK(back.labels_a == r.labels_a);
    CHECK(back.one.pairs == r.one.pairs);
    CHECK(back.one.unresolved_a == r.one.unresolved_a);
    CHECK(back.accuracy == r.accuracy);
    CHECK(back.accuracy_one_to_one == -1.0);

    // match sets survive in both directions, mirrored
    REQUIRE(back.sym.match_a.size() == 3);
    REQUIRE(back.sym.match_b.size() == 2);
    CHECK(back.sym.match_a[0].size() == 2);
    CHECK(back.sym.match_a[0][0].node == 1);
    CHECK(back.sym.match_a[0][1].node == 0);
    CHECK(back.sym.match_b[0][0].node == 0);
    CHECK(back.sym.match_b[0][0].likelihood == 0.9);
    CHECK(back.sym.match_b[0][1].node == 2);
    CHECK(back.sym.match_b[1][0].node == 0);

    // node memberships are rebuilt from the labels
    REQUIRE(back.graph_a.node_count() == 3);
    CHECK(back.graph_a.nodes[2].vertices == std::vector<int>{3, 4});
    CHECK(back.graph_b.nodes[0].vertices == std::vector<int>{1, 2});

    CHECK_THROWS_AS(report_from_json("not json"), InputError);
}

TEST_CASE("identical runs serialize identically") {
    const Shape shape = blob();
    const PipelineConfig cfg = small_config();
    const CorrespondenceReport first = run_match(shape, shape, cfg);
    const CorrespondenceReport second = run_match(shape, shape, cfg);
    CHECK(report_to_json(first) == report_to_json(second));
    CHECK(graph_to_json(first.graph_a) == graph_to_json(second.graph_a));
    CHECK(matching_to_json(first.sym, cfg.matching) ==
          matching_to_json(second.sym, cfg.matching));
    // wall times differ, so they live in their own file
    CHECK(report_to_json(first).find("seconds") == std::string::npos);
}

TEST_CASE("bundle writes every artifact") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sgm_report_bundle";
    fs::remove_all(dir);

    const Shape shape = blob();
    const CorrespondenceReport report = run_match(shape, shape, small_config());
    write_report_bundle(report, shape, shape, dir.string());

    for (const char* name :
         {"report.json", "timings.json", "graph_a.json", "graph_b.json", "matching.json",
          "one_to_one.json", "labels_a.txt", "labels_b.txt", "regions_a.ply", "regions_b.ply"})
        CHECK(fs::exists(dir / name));

    CHECK(slurp(dir / "report.json") == report_to_json(report));
    CHECK(slurp(dir / "regions_a.ply").substr(0, 3) == "ply");

    std::istringstream labels(slurp(dir / "labels_a.txt"));
    std::string line;
    int count = 0;
    while (std::getline(labels, line)) ++count;
    CHECK(count == shape.n());

    const std::string timings = slurp(dir / "timings.json");
    CHECK(timings.find("total_seconds") != std::string::npos);
    CHECK(timings.find("segmentation") != std::string::npos);
}

TEST_CASE("indicator constraints partition the shape") {
    const Shape shape = blob();
    const CorrespondenceReport report = run_self_symmetry(shape, small_config());

    const IndicatorConstraints one = make_indicator_constraints(report, false);
    CHECK(one.mode == "one_to_one");
    CHECK(one.vertices_a == shape.n());
    // self mode resolves every node, so the A supports partition the shape
    CHECK(static_cast<int>(one.constraints.size()) == report.graph_a.node_count());
    Eigen::VectorXd total = Eigen::VectorXd::Zero(shape.n());
    for (const IndicatorConstraint& c : one.constraints) {
        const Eigen::VectorXd x = indicator_dense(c.support_a, c.value, shape.n());
        // area-weighted sum of the indicator equals the region area
        CHECK(x.dot(shape.vertex_area) ==
              doctest::Approx(report.graph_a.nodes[static_cast<std::size_t>(c.node_a)].area)
                  .epsilon(1e-12));
        total += x;
    }
    CHECK((total - Eigen::VectorXd::Ones(shape.n())).lpNorm<Eigen::Infinity>() == 0.0);

    const IndicatorConstraints sym = make_indicator_constraints(report, true);
    CHECK(sym.mode == "symmetric");
    std::size_t pairs = 0;
    for (const auto& cands : report.sym.match_a) pairs += cands.size();
    CHECK(sym.constraints.size() == pairs);
}

TEST_CASE("constraints file round-trips bit for bit") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sgm_constraints";
    fs::create_directories(dir);
    const fs::path first = dir / "c1.json";
    const fs::path second = dir / "c2.json";

    const CorrespondenceReport report = hand_report();
    const IndicatorConstraints c = make_indicator_constraints(report, false);
    REQUIRE(c.constraints.size() == 2);
    CHECK(c.constraints[0].support_a == std::vector<int>{0, 1});
    CHECK(c.constraints[0].support_b == std::vector<int>{0, 3});
    CHECK(c.constraints[1].support_a == std::vector<int>{3, 4});
    CHECK(c.constraints[1].support_b == std::vector<int>{1, 2});

    write_indicator_constraints(c, first.string());
    const IndicatorConstraints back = read_indicator_constraints(first.string());
    write_indicator_constraints(back, second.string());
    CHECK(slurp(first) == slurp(second));
    CHECK(back.vertices_b == 4);
    CHECK(back.constraints[1].node_b == 0);
    CHECK(back.constraints[1].value == 1.0);
}

TEST_CASE("indicator_dense bounds check") {
    CHECK_THROWS_AS(indicator_dense({0, 5}, 1.0, 5), InputError);
    const Eigen::VectorXd x = indicator_dense({1, 3}, 2.0, 4);
    CHECK(x[0] == 0.0);
    CHECK(x[1] == 2.0);
    CHECK(x[3] == 2.0);
}

TEST_CASE("sweep CSV round trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sgm_sweep_csv";
    fs::create_directories(dir);
    const fs::path first = dir / "s1.csv";
    const fs::path second = dir / "s2.csv";

    std::vector<SweepCell> cells{{"mesh_to_cloud", 6000, 0.0, 1.0, 4},
                                 {"mesh_to_cloud", 6000, 0.01, 0.7916666666666666, 4},
                                 {"cloud_to_cloud", 500, 0.02, 1.0 / 3.0, 4}};
    write_sweep_csv(cells, first.string());
    const auto back = read_sweep_csv(first.string());
    REQUIRE(back.size() == 3);
    CHECK(back[1].mode == "mesh_to_cloud");
    CHECK(back[1].noise == 0.01);
    CHECK(back[1].accuracy == 0.7916666666666666);
    CHECK(back[2].accuracy == 1.0 / 3.0);
    CHECK(back[2].runs == 4);
    write_sweep_csv(back, second.string());
    CHECK(slurp(first) == slurp(second));

    const std::string text = slurp(first);
    CHECK(text.rfind("mode,points,noise,accuracy,runs\n", 0) == 0);
    CHECK(text.find("0.01") != std::string::npos);

    std::ofstream bad(dir / "bad.csv");
    bad << "wrong,header\n";
    bad.close();
    CHECK_THROWS_AS(read_sweep_csv((dir / "bad.csv").string()), InputError);
}
