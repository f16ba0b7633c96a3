#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "isingsim/errors.hpp"
#include "isingsim/io.hpp"
#include "isingsim/model.hpp"
#include "isingsim/sampler.hpp"
#include "isingsim/selection.hpp"

using namespace isingsim;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "isingsim_io_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string path_of(const std::string& name) { return (test_dir() / name).string(); }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_edges(const std::string& dot) {
    int edges = 0;
    std::size_t pos = 0;
    while ((pos = dot.find(" -- ", pos)) != std::string::npos) {
        ++edges;
        pos += 4;
    }
    return edges;
}

std::string what_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("responses round trip and validation") {
    BinaryDataset data;
    data.y.resize(3, 2);
    data.y << 1, 0, 0, 1, 1, 1;
    data.labels = {"alpha", "beta"};
    const std::string path = path_of("responses.csv");
    write_responses_csv(path, data);
    const auto back = read_responses_csv(path);
    CHECK((back.y == data.y));
    CHECK(back.labels == data.labels);

    const std::string bad = path_of("responses_bad.csv");
    write_file(bad, "a,b\n1,0\n1,2\n");
    const std::string msg = what_of([&] { read_responses_csv(bad); });
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);

    write_file(bad, "a,b\n1,0\n1,0.5\n");
    CHECK_THROWS_AS(read_responses_csv(bad), input_error);
    write_file(bad, "a,b\n");
    CHECK_THROWS_AS(read_responses_csv(bad), input_error);
    write_file(bad, "a,b\n1\n");
    CHECK_THROWS_AS(read_responses_csv(bad), input_error);
    CHECK_THROWS_AS(read_responses_csv(path_of("missing.csv")), input_error);

    // comments and blank lines are skipped, defaults label the columns
    write_file(bad, "# comment\nv1,v2\n\n0,1\n");
    const auto ok = read_responses_csv(bad);
    CHECK(ok.n() == 1);
}

TEST_CASE("matrix round trip preserves doubles exactly") {
    Eigen::MatrixXd m(2, 2);
    m << 0.0, 0.1234567890123456789, -1.0 / 3.0, 0.0;
    m(1, 0) = m(0, 1);  // keep it symmetric for the similarity reader below
    const std::string path = path_of("matrix.csv");
    write_matrix_csv(path, m, {"x", "y"});
    std::vector<std::string> labels;
    const auto back = read_matrix_csv(path, &labels);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
    CHECK(labels == std::vector<std::string>{"x", "y"});

    const auto sim = read_similarity_csv(path, "mylabel");
    CHECK(sim.label() == "mylabel");
    CHECK(sim.kind() == SimilarityKind::raw);

    const std::string bad = path_of("matrix_bad.csv");
    write_file(bad, "a,b\n0,1\n");
    CHECK_THROWS_AS(read_matrix_csv(bad, nullptr), input_error);

    write_file(bad, "a,b\n0,1\n0.5,0\n");
    const std::string msg = what_of([&] { read_similarity_csv(bad, "w"); });
    CHECK(msg.find("matrix_bad.csv") != std::string::npos);
}

TEST_CASE("attribute tables with a sidecar schema") {
    const std::string table = path_of("attrs.csv");
    const std::string schema = path_of("attrs_schema.csv");
    write_file(table,
               "entity,age,group\n"
               "v1,1.5,a\n"
               "v2,2.5,b\n"
               "v3,3.5,a\n");
    write_file(schema, "column,kind\nage,quantitative\ngroup,qualitative\n");
    const auto attrs = read_attribute_table(table, schema);
    CHECK(attrs.entities == std::vector<std::string>{"v1", "v2", "v3"});
    REQUIRE(attrs.quantitative.size() == 1);
    CHECK(attrs.quantitative[0].name == "age");
    CHECK(attrs.quantitative[0].values == std::vector<double>{1.5, 2.5, 3.5});
    REQUIRE(attrs.qualitative.size() == 1);
    CHECK(attrs.qualitative[0].categories == std::vector<std::string>{"a", "b", "a"});

    write_file(schema, "age,quantitative\n");
    CHECK_THROWS_AS(read_attribute_table(table, schema), input_error);  // group undeclared

    write_file(schema, "age,numeric\ngroup,qualitative\n");
    CHECK_THROWS_AS(read_attribute_table(table, schema), input_error);  // bad kind

    write_file(schema, "age,quantitative\ngroup,qualitative\n");
    write_file(table, "entity,age,group\nv1,notanumber,a\nv2,2,b\n");
    const std::string msg = what_of([&] { read_attribute_table(table, schema); });
    CHECK(msg.find("line 2") != std::string::npos);
}

TEST_CASE("edge lists resolve entity labels") {
    const std::string path = path_of("edges.csv");
    write_file(path, "from,to\nv1,v2\nv3,v1\n");
    const std::vector<std::string> entities = {"v1", "v2", "v3"};
    const auto adj = read_edge_list(path, entities, "net");
    CHECK(adj.dim == 3);
    REQUIRE(adj.edges.size() == 2);
    CHECK(adj.edges[0] == std::pair<int, int>{0, 1});
    CHECK(adj.edges[1] == std::pair<int, int>{2, 0});

    // no header: the first row is data when both fields are known entities
    write_file(path, "v1,v2\nv2,v3\n");
    CHECK(read_edge_list(path, entities, "net").edges.size() == 2);

    write_file(path, "from,to\nv1,ghost\n");
    const std::string msg = what_of([&] { read_edge_list(path, entities, "net"); });
    CHECK(msg.find("ghost") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
}

TEST_CASE("fit results round trip through JSON byte for byte") {
    std::mt19937_64 gen(4);
    const int p = 4, n = 80, K = 2;
    std::vector<SimilarityMatrix> sims;
    for (int k = 0; k < K; ++k) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
        w(k, k + 1) = w(k + 1, k) = 1.0;
        w(0, 3) = w(3, 0) = 0.5;
        sims.emplace_back(w, "w" + std::to_string(k + 1));
    }
    Eigen::VectorXd alpha(K);
    alpha << 0.7, 0.0;
    const auto data = sample_exact(n, ParameterSet(Eigen::VectorXd::Zero(p), alpha), sims, 5);

    FitModelOptions opt;
    opt.folds = 4;
    opt.grid_length = 8;
    opt.seed = 2;
    const FitResult res = fit_model(data, sims, opt);

    const std::string text = fit_result_to_json(res);
    CHECK(fit_result_to_json(res) == text);  // deterministic serialization
    const FitResult back = fit_result_from_json(text);
    CHECK(fit_result_to_json(back) == text);  // lossless round trip

    CHECK(back.penalty == res.penalty);
    CHECK(back.tune == res.tune);
    CHECK(back.n == res.n);
    CHECK(back.p == res.p);
    CHECK(back.K == res.K);
    CHECK(back.chosen_lambda == res.chosen_lambda);
    CHECK(back.chosen_index == res.chosen_index);
    CHECK(back.active == res.active);
    CHECK((back.main_effects == res.main_effects));
    CHECK((back.alpha == res.alpha));
    CHECK((back.refit_alpha == res.refit_alpha));
    CHECK((back.se_alpha == res.se_alpha));
    CHECK(back.lambda_grid == res.lambda_grid);
    CHECK(back.cv_mean_score == res.cv_mean_score);
    CHECK(back.pseudo_r2_value == res.pseudo_r2_value);
    CHECK(back.kkt_residual == res.kkt_residual);
    CHECK(back.warnings == res.warnings);
    CHECK(back.similarity_labels == res.similarity_labels);
    REQUIRE(back.alpha_intervals.size() == res.alpha_intervals.size());
    for (std::size_t c = 0; c < res.alpha_intervals.size(); ++c) {
        CHECK(back.alpha_intervals[c].lower == res.alpha_intervals[c].lower);
        CHECK(back.alpha_intervals[c].upper == res.alpha_intervals[c].upper);
    }

    const std::string path = path_of("fit.json");
    write_fit_result(path, res);
    const FitResult file_back = read_fit_result(path);
    CHECK(fit_result_to_json(file_back) == text);

    CHECK_THROWS_AS(fit_result_from_json("{not json"), input_error);
    CHECK_THROWS_AS(fit_result_from_json("{\"schema_version\": 99}"), input_error);

    const std::string table = path_of("coefficients.csv");
    write_coefficient_table(table, res);
    const std::string content = slurp(table);
    CHECK(content.find("coefficient,estimate,se,lower,upper,active") != std::string::npos);
    int lines = 0;
    for (char ch : content) {
        if (ch == '\n') ++lines;
    }
    CHECK(lines == 2 + K);  // version stamp, header, one row per similarity matrix
    for (const auto& label : res.similarity_labels) {
        CHECK(content.find(label) != std::string::npos);
    }
}

TEST_CASE("median of the off-diagonal") {
    Eigen::MatrixXd t3 = Eigen::MatrixXd::Zero(3, 3);
    t3(0, 1) = t3(1, 0) = -1.0;
    t3(0, 2) = t3(2, 0) = 5.0;
    t3(1, 2) = t3(2, 1) = 2.0;
    CHECK(median_offdiagonal(t3) == 2.0);  // odd count: the middle value

    Eigen::MatrixXd t4 = Eigen::MatrixXd::Zero(4, 4);
    const double vals[6] = {-3.0, -1.0, 0.5, 2.0, 4.0, 10.0};
    int v = 0;
    for (int j = 0; j < 4; ++j) {
        for (int k = j + 1; k < 4; ++k) {
            t4(j, k) = t4(k, j) = vals[v++];
        }
    }
    CHECK(median_offdiagonal(t4) == doctest::Approx(1.25).epsilon(1e-15));  // mean of 0.5 and 2

    CHECK_THROWS_AS(median_offdiagonal(Eigen::MatrixXd::Zero(1, 1)), input_error);
    CHECK_THROWS_AS(median_offdiagonal(Eigen::MatrixXd::Zero(2, 3)), input_error);
}

TEST_CASE("graph export policies") {
    const int p = 6;
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, p);
    double v = 0.0;
    for (int j = 0; j < p; ++j) {
        for (int k = j + 1; k < p; ++k) {
            v += 1.0;  // 15 distinct positive values 1..15
            theta(j, k) = theta(k, j) = v;
        }
    }
    theta.diagonal().setConstant(-0.5);
    const std::vector<std::string> labels = {"a", "b", "c", "d", "e", "f"};

    SUBCASE("median keeps exactly the strictly-above half") {
        const std::string path = path_of("graph_median.dot");
        GraphExportOptions opt;
        export_graph_dot(path, theta, labels, opt);
        const std::string dot = slurp(path);
        CHECK(count_edges(dot) == 7);  // 15 distinct values: 7 above the median
        CHECK(dot.find("threshold_policy=median") != std::string::npos);
        CHECK(dot.find("graph dependence") != std::string::npos);
        CHECK(dot.find("schema_version=1") != std::string::npos);
        // the weakest surviving edge carries weight 9, the median value 8 is dropped
        CHECK(dot.find("weight=\"9\"") != std::string::npos);
        CHECK(dot.find("weight=\"8\"") == std::string::npos);
    }
    SUBCASE("none keeps every pair, +inf keeps none") {
        const std::string all_path = path_of("graph_all.dot");
        GraphExportOptions opt;
        opt.policy = ThresholdPolicy::none;
        export_graph_dot(all_path, theta, labels, opt);
        CHECK(count_edges(slurp(all_path)) == 15);

        const std::string none_path = path_of("graph_none.dot");
        opt.policy = ThresholdPolicy::value;
        opt.value = std::numeric_limits<double>::infinity();
        export_graph_dot(none_path, theta, labels, opt);
        const std::string dot = slurp(none_path);
        CHECK(count_edges(dot) == 0);
        for (const auto& l : labels) CHECK(dot.find("\"" + l + "\"") != std::string::npos);
    }
    SUBCASE("numeric threshold is strict") {
        const std::string path = path_of("graph_value.dot");
        GraphExportOptions opt;
        opt.policy = ThresholdPolicy::value;
        opt.value = 14.0;
        export_graph_dot(path, theta, labels, opt);
        CHECK(count_edges(slurp(path)) == 1);  // only the value-15 edge exceeds 14
    }
    SUBCASE("negative interactions pass a low enough threshold") {
        Eigen::MatrixXd neg = Eigen::MatrixXd::Zero(3, 3);
        neg(0, 1) = neg(1, 0) = -2.0;
        neg(0, 2) = neg(2, 0) = -5.0;
        neg(1, 2) = neg(2, 1) = 1.0;
        GraphExportOptions opt;
        opt.policy = ThresholdPolicy::value;
        opt.value = -3.0;
        const std::string path = path_of("graph_neg.dot");
        export_graph_dot(path, neg, {"x", "y", "z"}, opt);
        const std::string dot = slurp(path);
        CHECK(count_edges(dot) == 2);  // -2 and 1 beat -3; -5 does not
        CHECK(dot.find("weight=\"-2\"") != std::string::npos);
    }
    SUBCASE("categories color the nodes") {
        const std::string path = path_of("graph_cat.dot");
        GraphExportOptions opt;
        opt.policy = ThresholdPolicy::none;
        opt.node_categories = {{"a", "g1"}, {"b", "g2"}, {"c", "g1"}};
        export_graph_dot(path, theta, labels, opt);
        const std::string dot = slurp(path);
        CHECK(dot.find("fillcolor") != std::string::npos);
        // same category, same color; different category, different color
        const auto color_of = [&](const std::string& node) {
            const std::size_t at = dot.find("\"" + node + "\" [");
            REQUIRE(at != std::string::npos);
            const std::size_t fc = dot.find("fillcolor=\"", at);
            REQUIRE(fc != std::string::npos);
            const std::size_t start = fc + 11;
            return dot.substr(start, dot.find('"', start) - start);
        };
        CHECK(color_of("a") == color_of("c"));
        CHECK(color_of("a") != color_of("b"));
    }
    SUBCASE("label count must match") {
        GraphExportOptions opt;
        CHECK_THROWS_AS(export_graph_dot(path_of("bad.dot"), theta, {"a", "b"}, opt),
                        input_error);
    }
}

TEST_CASE("category table reader") {
    const std::string path = path_of("cats.csv");
    write_file(path, "entity,category\nv1,anxiety\nv2,mood\n");
    const auto cats = read_category_csv(path);
    CHECK(cats.size() == 2);
    CHECK(cats.at("v1") == "anxiety");
    write_file(path, "v1,anxiety\nv2,mood\n");
    CHECK(read_category_csv(path).size() == 2);
}

TEST_CASE("benchmark report files and scenario parsing") {
    BenchmarkReport report;
    report.spec = ScenarioSpec{};
    report.spec.name = "unit";
    report.spec.replicates = 1;
    report.seconds = 1.25;
    BenchmarkRow row;
    row.replicate = 1;
    row.estimator = "oracle";
    row.mse_alpha = 0.004;
    row.mse_theta = 0.002;
    row.tpr = 1.0;
    row.fpr = 0.0;
    row.has_fpr = true;
    row.theta_error = 0.5;
    row.dataset_hash = 0x1234ull;
    report.rows.push_back(row);
    BenchmarkSummaryRow sum;
    sum.estimator = "oracle";
    sum.replicates = 1;
    sum.mean_mse_alpha = 0.004;
    sum.has_fpr = true;
    report.summary.push_back(sum);

    const std::string csv_path = path_of("report.csv");
    write_benchmark_csv(csv_path, report);
    const std::string csv = slurp(csv_path);
    CHECK(csv.find("# scenario=unit") != std::string::npos);
    CHECK(csv.find("mse_alpha_x1000") != std::string::npos);
    CHECK(csv.find("\n1,oracle,4,2,") != std::string::npos);  // x1000 scaling

    const std::string json_path = path_of("report.json");
    write_benchmark_json(json_path, report);
    const std::string text = slurp(json_path);
    CHECK(text.find("frobenius_offdiagonal") != std::string::npos);
    CHECK(text.find("\"unit\"") != std::string::npos);

    const std::string scen_path = path_of("scenario.json");
    write_file(scen_path,
               "{\"name\": \"cell\", \"n\": 150, \"p\": 10, \"K\": 6, \"K0\": 2,"
               " \"replicates\": 3, \"seed\": 9,"
               " \"sampler\": {\"method\": \"gibbs\", \"burn_in\": 40, \"thin\": 2},"
               " \"estimators\": [\"oracle\", \"regularized\"], \"folds\": 5,"
               " \"grid_length\": 11, \"theta_baseline\": true}");
    const auto spec = read_scenario_json(scen_path);
    CHECK(spec.name == "cell");
    CHECK(spec.n == 150);
    CHECK(spec.p == 10);
    CHECK(spec.K == 6);
    CHECK(spec.K0 == 2);
    CHECK(spec.replicates == 3);
    CHECK(spec.seed == 9);
    CHECK(spec.sampler.method == SamplerMethod::gibbs);
    CHECK(spec.sampler.burn_in == 40);
    CHECK(spec.sampler.thin == 2);
    CHECK(spec.estimators == std::vector<std::string>{"oracle", "regularized"});
    CHECK(spec.folds == 5);
    CHECK(spec.grid_length == 11);
    CHECK(spec.theta_baseline);

    write_file(scen_path, "{\"name\": \"x\", \"mystery\": 1}");
    const std::string msg = what_of([&] { read_scenario_json(scen_path); });
    CHECK(msg.find("mystery") != std::string::npos);

    write_file(scen_path, "{\"sampler\": {\"method\": \"magic\"}}");
    CHECK_THROWS_AS(read_scenario_json(scen_path), input_error);
}
