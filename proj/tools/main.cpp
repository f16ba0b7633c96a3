#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "isingsim/benchmark.hpp"
#include "isingsim/errors.hpp"
#include "isingsim/estimator.hpp"
#include "isingsim/io.hpp"
#include "isingsim/model.hpp"
#include "isingsim/sampler.hpp"
#include "isingsim/selection.hpp"
#include "isingsim/similarity.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace isingsim;

namespace {

std::string timestamp_utc() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string sanitize_filename(const std::string& s) {
    std::string out;
    for (char c : s) {
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-'
                          ? c
                          : '_');
    }
    return out.empty() ? "unnamed" : out;
}

// "NAME=PATH" splits at the first '='; a bare path takes its stem as the
// name, with a leading "W_" prefix stripped so simulate output round-trips.
std::pair<std::string, std::string> split_source_spec(const std::string& spec) {
    const std::size_t eq = spec.find('=');
    if (eq != std::string::npos && eq > 0) {
        return {spec.substr(0, eq), spec.substr(eq + 1)};
    }
    std::string name = fs::path(spec).stem().string();
    if (name.rfind("W_", 0) == 0) name = name.substr(2);
    return {name, spec};
}

std::string kind_name(SimilarityKind kind) {
    switch (kind) {
        case SimilarityKind::quantitative: return "quantitative";
        case SimilarityKind::qualitative: return "qualitative";
        case SimilarityKind::adjacency: return "adjacency";
        default: return "raw";
    }
}

struct SourceFlags {
    std::vector<std::string> matrices;   // PATH or NAME=PATH
    std::string attributes;
    std::string schema;
    std::vector<std::string> edge_lists; // NAME=PATH
    double bandwidth = 1.0;
    bool standardize = false;
};

void add_source_flags(CLI::App* cmd, SourceFlags& src) {
    cmd->add_option("--similarity", src.matrices,
                    "Similarity matrix CSV, as PATH or NAME=PATH (repeatable)");
    cmd->add_option("--attributes", src.attributes,
                    "Entity attribute table CSV (first column: entity label)");
    cmd->add_option("--schema", src.schema,
                    "Schema CSV declaring each attribute column quantitative or qualitative");
    cmd->add_option("--edge-list", src.edge_lists,
                    "Relation edge list CSV as NAME=PATH (repeatable)");
    cmd->add_option("--bandwidth", src.bandwidth,
                    "Gaussian kernel bandwidth for quantitative attributes");
    cmd->add_flag("--standardize", src.standardize,
                  "Standardize quantitative attributes before the kernel");
}

// Builds the similarity list in flag order: matrix CSVs, then attribute
// columns (table order), then edge lists. Edge-list entity names resolve
// against `expected` labels when given, else the attribute table's entities.
std::vector<SimilarityMatrix> load_sources(const SourceFlags& src,
                                           const std::vector<std::string>* expected) {
    std::vector<SimilarityMatrix> sims;
    for (const std::string& spec : src.matrices) {
        const auto [name, path] = split_source_spec(spec);
        sims.push_back(read_similarity_csv(path, name));
    }
    std::vector<std::string> entities;
    if (!src.attributes.empty()) {
        if (src.schema.empty()) {
            throw input_error("--attributes requires --schema to declare column kinds");
        }
        const AttributeTable table = read_attribute_table(src.attributes, src.schema);
        entities = table.entities;
        if (expected != nullptr) {
            if (expected->size() != table.entities.size()) {
                throw input_error(src.attributes + ": " +
                                  std::to_string(table.entities.size()) +
                                  " entities but the responses have " +
                                  std::to_string(expected->size()) + " columns");
            }
            for (std::size_t i = 0; i < table.entities.size(); ++i) {
                if (table.entities[i] != (*expected)[i]) {
                    throw input_error(src.attributes + ": entity row " +
                                      std::to_string(i + 1) + " is '" + table.entities[i] +
                                      "' but response column " + std::to_string(i + 1) +
                                      " is '" + (*expected)[i] + "'");
                }
            }
        }
        for (const auto& attr : table.quantitative) {
            sims.push_back(from_quantitative(attr, src.bandwidth, src.standardize));
        }
        for (const auto& attr : table.qualitative) {
            sims.push_back(from_qualitative(attr));
        }
    }
    if (!src.edge_lists.empty()) {
        const std::vector<std::string>* resolve =
            expected != nullptr ? expected : (entities.empty() ? nullptr : &entities);
        if (resolve == nullptr) {
            throw input_error(
                "edge lists need entity labels from the responses or an attribute table");
        }
        for (const std::string& spec : src.edge_lists) {
            const auto [name, path] = split_source_spec(spec);
            sims.push_back(from_adjacency(read_edge_list(path, *resolve, name)));
        }
    }
    return sims;
}

PenaltyVariant parse_penalty(const std::string& s) {
    if (s == "adaptive") return PenaltyVariant::adaptive;
    if (s == "lasso") return PenaltyVariant::lasso;
    if (s == "none") return PenaltyVariant::none;
    if (s == "oracle") return PenaltyVariant::oracle;
    throw input_error("unknown penalty '" + s + "' (adaptive, lasso, none, oracle)");
}

TuneMethod parse_tune(const std::string& s) {
    if (s == "cv") return TuneMethod::cv;
    if (s == "aic") return TuneMethod::aic;
    if (s == "bic") return TuneMethod::bic;
    if (s == "fixed") return TuneMethod::fixed;
    throw input_error("unknown tuning method '" + s + "' (cv, aic, bic, fixed)");
}

SamplerMethod parse_method(const std::string& s) {
    if (s == "auto") return SamplerMethod::automatic;
    if (s == "exact") return SamplerMethod::exact;
    if (s == "gibbs") return SamplerMethod::gibbs;
    throw input_error("unknown sampler method '" + s + "' (auto, exact, gibbs)");
}

void parse_lambda_grid(const std::string& s, FitModelOptions& options) {
    const std::size_t comma = s.find(',');
    try {
        std::size_t used = 0;
        const std::string len = comma == std::string::npos ? s : s.substr(0, comma);
        options.grid_length = std::stoi(len, &used);
        if (used != len.size()) throw std::invalid_argument(len);
        if (comma != std::string::npos) {
            const std::string ratio = s.substr(comma + 1);
            options.grid_min_ratio = std::stod(ratio, &used);
            if (used != ratio.size()) throw std::invalid_argument(ratio);
        }
    } catch (const std::exception&) {
        throw input_error("--lambda-grid expects LEN or LEN,RATIO, got '" + s + "'");
    }
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

// Tokens are similarity labels, or 1-based indices as a fallback. "none" (or
// an empty string) selects the empty support.
std::vector<int> parse_support(const std::string& s,
                               const std::vector<std::string>& labels) {
    std::vector<int> support;
    if (s.empty() || s == "none") return support;
    for (const std::string& tok : split_commas(s)) {
        const auto it = std::find(labels.begin(), labels.end(), tok);
        if (it != labels.end()) {
            support.push_back(static_cast<int>(it - labels.begin()));
            continue;
        }
        try {
            std::size_t used = 0;
            const int idx = std::stoi(tok, &used);
            if (used != tok.size() || idx < 1 || idx > static_cast<int>(labels.size())) {
                throw std::invalid_argument(tok);
            }
            support.push_back(idx - 1);
        } catch (const std::exception&) {
            throw input_error("support entry '" + tok +
                              "' is neither a similarity label nor a 1-based index");
        }
    }
    return support;
}

fs::path prepare_output_dir(const std::string& dir) {
    fs::path out(dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw input_error("cannot create output directory: " + dir);
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path.string());
    out << text;
}

std::string describe_labels(const std::vector<SimilarityMatrix>& sims) {
    std::string s;
    for (std::size_t k = 0; k < sims.size(); ++k) {
        if (k) s += ", ";
        s += sims[k].label();
    }
    return s;
}

// ---------------------------------------------------------------------------

struct FitConfig {
    std::string responses;
    SourceFlags sources;
    std::string penalty = "adaptive";
    std::string tune = "cv";
    int folds = 10;
    std::uint64_t seed = 0;
    std::string lambda_grid;
    double fixed_lambda = -1.0;
    bool lambda_given = false;
    bool tune_given = false;
    std::string oracle_support;
    std::string out_dir = ".";
};

int run_fit(const FitConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = timestamp_utc();

    const BinaryDataset data = read_responses_csv(cfg.responses);
    const std::vector<SimilarityMatrix> sims = load_sources(cfg.sources, &data.labels);
    if (sims.empty()) throw input_error("at least one similarity source required");

    FitModelOptions options;
    options.penalty = parse_penalty(cfg.penalty);
    options.tune = parse_tune(cfg.tune);
    options.folds = cfg.folds;
    options.seed = cfg.seed;
    if (!cfg.lambda_grid.empty()) parse_lambda_grid(cfg.lambda_grid, options);
    if (cfg.lambda_given) {
        if (cfg.tune_given && options.tune != TuneMethod::fixed) {
            throw input_error("--lambda requires --tune fixed");
        }
        options.tune = TuneMethod::fixed;
        options.fixed_lambda = cfg.fixed_lambda;
    } else if (options.tune == TuneMethod::fixed) {
        throw input_error("--tune fixed requires --lambda");
    }
    if (options.penalty == PenaltyVariant::oracle) {
        std::vector<std::string> labels;
        for (const auto& s : sims) labels.push_back(s.label());
        options.oracle_support = parse_support(cfg.oracle_support, labels);
    } else if (!cfg.oracle_support.empty()) {
        throw input_error("--oracle-support needs --penalty oracle");
    }

    const FitResult result = fit_model(data, sims, options);

    const fs::path out = prepare_output_dir(cfg.out_dir);
    write_fit_result((out / "fit.json").string(), result);
    write_coefficient_table((out / "coefficients.csv").string(), result);

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream log;
    log << "timestamp: " << started << "\n";
    log << "command: fit\n";
    log << "responses: " << cfg.responses << " (n=" << data.n() << ", p=" << data.p()
        << ")\n";
    log << "similarity sources (K=" << sims.size() << "): " << describe_labels(sims)
        << "\n";
    log << "penalty: " << result.penalty << "\n";
    log << "tune: " << result.tune << " (folds=" << result.folds << ", seed="
        << result.seed << ")\n";
    log << "lambda grid: " << result.lambda_grid.size() << " points\n";
    log << "chosen lambda: " << result.chosen_lambda << "\n";
    log << "active coefficients: " << result.active.size() << "\n";
    log << "kkt residual: " << result.kkt_residual << "\n";
    log << "pseudo r2: " << result.pseudo_r2_value << "\n";
    for (const std::string& w : result.warnings) log << "warning: " << w << "\n";
    log << "elapsed seconds: " << seconds << "\n";
    write_text(out / "run_log.txt", log.str());

    std::cout << "fit complete: " << result.active.size() << " of " << result.K
              << " similarity coefficients active, lambda=" << result.chosen_lambda
              << "\n";
    std::cout << "wrote " << (out / "fit.json").string() << ", "
              << (out / "coefficients.csv").string() << ", "
              << (out / "run_log.txt").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct SimulateConfig {
    int n = 100;
    std::uint64_t seed = 0;
    std::string method = "auto";
    int burn_in = 1000;
    int thin = 10;
    // generator mode
    int p = 25;
    int K = 20;
    int K0 = 5;
    double alpha_low = 0.1, alpha_high = 0.3;
    double theta_low = -1.0, theta_high = 0.0;
    int max_degree = 4;
    // parameter mode
    std::string truth_path;
    SourceFlags sources;
    std::string out_dir = ".";
};

int run_simulate(const SimulateConfig& cfg) {
    const std::string started = timestamp_utc();
    const SamplerMethod method = parse_method(cfg.method);
    SamplerConfig sampler{method, cfg.seed, cfg.burn_in, cfg.thin};

    ParameterSet params;
    std::vector<SimilarityMatrix> sims;
    std::vector<int> support;
    bool generator = cfg.truth_path.empty();
    if (generator) {
        ScenarioSpec spec;
        spec.n = cfg.n;
        spec.p = cfg.p;
        spec.K = cfg.K;
        spec.K0 = cfg.K0;
        spec.seed = cfg.seed;
        spec.alpha_low = cfg.alpha_low;
        spec.alpha_high = cfg.alpha_high;
        spec.theta_low = cfg.theta_low;
        spec.theta_high = cfg.theta_high;
        spec.max_degree = cfg.max_degree;
        spec.sampler = sampler;
        const ScenarioTruth truth = generate_truth(spec);
        params = truth.truth.params;
        support = truth.truth.support;
        sims = truth.sims;
    } else {
        std::ifstream in(cfg.truth_path);
        if (!in) throw input_error("cannot open file: " + cfg.truth_path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw input_error(cfg.truth_path + ": not valid JSON: " + e.what());
        }
        try {
            const auto main = j.at("main_effects").get<std::vector<double>>();
            const auto alpha = j.at("alpha").get<std::vector<double>>();
            params.main_effects =
                Eigen::Map<const Eigen::VectorXd>(main.data(), main.size());
            params.alpha = Eigen::Map<const Eigen::VectorXd>(alpha.data(), alpha.size());
        } catch (const json::exception& e) {
            throw input_error(cfg.truth_path +
                              ": expected main_effects and alpha arrays: " + e.what());
        }
        sims = load_sources(cfg.sources, nullptr);
        if (static_cast<int>(sims.size()) != params.K()) {
            throw input_error("truth has " + std::to_string(params.K()) +
                              " alpha coefficients but " + std::to_string(sims.size()) +
                              " similarity sources were given");
        }
    }

    const int p = params.p();
    std::string note;
    if (method == SamplerMethod::automatic && p > kExactEnumerationCap) {
        note = "p=" + std::to_string(p) + " exceeds the exact enumeration cap (" +
               std::to_string(kExactEnumerationCap) + "); routing to the Gibbs sampler";
        std::cout << note << "\n";
    }
    const std::string routed =
        method == SamplerMethod::gibbs ||
                (method == SamplerMethod::automatic && p > kExactEnumerationCap)
            ? "gibbs"
            : "exact";

    BinaryDataset data = sample(cfg.n, params, sims, sampler);
    data.labels.clear();
    for (int j = 0; j < p; ++j) data.labels.push_back("v" + std::to_string(j + 1));

    const fs::path out = prepare_output_dir(cfg.out_dir);
    write_responses_csv((out / "responses.csv").string(), data);

    json truth_json;
    truth_json["schema_version"] = kSchemaVersion;
    truth_json["mode"] = generator ? "generator" : "parameters";
    truth_json["seed"] = cfg.seed;
    truth_json["n"] = cfg.n;
    truth_json["p"] = p;
    truth_json["K"] = params.K();
    truth_json["main_effects"] = std::vector<double>(
        params.main_effects.data(), params.main_effects.data() + params.p());
    truth_json["alpha"] =
        std::vector<double>(params.alpha.data(), params.alpha.data() + params.K());
    if (generator) truth_json["support"] = support;
    std::vector<std::string> labels;
    for (const auto& s : sims) labels.push_back(s.label());
    truth_json["similarity_labels"] = labels;
    truth_json["sampler"] = {{"method", cfg.method}, {"routed", routed},
                             {"burn_in", cfg.burn_in}, {"thin", cfg.thin}};
    write_text(out / "truth.json", truth_json.dump(2) + "\n");

    if (generator) {
        for (const auto& sim : sims) {
            const std::string file = "W_" + sanitize_filename(sim.label()) + ".csv";
            write_matrix_csv((out / file).string(), sim.values(), data.labels);
        }
    }

    std::ostringstream log;
    log << "timestamp: " << started << "\n";
    log << "command: simulate\n";
    log << "mode: " << (generator ? "generator" : "parameters") << "\n";
    log << "n: " << cfg.n << ", p: " << p << ", K: " << params.K() << "\n";
    log << "seed: " << cfg.seed << "\n";
    log << "sampler: requested " << cfg.method << ", used " << routed;
    if (routed == "gibbs") log << " (burn_in=" << cfg.burn_in << ", thin=" << cfg.thin << ")";
    log << "\n";
    if (!note.empty()) log << "note: " << note << "\n";
    write_text(out / "run_log.txt", log.str());

    std::cout << "simulated " << cfg.n << " observations of " << p << " responses ("
              << routed << " sampler)\n";
    std::cout << "wrote " << (out / "responses.csv").string() << " and "
              << (out / "truth.json").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct BenchmarkConfig {
    std::string scenario;
    int replicates = -1;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir = ".";
};

void print_progress(int replicate, int total) {
    std::cerr << "replicate " << replicate << "/" << total << "\n";
}

int run_benchmark_cmd(const BenchmarkConfig& cfg) {
    ScenarioSpec spec = read_scenario_json(cfg.scenario);
    if (cfg.replicates > 0) spec.replicates = cfg.replicates;
    if (cfg.seed_given) spec.seed = cfg.seed;

    const BenchmarkReport report = run_benchmark(spec, &print_progress);

    const fs::path out = prepare_output_dir(cfg.out_dir);
    write_benchmark_csv((out / "report.csv").string(), report);
    write_benchmark_json((out / "report.json").string(), report);

    std::printf("%-14s %5s %18s %18s %7s %7s %12s\n", "estimator", "reps",
                "mse_alpha(x1000)", "mse_theta(x1000)", "tpr", "fpr", "theta_err");
    for (const auto& s : report.summary) {
        std::printf("%-14s %5d %18.3f %18.3f %7.3f ", s.estimator.c_str(), s.replicates,
                    1000.0 * s.mean_mse_alpha, 1000.0 * s.mean_mse_theta, s.mean_tpr);
        if (s.has_fpr) std::printf("%7.3f ", s.mean_fpr);
        else std::printf("%7s ", "-");
        std::printf("%12.4f\n", s.median_theta_error);
    }
    std::printf("total seconds: %.1f\n", report.seconds);
    return 0;
}

// ---------------------------------------------------------------------------

struct CvConfig {
    std::string responses;
    SourceFlags sources;
    std::string penalty = "adaptive";
    int folds = 10;
    std::uint64_t seed = 0;
    std::string lambda_grid;
    std::string out_dir = ".";
};

int run_cv(const CvConfig& cfg) {
    const BinaryDataset data = read_responses_csv(cfg.responses);
    const std::vector<SimilarityMatrix> sims = load_sources(cfg.sources, &data.labels);
    if (sims.empty()) throw input_error("at least one similarity source required");

    const PenaltyVariant penalty = parse_penalty(cfg.penalty);
    if (penalty != PenaltyVariant::adaptive && penalty != PenaltyVariant::lasso) {
        throw input_error("cv requires a penalized variant (adaptive or lasso)");
    }

    const StackedDesign design = build_design(data, sims);
    AdaptiveWeights weights;
    if (penalty == PenaltyVariant::adaptive) {
        const UnregularizedFit pilot = fit_unregularized(design);
        weights = adaptive_weights(pilot.params.alpha);
    } else {
        weights = unit_weights(static_cast<int>(sims.size()));
    }

    FitModelOptions grid_opts;
    if (!cfg.lambda_grid.empty()) parse_lambda_grid(cfg.lambda_grid, grid_opts);
    const double lmax = lambda_max(design, weights);
    const std::vector<double> grid =
        default_lambda_grid(lmax, grid_opts.grid_length, grid_opts.grid_min_ratio);

    const FoldPlan plan = make_fold_plan(data.n(), cfg.folds, cfg.seed);
    const CrossValidationResult cv = cross_validate_design(design, weights, plan, grid);

    const fs::path out = prepare_output_dir(cfg.out_dir);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["penalty"] = cfg.penalty;
    j["folds"] = cfg.folds;
    j["seed"] = cfg.seed;
    j["lambdas"] = cv.lambdas;
    j["mean_score"] = cv.mean_score;
    json scores = json::array();
    for (Eigen::Index f = 0; f < cv.fold_scores.rows(); ++f) {
        json row = json::array();
        for (Eigen::Index l = 0; l < cv.fold_scores.cols(); ++l) {
            if (std::isnan(cv.fold_scores(f, l))) row.push_back(nullptr);
            else row.push_back(cv.fold_scores(f, l));
        }
        scores.push_back(row);
    }
    j["fold_scores"] = scores;
    j["fold_flagged"] = std::vector<bool>(cv.fold_flagged.begin(), cv.fold_flagged.end());
    j["chosen_index"] = cv.chosen_index;
    j["chosen_lambda"] = cv.chosen_lambda;
    j["warnings"] = cv.warnings;
    write_text(out / "cv.json", j.dump(2) + "\n");

    std::ofstream curve(out / "cv_curve.csv");
    if (!curve) throw input_error("cannot write file: " + (out / "cv_curve.csv").string());
    curve << "# schema_version=" << kSchemaVersion << "\n";
    curve << "lambda,mean_score";
    for (Eigen::Index f = 0; f < cv.fold_scores.rows(); ++f) curve << ",fold_" << (f + 1);
    curve << "\n";
    char buf[40];
    for (std::size_t l = 0; l < cv.lambdas.size(); ++l) {
        std::snprintf(buf, sizeof(buf), "%.17g", cv.lambdas[l]);
        curve << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", cv.mean_score[l]);
        curve << "," << buf;
        for (Eigen::Index f = 0; f < cv.fold_scores.rows(); ++f) {
            const double v = cv.fold_scores(f, static_cast<Eigen::Index>(l));
            curve << ",";
            if (!std::isnan(v)) {
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                curve << buf;
            }
        }
        curve << "\n";
    }
    curve.close();

    std::cout << "cv complete: chosen lambda " << cv.chosen_lambda << " (index "
              << cv.chosen_index << " of " << cv.lambdas.size() << ")\n";
    for (const std::string& w : cv.warnings) std::cout << "warning: " << w << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct ExportConfig {
    std::string fit_path;
    SourceFlags sources;
    std::string threshold = "median";
    std::string categories;
    std::string out_dir = ".";
};

int run_export_graph(const ExportConfig& cfg) {
    const FitResult result = read_fit_result(cfg.fit_path);
    const std::vector<SimilarityMatrix> sims =
        load_sources(cfg.sources, &result.response_labels);
    if (sims.empty()) {
        throw input_error(
            "similarity inputs required to reconstruct the interaction matrix");
    }
    if (static_cast<int>(sims.size()) != result.K) {
        throw input_error("fit used " + std::to_string(result.K) +
                          " similarity matrices but " + std::to_string(sims.size()) +
                          " sources were given");
    }
    for (int k = 0; k < result.K; ++k) {
        const std::string& expect = result.similarity_labels[static_cast<std::size_t>(k)];
        if (sims[static_cast<std::size_t>(k)].label() != expect) {
            throw input_error("similarity source " + std::to_string(k + 1) + " is '" +
                              sims[static_cast<std::size_t>(k)].label() +
                              "' but the fit expects '" + expect +
                              "' (pass NAME=PATH to relabel)");
        }
    }

    const ParameterSet params{result.main_effects, result.alpha};
    const Eigen::MatrixXd theta = assemble_theta(params, sims);

    GraphExportOptions options;
    if (cfg.threshold == "median") {
        options.policy = ThresholdPolicy::median;
    } else if (cfg.threshold == "none") {
        options.policy = ThresholdPolicy::none;
    } else {
        options.policy = ThresholdPolicy::value;
        try {
            std::size_t used = 0;
            options.value = std::stod(cfg.threshold, &used);
            if (used != cfg.threshold.size()) throw std::invalid_argument(cfg.threshold);
        } catch (const std::exception&) {
            throw input_error("--threshold expects median, none, or a number, got '" +
                              cfg.threshold + "'");
        }
    }
    if (!cfg.categories.empty()) options.node_categories = read_category_csv(cfg.categories);

    const fs::path out = prepare_output_dir(cfg.out_dir);
    export_graph_dot((out / "graph.dot").string(), theta, result.response_labels, options);
    std::cout << "wrote " << (out / "graph.dot").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct SimilarityBuildConfig {
    SourceFlags sources;
    std::string out_dir = ".";
};

int run_similarity_build(const SimilarityBuildConfig& cfg) {
    if (cfg.sources.attributes.empty() && cfg.sources.edge_lists.empty()) {
        throw input_error("similarity build needs --attributes and/or --edge-list inputs");
    }
    const std::vector<SimilarityMatrix> sims = load_sources(cfg.sources, nullptr);

    // Entity labels for matrix headers come from the attribute table when given.
    std::vector<std::string> entities;
    if (!cfg.sources.attributes.empty()) {
        entities =
            read_attribute_table(cfg.sources.attributes, cfg.sources.schema).entities;
    }

    const fs::path out = prepare_output_dir(cfg.out_dir);
    json manifest;
    manifest["schema_version"] = kSchemaVersion;
    json items = json::array();
    for (const auto& sim : sims) {
        const std::string file = "W_" + sanitize_filename(sim.label()) + ".csv";
        write_matrix_csv((out / file).string(), sim.values(), entities);
        const SimilarityDiagnostics diag = validate(sim);
        items.push_back({{"label", sim.label()},
                         {"kind", kind_name(sim.kind())},
                         {"file", file},
                         {"dim", sim.dim()},
                         {"one_norm", diag.one_norm},
                         {"min_entry", diag.min_entry},
                         {"max_entry", diag.max_entry}});
        std::cout << "wrote " << (out / file).string() << " (" << kind_name(sim.kind())
                  << ", one-norm " << diag.one_norm << ")\n";
    }
    manifest["matrices"] = items;
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << (out / "manifest.json").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ising similarity regression: simulation, fitting, and graph export"};
    app.set_version_flag("--version", "isingsim 0.1.0");
    app.require_subcommand(1);

    FitConfig fit_cfg;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit the model to binary responses");
    fit_cmd->add_option("--responses", fit_cfg.responses, "Binary response CSV (n x p)")
        ->required();
    add_source_flags(fit_cmd, fit_cfg.sources);
    fit_cmd->add_option("--penalty", fit_cfg.penalty,
                        "Penalty variant: adaptive, lasso, none, oracle");
    fit_cmd->add_option("--tune", fit_cfg.tune, "Tuning method: cv, aic, bic, fixed");
    fit_cmd->add_option("--folds", fit_cfg.folds, "Cross-validation fold count");
    fit_cmd->add_option("--seed", fit_cfg.seed, "Fold assignment seed");
    fit_cmd->add_option("--lambda-grid", fit_cfg.lambda_grid,
                        "Penalty grid as LEN or LEN,RATIO");
    CLI::Option* lambda_opt =
        fit_cmd->add_option("--lambda", fit_cfg.fixed_lambda, "Fixed penalty level");
    fit_cmd->add_option("--oracle-support", fit_cfg.oracle_support,
                        "Comma-separated support (labels or 1-based indices) for oracle");
    fit_cmd->add_option("-o,--output-dir", fit_cfg.out_dir, "Output directory");

    SimulateConfig sim_cfg;
    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "Draw binary samples from the model");
    sim_cmd->add_option("-n,--n", sim_cfg.n, "Number of observations");
    sim_cmd->add_option("--seed", sim_cfg.seed, "Random seed");
    sim_cmd->add_option("--method", sim_cfg.method, "Sampler: auto, exact, gibbs");
    sim_cmd->add_option("--burn-in", sim_cfg.burn_in, "Gibbs burn-in sweeps");
    sim_cmd->add_option("--thin", sim_cfg.thin, "Gibbs sweeps before the retained draw");
    sim_cmd->add_option("--p", sim_cfg.p, "Response dimension (generator mode)");
    sim_cmd->add_option("--k", sim_cfg.K, "Similarity matrix count (generator mode)");
    sim_cmd->add_option("--k0", sim_cfg.K0, "Nonzero coefficient count (generator mode)");
    sim_cmd->add_option("--alpha-low", sim_cfg.alpha_low, "Coefficient magnitude lower bound");
    sim_cmd->add_option("--alpha-high", sim_cfg.alpha_high, "Coefficient magnitude upper bound");
    sim_cmd->add_option("--theta-low", sim_cfg.theta_low, "Main effect lower bound");
    sim_cmd->add_option("--theta-high", sim_cfg.theta_high, "Main effect upper bound");
    sim_cmd->add_option("--max-degree", sim_cfg.max_degree,
                        "Similarity row-sum bound (generator mode)");
    sim_cmd->add_option("--truth", sim_cfg.truth_path,
                        "Parameter JSON (main_effects, alpha); needs similarity sources");
    add_source_flags(sim_cmd, sim_cfg.sources);
    sim_cmd->add_option("-o,--output-dir", sim_cfg.out_dir, "Output directory");

    BenchmarkConfig bench_cfg;
    CLI::App* bench_cmd =
        app.add_subcommand("benchmark", "Run a Monte Carlo estimator comparison");
    bench_cmd->add_option("--scenario", bench_cfg.scenario, "Scenario JSON")->required();
    bench_cmd->add_option("--replicates", bench_cfg.replicates, "Override replicate count");
    CLI::Option* bench_seed =
        bench_cmd->add_option("--seed", bench_cfg.seed, "Override scenario seed");
    bench_cmd->add_option("-o,--output-dir", bench_cfg.out_dir, "Output directory");

    CvConfig cv_cfg;
    CLI::App* cv_cmd =
        app.add_subcommand("cv", "Cross-validate the penalty level without fitting");
    cv_cmd->add_option("--responses", cv_cfg.responses, "Binary response CSV")->required();
    add_source_flags(cv_cmd, cv_cfg.sources);
    cv_cmd->add_option("--penalty", cv_cfg.penalty, "Penalty variant: adaptive or lasso");
    cv_cmd->add_option("--folds", cv_cfg.folds, "Fold count");
    cv_cmd->add_option("--seed", cv_cfg.seed, "Fold assignment seed");
    cv_cmd->add_option("--lambda-grid", cv_cfg.lambda_grid, "Grid as LEN or LEN,RATIO");
    cv_cmd->add_option("-o,--output-dir", cv_cfg.out_dir, "Output directory");

    ExportConfig export_cfg;
    CLI::App* export_cmd =
        app.add_subcommand("export-graph", "Write the fitted dependence graph as DOT");
    export_cmd->add_option("--fit", export_cfg.fit_path, "fit.json from the fit command")
        ->required();
    add_source_flags(export_cmd, export_cfg.sources);
    export_cmd->add_option("--threshold", export_cfg.threshold,
                           "Edge threshold: median, none, or a number");
    export_cmd->add_option("--categories", export_cfg.categories,
                           "CSV mapping entity label to category (node colors)");
    export_cmd->add_option("-o,--output-dir", export_cfg.out_dir, "Output directory");

    SimilarityBuildConfig build_cfg;
    CLI::App* similarity_cmd =
        app.add_subcommand("similarity", "Similarity matrix utilities");
    similarity_cmd->require_subcommand(1);
    CLI::App* build_cmd = similarity_cmd->add_subcommand(
        "build", "Build similarity matrices from attributes and edge lists");
    add_source_flags(build_cmd, build_cfg.sources);
    build_cmd->add_option("-o,--output-dir", build_cfg.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fit_cmd->parsed()) {
            fit_cfg.lambda_given = lambda_opt->count() > 0;
            fit_cfg.tune_given = fit_cmd->count("--tune") > 0;
            return run_fit(fit_cfg);
        }
        if (sim_cmd->parsed()) return run_simulate(sim_cfg);
        if (bench_cmd->parsed()) {
            bench_cfg.seed_given = bench_seed->count() > 0;
            return run_benchmark_cmd(bench_cfg);
        }
        if (cv_cmd->parsed()) return run_cv(cv_cfg);
        if (export_cmd->parsed()) return run_export_graph(export_cfg);
        if (similarity_cmd->parsed() && build_cmd->parsed()) {
            return run_similarity_build(build_cfg);
        }
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
