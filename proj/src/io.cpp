#include "isingsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "isingsim/errors.hpp"
#include "json.hpp"

namespace isingsim {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string strip_cr(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
    return s;
}

struct CsvLine {
    int number = 0;  // 1-based line number in the file
    std::vector<std::string> fields;
};

std::vector<std::string> parse_csv_fields(const std::string& line, const std::string& path,
                                          int lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty()) {
                throw input_error(path + ": line " + std::to_string(lineno) +
                                  ": unexpected quote mid-field");
            }
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) {
        throw input_error(path + ": line " + std::to_string(lineno) +
                          ": unterminated quoted field");
    }
    fields.push_back(cur);
    return fields;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

// All non-comment, non-empty lines of a CSV file, with line numbers.
std::vector<CsvLine> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    std::vector<CsvLine> lines;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        raw = strip_cr(raw);
        if (raw.empty() || raw[0] == '#') continue;
        lines.push_back({lineno, parse_csv_fields(raw, path, lineno)});
    }
    return lines;
}

double parse_double(const std::string& s, const std::string& path, int lineno, int col) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw input_error(path + ": line " + std::to_string(lineno) + ", column " +
                          std::to_string(col + 1) + ": not a number: '" + s + "'");
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path);
    return out;
}

json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd json_to_vec(const json& a, const std::string& what) {
    if (!a.is_array()) throw input_error("fit result field '" + what + "' must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    }
    return v;
}

json intervals_to_json(const std::vector<WaldInterval>& iv) {
    json a = json::array();
    for (const auto& w : iv) {
        a.push_back({{"estimate", w.estimate}, {"se", w.se}, {"lower", w.lower},
                     {"upper", w.upper}});
    }
    return a;
}

std::vector<WaldInterval> json_to_intervals(const json& a) {
    std::vector<WaldInterval> out;
    for (const auto& e : a) {
        out.push_back(WaldInterval{e.at("estimate").get<double>(), e.at("se").get<double>(),
                                   e.at("lower").get<double>(), e.at("upper").get<double>()});
    }
    return out;
}

}  // namespace

BinaryDataset read_responses_csv(const std::string& path) {
    const std::vector<CsvLine> lines = read_csv(path);
    if (lines.size() < 2) {
        throw input_error(path + ": expected a header row and at least one data row");
    }
    BinaryDataset data;
    data.labels = lines.front().fields;
    const int p = static_cast<int>(data.labels.size());
    const int n = static_cast<int>(lines.size()) - 1;
    data.y.resize(n, p);
    for (int i = 0; i < n; ++i) {
        const CsvLine& line = lines[static_cast<std::size_t>(i) + 1];
        if (static_cast<int>(line.fields.size()) != p) {
            throw input_error(path + ": line " + std::to_string(line.number) + ": expected " +
                              std::to_string(p) + " fields, got " +
                              std::to_string(line.fields.size()));
        }
        for (int j = 0; j < p; ++j) {
            const std::string& f = line.fields[static_cast<std::size_t>(j)];
            if (f == "0") {
                data.y(i, j) = 0;
            } else if (f == "1") {
                data.y(i, j) = 1;
            } else {
                throw input_error(path + ": line " + std::to_string(line.number) +
                                  ", column " + std::to_string(j + 1) +
                                  ": entry must be 0 or 1, got '" + f + "'");
            }
        }
    }
    return data;
}

void write_responses_csv(const std::string& path, const BinaryDataset& data) {
    auto out = open_out(path);
    out << "# schema_version=" << kSchemaVersion << "\n";
    const int p = data.p();
    for (int j = 0; j < p; ++j) {
        if (j) out << ",";
        out << csv_escape(data.labels.empty() ? "v" + std::to_string(j + 1)
                                              : data.labels[static_cast<std::size_t>(j)]);
    }
    out << "\n";
    for (int i = 0; i < data.n(); ++i) {
        for (int j = 0; j < p; ++j) {
            if (j) out << ",";
            out << static_cast<int>(data.y(i, j));
        }
        out << "\n";
    }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path, std::vector<std::string>* labels) {
    const std::vector<CsvLine> lines = read_csv(path);
    if (lines.size() < 2) {
        throw input_error(path + ": expected a header row and at least one data row");
    }
    const int p = static_cast<int>(lines.front().fields.size());
    if (static_cast<int>(lines.size()) - 1 != p) {
        throw input_error(path + ": matrix is not square: " + std::to_string(p) +
                          " columns, " + std::to_string(lines.size() - 1) + " rows");
    }
    if (labels != nullptr) *labels = lines.front().fields;
    Eigen::MatrixXd m(p, p);
    for (int i = 0; i < p; ++i) {
        const CsvLine& line = lines[static_cast<std::size_t>(i) + 1];
        if (static_cast<int>(line.fields.size()) != p) {
            throw input_error(path + ": line " + std::to_string(line.number) + ": expected " +
                              std::to_string(p) + " fields, got " +
                              std::to_string(line.fields.size()));
        }
        for (int j = 0; j < p; ++j) {
            m(i, j) = parse_double(line.fields[static_cast<std::size_t>(j)], path,
                                   line.number, j);
        }
    }
    return m;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& labels) {
    auto out = open_out(path);
    out << "# schema_version=" << kSchemaVersion << "\n";
    const int p = static_cast<int>(m.rows());
    for (int j = 0; j < p; ++j) {
        if (j) out << ",";
        out << csv_escape(labels.empty() ? "v" + std::to_string(j + 1)
                                         : labels[static_cast<std::size_t>(j)]);
    }
    out << "\n";
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (j) out << ",";
            out << fmt(m(i, j));
        }
        out << "\n";
    }
}

SimilarityMatrix read_similarity_csv(const std::string& path, const std::string& label) {
    const Eigen::MatrixXd m = read_matrix_csv(path, nullptr);
    try {
        return SimilarityMatrix(m, label, SimilarityKind::raw);
    } catch (const input_error& e) {
        throw input_error(path + ": " + e.what());
    }
}

AttributeTable read_attribute_table(const std::string& path, const std::string& schema_path) {
    // Sidecar schema: one "column,kind" row per attribute column.
    std::map<std::string, std::string> kinds;
    for (const CsvLine& line : read_csv(schema_path)) {
        if (line.fields.size() != 2) {
            throw input_error(schema_path + ": line " + std::to_string(line.number) +
                              ": expected 'column,kind'");
        }
        const std::string& kind = line.fields[1];
        if (kind != "quantitative" && kind != "qualitative" &&
            (line.fields[0] != "column" || kind != "kind")) {  // tolerate a header row
            throw input_error(schema_path + ": line " + std::to_string(line.number) +
                              ": kind must be quantitative or qualitative, got '" + kind + "'");
        }
        if (kind == "quantitative" || kind == "qualitative") {
            kinds[line.fields[0]] = kind;
        }
    }

    const std::vector<CsvLine> lines = read_csv(path);
    if (lines.size() < 2) {
        throw input_error(path + ": expected a header row and at least one data row");
    }
    const std::vector<std::string>& header = lines.front().fields;
    if (header.size() < 2) {
        throw input_error(path + ": expected an entity column plus attribute columns");
    }

    AttributeTable table;
    const int cols = static_cast<int>(header.size());
    const int p = static_cast<int>(lines.size()) - 1;
    std::vector<std::vector<std::string>> raw(static_cast<std::size_t>(cols));
    for (int i = 0; i < p; ++i) {
        const CsvLine& line = lines[static_cast<std::size_t>(i) + 1];
        if (static_cast<int>(line.fields.size()) != cols) {
            throw input_error(path + ": line " + std::to_string(line.number) + ": expected " +
                              std::to_string(cols) + " fields, got " +
                              std::to_string(line.fields.size()));
        }
        for (int c = 0; c < cols; ++c) {
            raw[static_cast<std::size_t>(c)].push_back(line.fields[static_cast<std::size_t>(c)]);
        }
    }
    table.entities = raw[0];

    for (int c = 1; c < cols; ++c) {
        const std::string& name = header[static_cast<std::size_t>(c)];
        const auto it = kinds.find(name);
        if (it == kinds.end()) {
            throw input_error(schema_path + ": no kind declared for column '" + name + "'");
        }
        if (it->second == "quantitative") {
            QuantitativeAttribute attr;
            attr.name = name;
            for (int i = 0; i < p; ++i) {
                const std::string& f = raw[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
                if (f.empty()) {
                    throw input_error(path + ": line " +
                                      std::to_string(lines[static_cast<std::size_t>(i) + 1].number) +
                                      ", column " + std::to_string(c + 1) +
                                      ": missing value in '" + name + "'");
                }
                attr.values.push_back(parse_double(
                    f, path, lines[static_cast<std::size_t>(i) + 1].number, c));
            }
            table.quantitative.push_back(std::move(attr));
        } else {
            QualitativeAttribute attr;
            attr.name = name;
            for (int i = 0; i < p; ++i) {
                const std::string& f = raw[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
                if (f.empty()) {
                    throw input_error(path + ": line " +
                                      std::to_string(lines[static_cast<std::size_t>(i) + 1].number) +
                                      ", column " + std::to_string(c + 1) +
                                      ": missing value in '" + name + "'");
                }
                attr.categories.push_back(f);
            }
            table.qualitative.push_back(std::move(attr));
        }
    }
    return table;
}

AdjacencyAttribute read_edge_list(const std::string& path,
                                  const std::vector<std::string>& entities,
                                  const std::string& name) {
    std::map<std::string, int> index;
    for (int j = 0; j < static_cast<int>(entities.size()); ++j) {
        index[entities[static_cast<std::size_t>(j)]] = j;
    }
    AdjacencyAttribute attr;
    attr.name = name;
    attr.dim = static_cast<int>(entities.size());
    const std::vector<CsvLine> lines = read_csv(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const CsvLine& line = lines[i];
        if (line.fields.size() != 2) {
            throw input_error(path + ": line " + std::to_string(line.number) +
                              ": expected two label fields");
        }
        if (i == 0 && !index.count(line.fields[0]) && !index.count(line.fields[1])) {
            continue;  // header row
        }
        for (int c = 0; c < 2; ++c) {
            if (!index.count(line.fields[static_cast<std::size_t>(c)])) {
                throw input_error(path + ": line " + std::to_string(line.number) +
                                  ", column " + std::to_string(c + 1) + ": unknown entity '" +
                                  line.fields[static_cast<std::size_t>(c)] + "'");
            }
        }
        attr.edges.emplace_back(index[line.fields[0]], index[line.fields[1]]);
    }
    return attr;
}

std::string fit_result_to_json(const FitResult& r) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["model"] = {{"n", r.n}, {"p", r.p}, {"K", r.K},
                  {"similarity_labels", r.similarity_labels},
                  {"response_labels", r.response_labels}};
    j["config"] = {{"penalty", r.penalty}, {"tune", r.tune}, {"folds", r.folds},
                   {"seed", r.seed}, {"lambda_grid", r.lambda_grid},
                   {"grad_tol", r.grad_tol}, {"obj_rel_tol", r.obj_rel_tol},
                   {"kkt_tol", r.kkt_tol}, {"max_cycles", r.max_cycles},
                   {"standardize_columns", false}};
    j["selection"] = {{"chosen_lambda", r.chosen_lambda}, {"chosen_index", r.chosen_index},
                      {"active", r.active}};
    j["estimates"] = {{"main_effects", vec_to_json(r.main_effects)},
                      {"alpha", vec_to_json(r.alpha)}};
    j["inference"] = {{"refit_main", vec_to_json(r.refit_main)},
                      {"refit_alpha", vec_to_json(r.refit_alpha)},
                      {"se_alpha", vec_to_json(r.se_alpha)},
                      {"alpha_intervals", intervals_to_json(r.alpha_intervals)},
                      {"se_main", vec_to_json(r.se_main)},
                      {"main_intervals", intervals_to_json(r.main_intervals)}};
    json cv_scores = json::array();
    for (Eigen::Index f = 0; f < r.cv_fold_scores.rows(); ++f) {
        json row = json::array();
        for (Eigen::Index l = 0; l < r.cv_fold_scores.cols(); ++l) {
            const double v = r.cv_fold_scores(f, l);
            if (std::isnan(v)) row.push_back(nullptr);
            else row.push_back(v);
        }
        cv_scores.push_back(row);
    }
    std::vector<bool> flagged(r.cv_fold_flagged.begin(), r.cv_fold_flagged.end());
    j["tuning"] = {{"cv_mean_score", r.cv_mean_score}, {"cv_fold_scores", cv_scores},
                   {"cv_fold_flagged", flagged}, {"ic_values", r.ic_values},
                   {"ic_df", r.ic_df}};
    j["diagnostics"] = {{"kkt_residual", r.kkt_residual},
                        {"fit_log_pl_sum", r.fit_log_pl_sum},
                        {"null_log_pl_sum", r.null_log_pl_sum},
                        {"pseudo_r2", r.pseudo_r2_value},
                        {"pilot_converged", r.pilot_converged},
                        {"pilot_separation", r.pilot_separation},
                        {"refit_converged", r.refit_converged},
                        {"warnings", r.warnings}};
    return j.dump(2) + "\n";
}

FitResult fit_result_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("fit result is not valid JSON: ") + e.what());
    }
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != kSchemaVersion) {
        throw input_error("fit result has missing or unsupported schema_version");
    }
    FitResult r;
    try {
        const json& model = j.at("model");
        r.n = model.at("n").get<int>();
        r.p = model.at("p").get<int>();
        r.K = model.at("K").get<int>();
        r.similarity_labels = model.at("similarity_labels").get<std::vector<std::string>>();
        r.response_labels = model.at("response_labels").get<std::vector<std::string>>();
        const json& config = j.at("config");
        r.penalty = config.at("penalty").get<std::string>();
        r.tune = config.at("tune").get<std::string>();
        r.folds = config.at("folds").get<int>();
        r.seed = config.at("seed").get<std::uint64_t>();
        r.lambda_grid = config.at("lambda_grid").get<std::vector<double>>();
        r.grad_tol = config.at("grad_tol").get<double>();
        r.obj_rel_tol = config.at("obj_rel_tol").get<double>();
        r.kkt_tol = config.at("kkt_tol").get<double>();
        r.max_cycles = config.at("max_cycles").get<int>();
        const json& sel = j.at("selection");
        r.chosen_lambda = sel.at("chosen_lambda").get<double>();
        r.chosen_index = sel.at("chosen_index").get<int>();
        r.active = sel.at("active").get<std::vector<int>>();
        const json& est = j.at("estimates");
        r.main_effects = json_to_vec(est.at("main_effects"), "main_effects");
        r.alpha = json_to_vec(est.at("alpha"), "alpha");
        const json& inf = j.at("inference");
        r.refit_main = json_to_vec(inf.at("refit_main"), "refit_main");
        r.refit_alpha = json_to_vec(inf.at("refit_alpha"), "refit_alpha");
        r.se_alpha = json_to_vec(inf.at("se_alpha"), "se_alpha");
        r.alpha_intervals = json_to_intervals(inf.at("alpha_intervals"));
        r.se_main = json_to_vec(inf.at("se_main"), "se_main");
        r.main_intervals = json_to_intervals(inf.at("main_intervals"));
        const json& tuning = j.at("tuning");
        r.cv_mean_score = tuning.at("cv_mean_score").get<std::vector<double>>();
        const json& scores = tuning.at("cv_fold_scores");
        if (!scores.empty()) {
            r.cv_fold_scores.resize(static_cast<Eigen::Index>(scores.size()),
                                    static_cast<Eigen::Index>(scores[0].size()));
            for (std::size_t f = 0; f < scores.size(); ++f) {
                for (std::size_t l = 0; l < scores[f].size(); ++l) {
                    r.cv_fold_scores(static_cast<Eigen::Index>(f),
                                     static_cast<Eigen::Index>(l)) =
                        scores[f][l].is_null() ? std::numeric_limits<double>::quiet_NaN()
                                               : scores[f][l].get<double>();
                }
            }
        }
        for (bool b : tuning.at("cv_fold_flagged").get<std::vector<bool>>()) {
            r.cv_fold_flagged.push_back(b ? 1 : 0);
        }
        r.ic_values = tuning.at("ic_values").get<std::vector<double>>();
        r.ic_df = tuning.at("ic_df").get<std::vector<int>>();
        const json& diag = j.at("diagnostics");
        r.kkt_residual = diag.at("kkt_residual").get<double>();
        r.fit_log_pl_sum = diag.at("fit_log_pl_sum").get<double>();
        r.null_log_pl_sum = diag.at("null_log_pl_sum").get<double>();
        r.pseudo_r2_value = diag.at("pseudo_r2").get<double>();
        r.pilot_converged = diag.at("pilot_converged").get<bool>();
        r.pilot_separation = diag.at("pilot_separation").get<bool>();
        r.refit_converged = diag.at("refit_converged").get<bool>();
        r.warnings = diag.at("warnings").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw input_error(std::string("fit result JSON is malformed: ") + e.what());
    }
    return r;
}

void write_fit_result(const std::string& path, const FitResult& result) {
    auto out = open_out(path);
    out << fit_result_to_json(result);
}

FitResult read_fit_result(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fit_result_from_json(ss.str());
}

void write_coefficient_table(const std::string& path, const FitResult& result) {
    auto out = open_out(path);
    out << "# schema_version=" << kSchemaVersion << "\n";
    out << "coefficient,estimate,se,lower,upper,active\n";
    std::map<int, std::size_t> pos;
    for (std::size_t c = 0; c < result.active.size(); ++c) {
        pos[result.active[c]] = c;
    }
    for (int k = 0; k < result.K; ++k) {
        const std::string label =
            k < static_cast<int>(result.similarity_labels.size())
                ? result.similarity_labels[static_cast<std::size_t>(k)]
                : "w" + std::to_string(k + 1);
        out << csv_escape(label) << ",";
        const auto it = pos.find(k);
        if (it != pos.end()) {
            const WaldInterval& iv = result.alpha_intervals[it->second];
            out << fmt(iv.estimate) << "," << fmt(iv.se) << "," << fmt(iv.lower) << ","
                << fmt(iv.upper) << ",1\n";
        } else {
            out << "0,,,,0\n";
        }
    }
}

std::map<std::string, std::string> read_category_csv(const std::string& path) {
    std::map<std::string, std::string> out;
    const std::vector<CsvLine> lines = read_csv(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const CsvLine& line = lines[i];
        if (line.fields.size() != 2) {
            throw input_error(path + ": line " + std::to_string(line.number) +
                              ": expected 'entity,category'");
        }
        if (i == 0 && line.fields[0] == "entity" && line.fields[1] == "category") continue;
        out[line.fields[0]] = line.fields[1];
    }
    return out;
}

double median_offdiagonal(const Eigen::MatrixXd& theta) {
    if (theta.rows() != theta.cols() || theta.rows() < 2) {
        throw input_error("median threshold needs a square matrix with p >= 2");
    }
    std::vector<double> vals;
    const int p = static_cast<int>(theta.rows());
    vals.reserve(static_cast<std::size_t>(p) * (p - 1) / 2);
    for (int j = 0; j < p; ++j) {
        for (int k = j + 1; k < p; ++k) vals.push_back(theta(j, k));
    }
    std::sort(vals.begin(), vals.end());
    const std::size_t m = vals.size();
    return m % 2 == 1 ? vals[m / 2] : 0.5 * (vals[m / 2 - 1] + vals[m / 2]);
}

void export_graph_dot(const std::string& path, const Eigen::MatrixXd& theta,
                      const std::vector<std::string>& labels,
                      const GraphExportOptions& options) {
    if (theta.rows() != theta.cols()) {
        throw input_error("graph export needs a square interaction matrix");
    }
    const int p = static_cast<int>(theta.rows());
    if (!labels.empty() && static_cast<int>(labels.size()) != p) {
        throw input_error("graph export label count does not match matrix dimension");
    }

    double threshold;
    std::string policy_name;
    switch (options.policy) {
        case ThresholdPolicy::median:
            threshold = median_offdiagonal(theta);
            policy_name = "median";
            break;
        case ThresholdPolicy::none:
            threshold = -std::numeric_limits<double>::infinity();
            policy_name = "none";
            break;
        case ThresholdPolicy::value:
            threshold = options.value;
            policy_name = "value";
            break;
        default:
            throw input_error("unknown threshold policy");
    }

    auto name_of = [&](int j) {
        return labels.empty() ? "v" + std::to_string(j + 1)
                              : labels[static_cast<std::size_t>(j)];
    };
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        out += "\"";
        return out;
    };

    // Stable category -> color assignment in first-appearance order.
    static const char* palette[] = {"#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3",
                                    "#a6d854", "#ffd92f", "#e5c494", "#b3b3b3"};
    std::map<std::string, std::string> color_of;
    for (int j = 0; j < p; ++j) {
        const auto it = options.node_categories.find(name_of(j));
        if (it == options.node_categories.end()) continue;
        if (!color_of.count(it->second)) {
            color_of[it->second] = palette[color_of.size() % 8];
        }
    }

    double max_abs = 0.0;
    for (int j = 0; j < p; ++j) {
        for (int k = j + 1; k < p; ++k) {
            if (theta(j, k) > threshold) max_abs = std::max(max_abs, std::abs(theta(j, k)));
        }
    }

    auto out = open_out(path);
    out << "// schema_version=" << kSchemaVersion << "\n";
    out << "// threshold_policy=" << policy_name << " threshold=" << fmt(threshold) << "\n";
    out << "graph dependence {\n";
    out << "  graph [threshold=" << quote(fmt(threshold)) << ", outputorder=edgesfirst];\n";
    out << "  node [shape=circle, style=filled, fillcolor=\"#dddddd\"];\n";
    for (int j = 0; j < p; ++j) {
        out << "  " << quote(name_of(j));
        const auto it = options.node_categories.find(name_of(j));
        if (it != options.node_categories.end()) {
            out << " [category=" << quote(it->second) << ", fillcolor="
                << quote(color_of[it->second]) << "]";
        }
        out << ";\n";
    }
    for (int j = 0; j < p; ++j) {
        for (int k = j + 1; k < p; ++k) {
            const double v = theta(j, k);
            if (!(v > threshold)) continue;
            const double width = max_abs > 0.0 ? 0.5 + 2.5 * std::abs(v) / max_abs : 1.0;
            out << "  " << quote(name_of(j)) << " -- " << quote(name_of(k)) << " [weight="
                << quote(fmt(v)) << ", penwidth=" << fmt(width) << "];\n";
        }
    }
    out << "}\n";
}

void write_benchmark_csv(const std::string& path, const BenchmarkReport& report) {
    auto out = open_out(path);
    out << "# schema_version=" << kSchemaVersion << "\n";
    out << "# scenario=" << report.spec.name << " seed=" << report.spec.seed << "\n";
    out << "replicate,estimator,mse_alpha_x1000,mse_theta_x1000,sse_alpha,sse_theta,"
           "tpr,fpr,theta_error,chosen_lambda,active_size,converged,dataset_hash,seconds\n";
    for (const auto& r : report.rows) {
        out << r.replicate << "," << csv_escape(r.estimator) << ","
            << fmt(1000.0 * r.mse_alpha) << "," << fmt(1000.0 * r.mse_theta) << ","
            << fmt(r.mse_alpha * report.spec.K) << ","
            << fmt(r.mse_theta * report.spec.p) << "," << fmt(r.tpr) << ",";
        if (r.has_fpr) out << fmt(r.fpr);
        out << "," << fmt(r.theta_error) << "," << fmt(r.chosen_lambda) << ","
            << r.active_size << "," << (r.converged ? 1 : 0) << "," << r.dataset_hash << ","
            << fmt(r.seconds) << "\n";
    }
}

namespace {

json spec_to_json(const ScenarioSpec& spec) {
    json sampler = {{"method", spec.sampler.method == SamplerMethod::exact   ? "exact"
                               : spec.sampler.method == SamplerMethod::gibbs ? "gibbs"
                                                                             : "auto"},
                    {"burn_in", spec.sampler.burn_in},
                    {"thin", spec.sampler.thin}};
    return json{{"name", spec.name}, {"n", spec.n}, {"p", spec.p}, {"K", spec.K},
                {"K0", spec.K0}, {"replicates", spec.replicates}, {"seed", spec.seed},
                {"alpha_low", spec.alpha_low}, {"alpha_high", spec.alpha_high},
                {"theta_low", spec.theta_low}, {"theta_high", spec.theta_high},
                {"max_degree", spec.max_degree}, {"sampler", sampler},
                {"estimators", spec.estimators}, {"folds", spec.folds},
                {"grid_length", spec.grid_length}, {"grid_min_ratio", spec.grid_min_ratio},
                {"theta_baseline", spec.theta_baseline}};
}

}  // namespace

void write_benchmark_json(const std::string& path, const BenchmarkReport& report) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["scenario"] = spec_to_json(report.spec);
    j["theta_error_norm"] = "frobenius_offdiagonal";
    j["seconds"] = report.seconds;
    json summary = json::array();
    for (const auto& s : report.summary) {
        json row = {{"estimator", s.estimator}, {"replicates", s.replicates},
                    {"mean_mse_alpha_x1000", 1000.0 * s.mean_mse_alpha},
                    {"mean_mse_theta_x1000", 1000.0 * s.mean_mse_theta},
                    {"mean_sse_alpha", s.mean_mse_alpha * report.spec.K},
                    {"mean_sse_theta", s.mean_mse_theta * report.spec.p},
                    {"mean_tpr", s.mean_tpr},
                    {"mean_theta_error", s.mean_theta_error},
                    {"median_theta_error", s.median_theta_error}};
        if (s.has_fpr) row["mean_fpr"] = s.mean_fpr;
        summary.push_back(row);
    }
    j["summary"] = summary;
    json rows = json::array();
    for (const auto& r : report.rows) {
        json row = {{"replicate", r.replicate}, {"estimator", r.estimator},
                    {"mse_alpha", r.mse_alpha}, {"mse_theta", r.mse_theta},
                    {"tpr", r.tpr}, {"theta_error", r.theta_error},
                    {"chosen_lambda", r.chosen_lambda}, {"active_size", r.active_size},
                    {"converged", r.converged}, {"dataset_hash", r.dataset_hash},
                    {"seconds", r.seconds}};
        if (r.has_fpr) row["fpr"] = r.fpr;
        rows.push_back(row);
    }
    j["replicate_rows"] = rows;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

ScenarioSpec read_scenario_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw input_error(path + ": not valid JSON: " + e.what());
    }
    static const std::set<std::string> known = {
        "name", "n", "p", "K", "K0", "replicates", "seed", "alpha_low", "alpha_high",
        "theta_low", "theta_high", "max_degree", "sampler", "estimators", "folds",
        "grid_length", "grid_min_ratio", "theta_baseline"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) {
            throw input_error(path + ": unknown scenario key '" + key + "'");
        }
    }
    ScenarioSpec spec;
    try {
        if (j.contains("name")) spec.name = j["name"].get<std::string>();
        if (j.contains("n")) spec.n = j["n"].get<int>();
        if (j.contains("p")) spec.p = j["p"].get<int>();
        if (j.contains("K")) spec.K = j["K"].get<int>();
        if (j.contains("K0")) spec.K0 = j["K0"].get<int>();
        if (j.contains("replicates")) spec.replicates = j["replicates"].get<int>();
        if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("alpha_low")) spec.alpha_low = j["alpha_low"].get<double>();
        if (j.contains("alpha_high")) spec.alpha_high = j["alpha_high"].get<double>();
        if (j.contains("theta_low")) spec.theta_low = j["theta_low"].get<double>();
        if (j.contains("theta_high")) spec.theta_high = j["theta_high"].get<double>();
        if (j.contains("max_degree")) spec.max_degree = j["max_degree"].get<int>();
        if (j.contains("sampler")) {
            const json& s = j["sampler"];
            if (s.contains("method")) {
                const std::string m = s["method"].get<std::string>();
                if (m == "exact") spec.sampler.method = SamplerMethod::exact;
                else if (m == "gibbs") spec.sampler.method = SamplerMethod::gibbs;
                else if (m == "auto") spec.sampler.method = SamplerMethod::automatic;
                else throw input_error(path + ": unknown sampler method '" + m + "'");
            }
            if (s.contains("burn_in")) spec.sampler.burn_in = s["burn_in"].get<int>();
            if (s.contains("thin")) spec.sampler.thin = s["thin"].get<int>();
        }
        if (j.contains("estimators")) {
            spec.estimators = j["estimators"].get<std::vector<std::string>>();
        }
        if (j.contains("folds")) spec.folds = j["folds"].get<int>();
        if (j.contains("grid_length")) spec.grid_length = j["grid_length"].get<int>();
        if (j.contains("grid_min_ratio")) {
            spec.grid_min_ratio = j["grid_min_ratio"].get<double>();
        }
        if (j.contains("theta_baseline")) spec.theta_baseline = j["theta_baseline"].get<bool>();
    } catch (const json::exception& e) {
        throw input_error(path + ": malformed scenario: " + e.what());
    }
    return spec;
}

}  // namespace isingsim
