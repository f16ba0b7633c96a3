#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isingsim/benchmark.hpp"
#include "isingsim/errors.hpp"
#include "isingsim/estimator.hpp"
#include "isingsim/io.hpp"
#include "isingsim/metrics.hpp"
#include "isingsim/model.hpp"
#include "isingsim/sampler.hpp"
#include "isingsim/selection.hpp"
#include "isingsim/similarity.hpp"

namespace py = pybind11;
using namespace isingsim;

namespace {

std::vector<bool> to_bools(const std::vector<char>& v) {
    return std::vector<bool>(v.begin(), v.end());
}

std::vector<char> from_bools(const std::vector<bool>& v) {
    std::vector<char> out;
    out.reserve(v.size());
    for (bool b : v) out.push_back(b ? 1 : 0);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Ising similarity regression: model, samplers, estimators, selection";
#ifdef ISINGSIM_VERSION
    m.attr("__version__") = ISINGSIM_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
    m.attr("EXACT_ENUMERATION_CAP") = kExactEnumerationCap;

    py::register_exception<input_error>(m, "InputError", PyExc_ValueError);
    py::register_exception<numeric_error>(m, "NumericError", PyExc_RuntimeError);

    // --- model ---------------------------------------------------------------
    py::enum_<SimilarityKind>(m, "SimilarityKind")
        .value("quantitative", SimilarityKind::quantitative)
        .value("qualitative", SimilarityKind::qualitative)
        .value("adjacency", SimilarityKind::adjacency)
        .value("raw", SimilarityKind::raw);

    py::class_<SimilarityMatrix>(m, "SimilarityMatrix")
        .def(py::init<Eigen::MatrixXd, std::string, SimilarityKind>(), py::arg("values"),
             py::arg("label"), py::arg("kind") = SimilarityKind::raw)
        .def_property_readonly("values", &SimilarityMatrix::values)
        .def_property_readonly("dim", &SimilarityMatrix::dim)
        .def_property_readonly("label", &SimilarityMatrix::label)
        .def_property_readonly("kind", &SimilarityMatrix::kind);

    py::class_<ParameterSet>(m, "ParameterSet")
        .def(py::init<>())
        .def(py::init<Eigen::VectorXd, Eigen::VectorXd>(), py::arg("main_effects"),
             py::arg("alpha"))
        .def_readwrite("main_effects", &ParameterSet::main_effects)
        .def_readwrite("alpha", &ParameterSet::alpha)
        .def_property_readonly("p", &ParameterSet::p)
        .def_property_readonly("K", &ParameterSet::K);

    py::class_<BinaryDataset>(m, "BinaryDataset")
        .def(py::init<>())
        .def(py::init([](const BinaryMatrix& y, std::vector<std::string> labels) {
                 BinaryDataset d;
                 d.y = y;
                 d.labels = std::move(labels);
                 validate_binary(d.y);
                 return d;
             }),
             py::arg("y"), py::arg("labels") = std::vector<std::string>{})
        .def_readwrite("y", &BinaryDataset::y)
        .def_readwrite("labels", &BinaryDataset::labels)
        .def_property_readonly("n", &BinaryDataset::n)
        .def_property_readonly("p", &BinaryDataset::p);

    m.def("assemble_theta", &assemble_theta, py::arg("params"), py::arg("sims"));
    m.def("exact_log_pmf",
          py::overload_cast<const BinaryVector&, const ParameterSet&,
                            const std::vector<SimilarityMatrix>&>(&exact_log_pmf),
          py::arg("u"), py::arg("params"), py::arg("sims"));
    m.def("exact_log_pmf",
          py::overload_cast<const BinaryVector&, const Eigen::MatrixXd&>(&exact_log_pmf),
          py::arg("u"), py::arg("theta"));
    m.def("conditional_prob",
          py::overload_cast<int, const BinaryVector&, const ParameterSet&,
                            const std::vector<SimilarityMatrix>&>(&conditional_prob),
          py::arg("j"), py::arg("y_rest"), py::arg("params"), py::arg("sims"));
    m.def("conditional_prob",
          py::overload_cast<int, const BinaryVector&, const Eigen::MatrixXd&>(
              &conditional_prob),
          py::arg("j"), py::arg("y_rest"), py::arg("theta"));
    m.def("log_pseudo_likelihood",
          py::overload_cast<const BinaryDataset&, const ParameterSet&,
                            const std::vector<SimilarityMatrix>&>(&log_pseudo_likelihood),
          py::arg("data"), py::arg("params"), py::arg("sims"));
    m.def("log_pseudo_likelihood",
          py::overload_cast<const BinaryDataset&, const Eigen::MatrixXd&>(
              &log_pseudo_likelihood),
          py::arg("data"), py::arg("theta"));

    py::class_<ExactDistribution>(m, "ExactDistribution")
        .def(py::init<const Eigen::MatrixXd&>(), py::arg("theta"))
        .def(py::init<const ParameterSet&, const std::vector<SimilarityMatrix>&>(),
             py::arg("params"), py::arg("sims"))
        .def_property_readonly("dim", &ExactDistribution::dim)
        .def_property_readonly("log_partition", &ExactDistribution::log_partition)
        .def("log_prob",
             [](const ExactDistribution& d, std::uint32_t s) { return d.log_prob(s); },
             py::arg("state"))
        .def_property_readonly("log_probs", &ExactDistribution::log_probs);

    // --- similarity ------------------------------------------------------------
    py::class_<QuantitativeAttribute>(m, "QuantitativeAttribute")
        .def(py::init([](std::string name, std::vector<double> values) {
                 return QuantitativeAttribute{std::move(name), std::move(values)};
             }),
             py::arg("name"), py::arg("values"))
        .def_readwrite("name", &QuantitativeAttribute::name)
        .def_readwrite("values", &QuantitativeAttribute::values);

    py::class_<QualitativeAttribute>(m, "QualitativeAttribute")
        .def(py::init([](std::string name, std::vector<std::string> categories) {
                 return QualitativeAttribute{std::move(name), std::move(categories)};
             }),
             py::arg("name"), py::arg("categories"))
        .def_readwrite("name", &QualitativeAttribute::name)
        .def_readwrite("categories", &QualitativeAttribute::categories);

    py::class_<AdjacencyAttribute>(m, "AdjacencyAttribute")
        .def(py::init([](std::string name, int dim,
                         std::vector<std::pair<int, int>> edges) {
                 return AdjacencyAttribute{std::move(name), dim, std::move(edges)};
             }),
             py::arg("name"), py::arg("dim"), py::arg("edges"))
        .def_readwrite("name", &AdjacencyAttribute::name)
        .def_readwrite("dim", &AdjacencyAttribute::dim)
        .def_readwrite("edges", &AdjacencyAttribute::edges);

    m.def("from_quantitative", &from_quantitative, py::arg("attr"),
          py::arg("bandwidth") = 1.0, py::arg("standardize") = false);
    m.def("from_qualitative", &from_qualitative, py::arg("attr"));
    m.def("from_adjacency", &from_adjacency, py::arg("attr"));

    py::class_<SimilarityDiagnostics>(m, "SimilarityDiagnostics")
        .def_readonly("symmetry_residual", &SimilarityDiagnostics::symmetry_residual)
        .def_readonly("max_abs_diagonal", &SimilarityDiagnostics::max_abs_diagonal)
        .def_readonly("one_norm", &SimilarityDiagnostics::one_norm)
        .def_readonly("min_entry", &SimilarityDiagnostics::min_entry)
        .def_readonly("max_entry", &SimilarityDiagnostics::max_entry)
        .def_readonly("ok", &SimilarityDiagnostics::ok);

    m.def("validate",
          py::overload_cast<const Eigen::MatrixXd&>(&validate), py::arg("values"));
    m.def("validate",
          py::overload_cast<const SimilarityMatrix&>(&validate), py::arg("sim"));

    // --- sampler ---------------------------------------------------------------
    py::enum_<SamplerMethod>(m, "SamplerMethod")
        .value("automatic", SamplerMethod::automatic)
        .value("exact", SamplerMethod::exact)
        .value("gibbs", SamplerMethod::gibbs);

    py::class_<SamplerConfig>(m, "SamplerConfig")
        .def(py::init<>())
        .def(py::init([](SamplerMethod method, std::uint64_t seed, int burn_in, int thin) {
                 return SamplerConfig{method, seed, burn_in, thin};
             }),
             py::arg("method") = SamplerMethod::automatic, py::arg("seed") = 0,
             py::arg("burn_in") = 1000, py::arg("thin") = 10)
        .def_readwrite("method", &SamplerConfig::method)
        .def_readwrite("seed", &SamplerConfig::seed)
        .def_readwrite("burn_in", &SamplerConfig::burn_in)
        .def_readwrite("thin", &SamplerConfig::thin);

    m.def("sample_exact",
          py::overload_cast<int, const ParameterSet&, const std::vector<SimilarityMatrix>&,
                            std::uint64_t>(&sample_exact),
          py::arg("n"), py::arg("params"), py::arg("sims"), py::arg("seed"));
    m.def("sample_exact",
          py::overload_cast<int, const Eigen::MatrixXd&, std::uint64_t>(&sample_exact),
          py::arg("n"), py::arg("theta"), py::arg("seed"));
    m.def("sample_gibbs",
          py::overload_cast<int, const ParameterSet&, const std::vector<SimilarityMatrix>&,
                            const SamplerConfig&>(&sample_gibbs),
          py::arg("n"), py::arg("params"), py::arg("sims"), py::arg("config"));
    m.def("sample_gibbs",
          py::overload_cast<int, const Eigen::MatrixXd&, const SamplerConfig&>(
              &sample_gibbs),
          py::arg("n"), py::arg("theta"), py::arg("config"));
    m.def("sample", &sample, py::arg("n"), py::arg("params"), py::arg("sims"),
          py::arg("config"));

    // --- estimator ---------------------------------------------------------------
    py::class_<StackedDesign>(m, "StackedDesign")
        .def_readonly("n", &StackedDesign::n)
        .def_readonly("p", &StackedDesign::p)
        .def_readonly("response", &StackedDesign::response)
        .def_readonly("x", &StackedDesign::x)
        .def_property_readonly("K", &StackedDesign::K);

    m.def("build_design", &build_design, py::arg("data"), py::arg("sims"));
    m.def("subset_design", &subset_design, py::arg("design"), py::arg("keep"));

    py::class_<FitOptions>(m, "FitOptions")
        .def(py::init<>())
        .def_readwrite("grad_tol", &FitOptions::grad_tol)
        .def_readwrite("max_newton_iter", &FitOptions::max_newton_iter)
        .def_readwrite("obj_rel_tol", &FitOptions::obj_rel_tol)
        .def_readwrite("kkt_tol", &FitOptions::kkt_tol)
        .def_readwrite("max_cycles", &FitOptions::max_cycles)
        .def_readwrite("include_main_effects", &FitOptions::include_main_effects)
        .def_readwrite("separation_bound", &FitOptions::separation_bound);

    py::class_<UnregularizedFit>(m, "UnregularizedFit")
        .def_readonly("params", &UnregularizedFit::params)
        .def_readonly("converged", &UnregularizedFit::converged)
        .def_readonly("separation", &UnregularizedFit::separation)
        .def_readonly("iterations", &UnregularizedFit::iterations)
        .def_readonly("grad_max_norm", &UnregularizedFit::grad_max_norm)
        .def_readonly("log_pl", &UnregularizedFit::log_pl);

    m.def("fit_unregularized", &fit_unregularized, py::arg("design"),
          py::arg("options") = FitOptions{});

    py::class_<AdaptiveWeights>(m, "AdaptiveWeights")
        .def(py::init<>())
        .def_readwrite("weights", &AdaptiveWeights::weights)
        .def_property(
            "excluded", [](const AdaptiveWeights& w) { return to_bools(w.excluded); },
            [](AdaptiveWeights& w, const std::vector<bool>& v) {
                w.excluded = from_bools(v);
            })
        .def_property_readonly("n_excluded", &AdaptiveWeights::n_excluded);

    m.def("adaptive_weights", &adaptive_weights, py::arg("alpha_bar"),
          py::arg("zero_tol") = 1e-10);
    m.def("unit_weights", &unit_weights, py::arg("K"));

    py::class_<PenaltySpec>(m, "PenaltySpec")
        .def(py::init<>())
        .def_readwrite("lambda_", &PenaltySpec::lambda)
        .def_readwrite("weights", &PenaltySpec::weights)
        .def_property(
            "excluded", [](const PenaltySpec& s) { return to_bools(s.excluded); },
            [](PenaltySpec& s, const std::vector<bool>& v) { s.excluded = from_bools(v); });

    py::class_<PenalizedFit>(m, "PenalizedFit")
        .def_readonly("params", &PenalizedFit::params)
        .def_readonly("objective", &PenalizedFit::objective)
        .def_readonly("log_pl", &PenalizedFit::log_pl)
        .def_readonly("kkt_residual", &PenalizedFit::kkt_residual)
        .def_readonly("active", &PenalizedFit::active)
        .def_readonly("converged", &PenalizedFit::converged)
        .def_readonly("monotone", &PenalizedFit::monotone)
        .def_readonly("cycles", &PenalizedFit::cycles);

    m.def("fit_penalized",
          [](const StackedDesign& design, const PenaltySpec& penalty,
             const ParameterSet* warm_start, const FitOptions& options) {
              return fit_penalized(design, penalty, warm_start, options);
          },
          py::arg("design"), py::arg("penalty"), py::arg("warm_start") = nullptr,
          py::arg("options") = FitOptions{});

    m.def("lambda_max", &lambda_max, py::arg("design"), py::arg("weights"));
    m.def("default_lambda_grid", &default_lambda_grid, py::arg("lambda_max"),
          py::arg("length") = 100, py::arg("min_ratio") = 1e-4);

    py::class_<PathResult>(m, "PathResult")
        .def_readonly("lambdas", &PathResult::lambdas)
        .def_readonly("estimates", &PathResult::estimates)
        .def_readonly("objectives", &PathResult::objectives)
        .def_readonly("log_pl", &PathResult::log_pl)
        .def_readonly("kkt_residuals", &PathResult::kkt_residuals)
        .def_readonly("active_sets", &PathResult::active_sets)
        .def_property_readonly("converged",
                               [](const PathResult& r) { return to_bools(r.converged); })
        .def_readonly("cycles", &PathResult::cycles)
        .def_readonly("lambda_max_value", &PathResult::lambda_max_value)
        .def_property_readonly("size", &PathResult::size);

    m.def("fit_path", &fit_path, py::arg("design"), py::arg("weights"),
          py::arg("grid") = std::vector<double>{}, py::arg("options") = FitOptions{});
    m.def("fit_oracle", &fit_oracle, py::arg("design"), py::arg("support"),
          py::arg("options") = FitOptions{});

    py::class_<RegularityDiagnostics>(m, "RegularityDiagnostics")
        .def_readonly("m_hat", &RegularityDiagnostics::m_hat)
        .def_readonly("min_eigenvalue_support",
                      &RegularityDiagnostics::min_eigenvalue_support)
        .def_readonly("gram_max_eigenvalue", &RegularityDiagnostics::gram_max_eigenvalue)
        .def_readonly("incoherence", &RegularityDiagnostics::incoherence)
        .def_readonly("support_block_singular",
                      &RegularityDiagnostics::support_block_singular);

    m.def("check_regularity", &check_regularity, py::arg("design"), py::arg("at"),
          py::arg("support"));
    m.def("design_log_pl", &design_log_pl, py::arg("design"), py::arg("params"));
    m.def("design_log_pl_gradient", &design_log_pl_gradient, py::arg("design"), py::arg("params"));

    // --- selection ---------------------------------------------------------------
    py::class_<FoldPlan>(m, "FoldPlan")
        .def_readonly("n", &FoldPlan::n)
        .def_readonly("folds", &FoldPlan::folds)
        .def_readonly("seed", &FoldPlan::seed)
        .def_readonly("assignment", &FoldPlan::assignment);

    m.def("make_fold_plan", &make_fold_plan, py::arg("n"), py::arg("folds"),
          py::arg("seed"));

    py::class_<CrossValidationResult>(m, "CrossValidationResult")
        .def_readonly("lambdas", &CrossValidationResult::lambdas)
        .def_readonly("mean_score", &CrossValidationResult::mean_score)
        .def_readonly("fold_scores", &CrossValidationResult::fold_scores)
        .def_property_readonly(
            "fold_flagged",
            [](const CrossValidationResult& r) { return to_bools(r.fold_flagged); })
        .def_readonly("chosen_index", &CrossValidationResult::chosen_index)
        .def_readonly("chosen_lambda", &CrossValidationResult::chosen_lambda)
        .def_readonly("full_path", &CrossValidationResult::full_path)
        .def_readonly("warnings", &CrossValidationResult::warnings);

    m.def("cross_validate", &cross_validate, py::arg("data"), py::arg("sims"),
          py::arg("weights"), py::arg("plan"), py::arg("grid") = std::vector<double>{},
          py::arg("options") = FitOptions{});
    m.def("cross_validate_design", &cross_validate_design, py::arg("design"),
          py::arg("weights"), py::arg("plan"), py::arg("grid") = std::vector<double>{},
          py::arg("options") = FitOptions{});

    py::enum_<InformationCriterion>(m, "InformationCriterion")
        .value("aic", InformationCriterion::aic)
        .value("bic", InformationCriterion::bic);

    py::class_<IcResult>(m, "IcResult")
        .def_readonly("lambdas", &IcResult::lambdas)
        .def_readonly("values", &IcResult::values)
        .def_readonly("df", &IcResult::df)
        .def_readonly("chosen_index", &IcResult::chosen_index)
        .def_readonly("chosen_lambda", &IcResult::chosen_lambda);

    m.def("select_ic",
          py::overload_cast<const PathResult&, int, int, InformationCriterion>(&select_ic),
          py::arg("path"), py::arg("n"), py::arg("p"), py::arg("criterion"));
    m.def("select_ic",
          py::overload_cast<const BinaryDataset&, const std::vector<SimilarityMatrix>&,
                            const AdaptiveWeights&, InformationCriterion,
                            std::vector<double>, const FitOptions&>(&select_ic),
          py::arg("data"), py::arg("sims"), py::arg("weights"), py::arg("criterion"),
          py::arg("grid") = std::vector<double>{}, py::arg("options") = FitOptions{});

    py::class_<WaldInterval>(m, "WaldInterval")
        .def_readonly("estimate", &WaldInterval::estimate)
        .def_readonly("se", &WaldInterval::se)
        .def_readonly("lower", &WaldInterval::lower)
        .def_readonly("upper", &WaldInterval::upper);

    py::class_<SandwichResult>(m, "SandwichResult")
        .def_readonly("support", &SandwichResult::support)
        .def_readonly("refit", &SandwichResult::refit)
        .def_readonly("se_main", &SandwichResult::se_main)
        .def_readonly("se_alpha", &SandwichResult::se_alpha)
        .def_readonly("main_intervals", &SandwichResult::main_intervals)
        .def_readonly("alpha_intervals", &SandwichResult::alpha_intervals)
        .def_readonly("bread_condition", &SandwichResult::bread_condition)
        .def_readonly("refit_converged", &SandwichResult::refit_converged)
        .def_readonly("refit_separation", &SandwichResult::refit_separation)
        .def_readonly("refit_log_pl", &SandwichResult::refit_log_pl);

    m.def("sandwich_inference", &sandwich_inference, py::arg("data"), py::arg("sims"),
          py::arg("support"), py::arg("options") = FitOptions{});
    m.def("pseudo_r2", &pseudo_r2, py::arg("fit_log_pl_sum"), py::arg("null_log_pl_sum"));

    py::enum_<PenaltyVariant>(m, "PenaltyVariant")
        .value("adaptive", PenaltyVariant::adaptive)
        .value("lasso", PenaltyVariant::lasso)
        .value("none", PenaltyVariant::none)
        .value("oracle", PenaltyVariant::oracle);

    py::enum_<TuneMethod>(m, "TuneMethod")
        .value("cv", TuneMethod::cv)
        .value("aic", TuneMethod::aic)
        .value("bic", TuneMethod::bic)
        .value("fixed", TuneMethod::fixed);

    py::class_<FitModelOptions>(m, "FitModelOptions")
        .def(py::init<>())
        .def_readwrite("penalty", &FitModelOptions::penalty)
        .def_readwrite("tune", &FitModelOptions::tune)
        .def_readwrite("folds", &FitModelOptions::folds)
        .def_readwrite("seed", &FitModelOptions::seed)
        .def_readwrite("grid_length", &FitModelOptions::grid_length)
        .def_readwrite("grid_min_ratio", &FitModelOptions::grid_min_ratio)
        .def_readwrite("lambda_grid", &FitModelOptions::lambda_grid)
        .def_readwrite("fixed_lambda", &FitModelOptions::fixed_lambda)
        .def_readwrite("oracle_support", &FitModelOptions::oracle_support)
        .def_readwrite("solver", &FitModelOptions::solver);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("penalty", &FitResult::penalty)
        .def_readonly("tune", &FitResult::tune)
        .def_readonly("seed", &FitResult::seed)
        .def_readonly("folds", &FitResult::folds)
        .def_readonly("n", &FitResult::n)
        .def_readonly("p", &FitResult::p)
        .def_readonly("K", &FitResult::K)
        .def_readonly("lambda_grid", &FitResult::lambda_grid)
        .def_readonly("chosen_lambda", &FitResult::chosen_lambda)
        .def_readonly("chosen_index", &FitResult::chosen_index)
        .def_readonly("active", &FitResult::active)
        .def_readonly("main_effects", &FitResult::main_effects)
        .def_readonly("alpha", &FitResult::alpha)
        .def_readonly("refit_main", &FitResult::refit_main)
        .def_readonly("refit_alpha", &FitResult::refit_alpha)
        .def_readonly("se_alpha", &FitResult::se_alpha)
        .def_readonly("alpha_intervals", &FitResult::alpha_intervals)
        .def_readonly("se_main", &FitResult::se_main)
        .def_readonly("main_intervals", &FitResult::main_intervals)
        .def_readonly("cv_mean_score", &FitResult::cv_mean_score)
        .def_readonly("cv_fold_scores", &FitResult::cv_fold_scores)
        .def_readonly("ic_values", &FitResult::ic_values)
        .def_readonly("ic_df", &FitResult::ic_df)
        .def_readonly("kkt_residual", &FitResult::kkt_residual)
        .def_readonly("fit_log_pl_sum", &FitResult::fit_log_pl_sum)
        .def_readonly("null_log_pl_sum", &FitResult::null_log_pl_sum)
        .def_readonly("pseudo_r2", &FitResult::pseudo_r2_value)
        .def_readonly("pilot_converged", &FitResult::pilot_converged)
        .def_readonly("pilot_separation", &FitResult::pilot_separation)
        .def_readonly("refit_converged", &FitResult::refit_converged)
        .def_readonly("warnings", &FitResult::warnings)
        .def_readonly("similarity_labels", &FitResult::similarity_labels)
        .def_readonly("response_labels", &FitResult::response_labels);

    m.def("fit_model", &fit_model, py::arg("data"), py::arg("sims"),
          py::arg("options") = FitModelOptions{});

    // --- metrics -------------------------------------------------------------
    py::class_<SelectionTruth>(m, "SelectionTruth")
        .def(py::init([](ParameterSet params, std::vector<int> support) {
                 return SelectionTruth{std::move(params), std::move(support)};
             }),
             py::arg("params"), py::arg("support"))
        .def_readwrite("params", &SelectionTruth::params)
        .def_readwrite("support", &SelectionTruth::support)
        .def_property_readonly("K", &SelectionTruth::K)
        .def_property_readonly("K0", &SelectionTruth::K0);

    m.def("mse_alpha", &mse_alpha, py::arg("alpha_hat"), py::arg("truth"));
    m.def("mse_theta", &mse_theta, py::arg("main_hat"), py::arg("truth"));

    py::class_<TprFpr>(m, "TprFpr")
        .def_readonly("tpr", &TprFpr::tpr)
        .def_readonly("fpr", &TprFpr::fpr);

    m.def("tpr_fpr", &tpr_fpr, py::arg("active"), py::arg("truth"));
    m.def("theta_error", &theta_error, py::arg("theta_hat"), py::arg("theta_true"));

    py::class_<NeighborhoodLassoOptions>(m, "NeighborhoodLassoOptions")
        .def(py::init<>())
        .def_readwrite("folds", &NeighborhoodLassoOptions::folds)
        .def_readwrite("grid_length", &NeighborhoodLassoOptions::grid_length)
        .def_readwrite("grid_min_ratio", &NeighborhoodLassoOptions::grid_min_ratio)
        .def_readwrite("seed", &NeighborhoodLassoOptions::seed);

    m.def("neighborhood_lasso_baseline", &neighborhood_lasso_baseline, py::arg("data"),
          py::arg("options") = NeighborhoodLassoOptions{});

    // --- benchmark ---------------------------------------------------------------
    py::class_<ScenarioSpec>(m, "ScenarioSpec")
        .def(py::init<>())
        .def_readwrite("name", &ScenarioSpec::name)
        .def_readwrite("n", &ScenarioSpec::n)
        .def_readwrite("p", &ScenarioSpec::p)
        .def_readwrite("K", &ScenarioSpec::K)
        .def_readwrite("K0", &ScenarioSpec::K0)
        .def_readwrite("replicates", &ScenarioSpec::replicates)
        .def_readwrite("seed", &ScenarioSpec::seed)
        .def_readwrite("alpha_low", &ScenarioSpec::alpha_low)
        .def_readwrite("alpha_high", &ScenarioSpec::alpha_high)
        .def_readwrite("theta_low", &ScenarioSpec::theta_low)
        .def_readwrite("theta_high", &ScenarioSpec::theta_high)
        .def_readwrite("max_degree", &ScenarioSpec::max_degree)
        .def_readwrite("sampler", &ScenarioSpec::sampler)
        .def_readwrite("estimators", &ScenarioSpec::estimators)
        .def_readwrite("folds", &ScenarioSpec::folds)
        .def_readwrite("grid_length", &ScenarioSpec::grid_length)
        .def_readwrite("grid_min_ratio", &ScenarioSpec::grid_min_ratio)
        .def_readwrite("theta_baseline", &ScenarioSpec::theta_baseline);

    py::class_<ScenarioTruth>(m, "ScenarioTruth")
        .def_readonly("truth", &ScenarioTruth::truth)
        .def_readonly("sims", &ScenarioTruth::sims)
        .def_readonly("theta", &ScenarioTruth::theta);

    m.def("generate_truth", &generate_truth, py::arg("spec"));

    py::class_<BenchmarkRow>(m, "BenchmarkRow")
        .def_readonly("replicate", &BenchmarkRow::replicate)
        .def_readonly("estimator", &BenchmarkRow::estimator)
        .def_readonly("mse_alpha", &BenchmarkRow::mse_alpha)
        .def_readonly("mse_theta", &BenchmarkRow::mse_theta)
        .def_readonly("tpr", &BenchmarkRow::tpr)
        .def_readonly("fpr", &BenchmarkRow::fpr)
        .def_readonly("has_fpr", &BenchmarkRow::has_fpr)
        .def_readonly("theta_error", &BenchmarkRow::theta_error)
        .def_readonly("chosen_lambda", &BenchmarkRow::chosen_lambda)
        .def_readonly("active_size", &BenchmarkRow::active_size)
        .def_readonly("converged", &BenchmarkRow::converged)
        .def_readonly("dataset_hash", &BenchmarkRow::dataset_hash)
        .def_readonly("seconds", &BenchmarkRow::seconds);

    py::class_<BenchmarkSummaryRow>(m, "BenchmarkSummaryRow")
        .def_readonly("estimator", &BenchmarkSummaryRow::estimator)
        .def_readonly("replicates", &BenchmarkSummaryRow::replicates)
        .def_readonly("mean_mse_alpha", &BenchmarkSummaryRow::mean_mse_alpha)
        .def_readonly("mean_mse_theta", &BenchmarkSummaryRow::mean_mse_theta)
        .def_readonly("mean_tpr", &BenchmarkSummaryRow::mean_tpr)
        .def_readonly("mean_fpr", &BenchmarkSummaryRow::mean_fpr)
        .def_readonly("has_fpr", &BenchmarkSummaryRow::has_fpr)
        .def_readonly("mean_theta_error", &BenchmarkSummaryRow::mean_theta_error)
        .def_readonly("median_theta_error", &BenchmarkSummaryRow::median_theta_error);

    py::class_<BenchmarkReport>(m, "BenchmarkReport")
        .def_readonly("spec", &BenchmarkReport::spec)
        .def_readonly("rows", &BenchmarkReport::rows)
        .def_readonly("summary", &BenchmarkReport::summary)
        .def_readonly("seconds", &BenchmarkReport::seconds);

    m.def("run_benchmark",
          [](const ScenarioSpec& spec) { return run_benchmark(spec); }, py::arg("spec"));
    m.def("dataset_hash", &dataset_hash, py::arg("data"));

    // --- io ------------------------------------------------------------------
    m.def("read_responses_csv", &read_responses_csv, py::arg("path"));
    m.def("write_responses_csv", &write_responses_csv, py::arg("path"), py::arg("data"));
    m.def("read_matrix_csv",
          [](const std::string& path) {
              std::vector<std::string> labels;
              Eigen::MatrixXd mat = read_matrix_csv(path, &labels);
              return py::make_tuple(mat, labels);
          },
          py::arg("path"));
    m.def("write_matrix_csv", &write_matrix_csv, py::arg("path"), py::arg("m"),
          py::arg("labels") = std::vector<std::string>{});
    m.def("read_similarity_csv", &read_similarity_csv, py::arg("path"), py::arg("label"));
    m.def("fit_result_to_json", &fit_result_to_json, py::arg("result"));
    m.def("fit_result_from_json", &fit_result_from_json, py::arg("text"));
    m.def("write_fit_result", &write_fit_result, py::arg("path"), py::arg("result"));
    m.def("read_fit_result", &read_fit_result, py::arg("path"));
    m.def("write_coefficient_table", &write_coefficient_table, py::arg("path"),
          py::arg("result"));
    m.def("median_offdiagonal", &median_offdiagonal, py::arg("theta"));

    py::enum_<ThresholdPolicy>(m, "ThresholdPolicy")
        .value("median", ThresholdPolicy::median)
        .value("none", ThresholdPolicy::none)
        .value("value", ThresholdPolicy::value);

    py::class_<GraphExportOptions>(m, "GraphExportOptions")
        .def(py::init<>())
        .def_readwrite("policy", &GraphExportOptions::policy)
        .def_readwrite("value", &GraphExportOptions::value)
        .def_readwrite("node_categories", &GraphExportOptions::node_categories);

    m.def("export_graph_dot", &export_graph_dot, py::arg("path"), py::arg("theta"),
          py::arg("labels"), py::arg("options") = GraphExportOptions{});
}
