#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>
#include <vector>

#include "gibbslik/geometry.hpp"
#include "gibbslik/inference.hpp"
#include "gibbslik/models.hpp"
#include "gibbslik/oracle.hpp"
#include "gibbslik/randomfield.hpp"
#include "gibbslik/simulate.hpp"
#include "gibbslik/stats.hpp"

namespace py = pybind11;
using namespace gibbslik;

namespace {

// py::function -> the span-based callback the estimators expect
std::function<double(std::span<const double>)> point_function(const py::function& g) {
  return [g](std::span<const double> u) {
    return g(std::vector<double>(u.begin(), u.end())).cast<double>();
  };
}

PointPattern pattern_from_points(const std::vector<std::vector<double>>& pts, std::size_t dim) {
  if (pts.empty() && dim == 0) dim = 2;
  if (!pts.empty()) dim = pts.front().size();
  PointPattern x(dim);
  for (const auto& p : pts) x.push_back(p);
  return x;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() =
      "Conditional-intensity likelihoods for locally stable Gibbs point "
      "processes, with enumeration and simulation oracles";
  mod.attr("__version__") = GIBBSLIK_VERSION;

  py::register_exception<EnumerationLimitError>(mod, "EnumerationLimitError", PyExc_RuntimeError);
  py::register_exception<ZeroVoidEstimateError>(mod, "ZeroVoidEstimateError", PyExc_RuntimeError);

  // ------------------------------------------------------------- geometry
  py::class_<Window>(mod, "Window")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("lower"),
           py::arg("upper"))
      .def_readonly("lower", &Window::lower)
      .def_readonly("upper", &Window::upper)
      .def_property_readonly("dim", &Window::dim)
      .def("measure", &Window::measure)
      .def(
          "contains",
          [](const Window& w, const std::vector<double>& p) { return w.contains(p); },
          py::arg("point"))
      .def("__repr__", [](const Window& w) {
        return "Window(dim=" + std::to_string(w.dim()) + ")";
      });

  py::class_<PointPattern>(mod, "PointPattern")
      .def(py::init<std::size_t>(), py::arg("dim") = 2)
      .def(py::init(&pattern_from_points), py::arg("points"), py::arg("dim") = 0)
      .def_property_readonly("dim", &PointPattern::dim)
      .def("__len__", &PointPattern::size)
      .def(
          "push_back",
          [](PointPattern& x, const std::vector<double>& p) { x.push_back(p); },
          py::arg("point"))
      .def("remove", &PointPattern::remove, py::arg("index"))
      .def("point",
           [](const PointPattern& x, std::size_t i) {
             auto p = x.point(i);
             return std::vector<double>(p.begin(), p.end());
           })
      .def("points",
           [](const PointPattern& x) {
             std::vector<std::vector<double>> out;
             for (std::size_t i = 0; i < x.size(); ++i) {
               auto p = x.point(i);
               out.emplace_back(p.begin(), p.end());
             }
             return out;
           })
      .def("__repr__", [](const PointPattern& x) {
        return "PointPattern(n=" + std::to_string(x.size()) +
               ", dim=" + std::to_string(x.dim()) + ")";
      });

  py::class_<QuadratureScheme>(mod, "QuadratureScheme")
      .def_readonly("window", &QuadratureScheme::window)
      .def_readonly("resolution", &QuadratureScheme::resolution)
      .def_readonly("weights", &QuadratureScheme::weights)
      .def_property_readonly("size", &QuadratureScheme::size);

  mod.def("build_quadrature", &build_quadrature, py::arg("window"), py::arg("resolution"));
  mod.def("min_pairwise_distance", &min_pairwise_distance, py::arg("pattern"));
  mod.def("has_duplicate_points", &has_duplicate_points, py::arg("pattern"));

  // --------------------------------------------------------------- models
  py::class_<Model>(mod, "Model")
      .def_static("poisson", &Model::poisson, py::arg("beta"))
      .def_static("hard_core", &Model::hard_core, py::arg("beta"), py::arg("R"))
      .def_static("strauss", &Model::strauss, py::arg("beta"), py::arg("gamma"), py::arg("R"))
      .def_property_readonly("family", [](const Model& m) { return family_name(m.family); })
      .def_readonly("beta", &Model::beta)
      .def_readonly("gamma", &Model::gamma)
      .def_readonly("R", &Model::R)
      .def("__repr__", [](const Model& m) {
        return "Model(" + family_name(m.family) + ", beta=" + std::to_string(m.beta) + ")";
      });

  mod.def(
      "cond_intensity",
      [](const Model& m, const std::vector<double>& u, const PointPattern& x) {
        return cond_intensity(m, u, x);
      },
      py::arg("model"), py::arg("u"), py::arg("pattern"));
  mod.def(
      "log_cond_intensity",
      [](const Model& m, const std::vector<double>& u, const PointPattern& x) {
        return log_cond_intensity(m, u, x);
      },
      py::arg("model"), py::arg("u"), py::arg("pattern"));
  mod.def("energy", &energy, py::arg("model"), py::arg("pattern"));
  mod.def("higher_order_cond_intensity", &higher_order_cond_intensity, py::arg("model"),
          py::arg("points"), py::arg("base"));
  mod.def("log_higher_order_cond_intensity", &log_higher_order_cond_intensity, py::arg("model"),
          py::arg("points"), py::arg("base"));
  mod.def("local_stability_bound", &local_stability_bound, py::arg("model"));
  mod.def("free_param_names", &free_param_names, py::arg("model"));
  mod.def(
      "with_free_params",
      [](const Model& m, const std::vector<double>& v) { return with_free_params(m, v); },
      py::arg("model"), py::arg("values"));
  mod.def("model_from_json", &model_from_json_text, py::arg("text"));
  mod.def("model_to_json", &model_to_json_text, py::arg("model"));

  // ---------------------------------------------------------------- stats
  py::class_<MeanSe>(mod, "MeanSe")
      .def_readonly("mean", &MeanSe::mean)
      .def_readonly("se", &MeanSe::se)
      .def_readonly("batches", &MeanSe::batches)
      .def("__repr__", [](const MeanSe& m) {
        return "MeanSe(mean=" + std::to_string(m.mean) + ", se=" + std::to_string(m.se) + ")";
      });

  mod.def(
      "log_sum_exp", [](const std::vector<double>& v) { return log_sum_exp(v); }, py::arg("values"));
  mod.def(
      "batch_means",
      [](const std::vector<double>& x, std::size_t b) { return batch_means(x, b); },
      py::arg("series"), py::arg("n_batches") = 50);

  py::class_<GofResult>(mod, "GofResult")
      .def_readonly("statistic", &GofResult::statistic)
      .def_readonly("df", &GofResult::df)
      .def_readonly("p_value", &GofResult::p_value)
      .def_readonly("pooled_bins", &GofResult::pooled_bins);
  mod.def(
      "chi_square_gof",
      [](const std::vector<std::size_t>& obs, const std::vector<double>& exp, double min_exp) {
        return chi_square_gof(obs, exp, min_exp);
      },
      py::arg("observed"), py::arg("expected_prob"), py::arg("min_expected") = 5.0);

  // ------------------------------------------------------------- simulate
  py::class_<MCMCConfig>(mod, "MCMCConfig")
      .def(py::init<>())
      .def_readwrite("steps", &MCMCConfig::steps)
      .def_readwrite("burn_in", &MCMCConfig::burn_in)
      .def_readwrite("thin", &MCMCConfig::thin)
      .def_readwrite("chains", &MCMCConfig::chains)
      .def_readwrite("seed", &MCMCConfig::seed)
      .def_readwrite("threads", &MCMCConfig::threads)
      .def("validate", &MCMCConfig::validate)
      .def("samples_per_chain", &MCMCConfig::samples_per_chain);

  py::class_<SampleSet>(mod, "SampleSet")
      .def_readonly("model", &SampleSet::model)
      .def_readonly("window", &SampleSet::window)
      .def_readonly("samples", &SampleSet::samples)
      .def_readonly("per_chain", &SampleSet::per_chain)
      .def_readonly("acceptance_rate", &SampleSet::acceptance_rate)
      .def("__len__", [](const SampleSet& s) { return s.samples.size(); });

  mod.def("sample_poisson", &sample_poisson, py::arg("model"), py::arg("window"),
          py::arg("n_samples"), py::arg("seed"));
  mod.def("sample_gibbs", &sample_gibbs, py::arg("model"), py::arg("window"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
  mod.def(
      "thin_independent",
      [](const SampleSet& s, std::size_t k) { return thin_independent(s, k); },
      py::arg("samples"), py::arg("stride"));

  py::class_<DiscreteSampleSet>(mod, "DiscreteSampleSet")
      .def_readonly("model", &DiscreteSampleSet::model)
      .def_readonly("samples", &DiscreteSampleSet::samples)
      .def_readonly("per_chain", &DiscreteSampleSet::per_chain)
      .def_readonly("acceptance_rate", &DiscreteSampleSet::acceptance_rate)
      .def("__len__", [](const DiscreteSampleSet& s) { return s.samples.size(); });
  mod.def("sample_gibbs_discrete", &sample_gibbs_discrete, py::arg("space"), py::arg("model"),
          py::arg("config"), py::call_guard<py::gil_scoped_release>());

  mod.def("estimate_void", &estimate_void, py::arg("samples"), py::arg("box"));
  mod.def(
      "estimate_generating_functional",
      [](const SampleSet& s, const py::function& g) {
        return estimate_generating_functional(s, point_function(g));
      },
      py::arg("samples"), py::arg("g"));

  py::class_<IntensityEstimate>(mod, "IntensityEstimate")
      .def_readonly("global_", &IntensityEstimate::global)
      .def_readonly("resolution", &IntensityEstimate::resolution)
      .def_readonly("cells", &IntensityEstimate::cells);
  mod.def("estimate_intensity", &estimate_intensity, py::arg("samples"), py::arg("resolution"));

  py::class_<RetentionCell>(mod, "RetentionCell")
      .def_readonly("box", &RetentionCell::box)
      .def_readonly("void_estimate", &RetentionCell::void_estimate)
      .def_readonly("p_hat", &RetentionCell::p_hat)
      .def_readonly("se", &RetentionCell::se)
      .def_readonly("conjectured", &RetentionCell::conjectured)
      .def_readonly("status", &RetentionCell::status);
  mod.def("implied_retention", &implied_retention, py::arg("samples"), py::arg("alpha"),
          py::arg("resolution"));

  // --------------------------------------------------------------- oracle
  py::class_<DiscreteSpace>(mod, "DiscreteSpace")
      .def_static("from_sites", &DiscreteSpace::from_sites, py::arg("sites"),
                  py::arg("weights") = std::vector<double>{})
      .def_static("grid", &DiscreteSpace::grid, py::arg("width"), py::arg("height"),
                  py::arg("spacing") = 1.0)
      .def_readonly("weight", &DiscreteSpace::weight)
      .def_property_readonly("size", &DiscreteSpace::size)
      .def("total_weight", &DiscreteSpace::total_weight)
      .def("__len__", &DiscreteSpace::size);

  py::class_<ExactSummary>(mod, "ExactSummary")
      .def_readonly("model", &ExactSummary::model)
      .def_readonly("k", &ExactSummary::k)
      .def_readonly("log_weight", &ExactSummary::log_weight)
      .def_readonly("log_normalizer", &ExactSummary::log_normalizer)
      .def_readonly("log_void", &ExactSummary::log_void)
      .def_readonly("probability", &ExactSummary::probability)
      .def("log_probability", &ExactSummary::log_probability, py::arg("mask"));

  mod.def("neighbour_masks", &neighbour_masks, py::arg("space"), py::arg("model"));
  mod.def("enumerate_exact", &enumerate_exact, py::arg("space"), py::arg("model"));
  mod.def("mask_from_pattern", &mask_from_pattern, py::arg("space"), py::arg("pattern"));
  mod.def("pattern_from_mask", &pattern_from_mask, py::arg("space"), py::arg("mask"));
  mod.def(
      "exact_log_likelihood_discrete",
      [](const DiscreteSpace& s, const Model& m, const PointPattern& x) {
        return exact_log_likelihood_discrete(s, m, x);
      },
      py::arg("space"), py::arg("model"), py::arg("pattern"));
  mod.def("marginal_probability", &marginal_probability, py::arg("summary"),
          py::arg("subset_mask"), py::arg("occupied_mask"));
  mod.def("conjectured_log_void_discrete", &conjectured_log_void_discrete, py::arg("space"),
          py::arg("model"));
  mod.def("conjectured_log_partition_discrete", &conjectured_log_partition_discrete,
          py::arg("space"), py::arg("model"));
  mod.def("conjectured_log_likelihood_discrete", &conjectured_log_likelihood_discrete,
          py::arg("space"), py::arg("model"), py::arg("mask"));

  py::class_<ReportEntry>(mod, "ReportEntry")
      .def_readonly("name", &ReportEntry::name)
      .def_readonly("value", &ReportEntry::value)
      .def_readonly("provenance", &ReportEntry::provenance)
      .def("__repr__", [](const ReportEntry& e) {
        return "ReportEntry(" + e.name + "=" + std::to_string(e.value) + ")";
      });

  py::class_<ConjectureReport>(mod, "ConjectureReport")
      .def_readonly("model", &ConjectureReport::model)
      .def_readonly("k", &ConjectureReport::k)
      .def_readonly("entries", &ConjectureReport::entries)
      .def_readonly("argmax_data_mask", &ConjectureReport::argmax_data_mask)
      .def("entry", [](const ConjectureReport& r, const std::string& name) {
        for (const auto& e : r.entries)
          if (e.name == name) return e.value;
        throw py::key_error(name);
      });

  mod.def(
      "conjecture_report",
      [](const DiscreteSpace& s, const Model& m, double beta_lo, double beta_hi,
         std::size_t beta_grid) {
        ConjectureReportOptions o;
        o.beta_lo = beta_lo;
        o.beta_hi = beta_hi;
        o.beta_grid = beta_grid;
        return conjecture_report(s, m, o);
      },
      py::arg("space"), py::arg("model"), py::arg("beta_lo") = 0.0, py::arg("beta_hi") = 0.0,
      py::arg("beta_grid") = 401);

  // ------------------------------------------------------------ inference
  py::class_<VoidProvider>(mod, "VoidProvider")
      .def_static("conjecture", &VoidProvider::conjecture)
      .def_static("monte_carlo", &VoidProvider::monte_carlo, py::arg("samples"))
      .def_static("exact_discrete", &VoidProvider::exact_discrete, py::arg("summary"));

  mod.def("exact_log_likelihood", &exact_log_likelihood, py::arg("model"), py::arg("pattern"),
          py::arg("quadrature"), py::arg("provider") = VoidProvider::conjecture());
  mod.def("pseudo_log_likelihood", &pseudo_log_likelihood, py::arg("model"), py::arg("pattern"),
          py::arg("quadrature"));
  mod.def("score", &score, py::arg("model"), py::arg("pattern"), py::arg("quadrature"));
  mod.def("pseudo_score", &pseudo_score, py::arg("model"), py::arg("pattern"),
          py::arg("quadrature"));
  mod.def(
      "conjectured_log_void",
      [](const Model& m, const QuadratureScheme& q) { return conjectured_log_void(m, q); },
      py::arg("model"), py::arg("quadrature"));
  mod.def(
      "conjectured_log_void_box",
      [](const Model& m, const QuadratureScheme& q, const Window& b) {
        return conjectured_log_void(m, q, b);
      },
      py::arg("model"), py::arg("quadrature"), py::arg("box"));
  mod.def("conjectured_log_partition", &conjectured_log_partition, py::arg("model"),
          py::arg("quadrature"));
  mod.def("log_likelihood_ratio", &log_likelihood_ratio, py::arg("model1"), py::arg("model2"),
          py::arg("pattern"), py::arg("quadrature"));

  py::class_<FitResult>(mod, "FitResult")
      .def_readonly("model", &FitResult::model)
      .def_readonly("free_names", &FitResult::free_names)
      .def_readonly("theta_hat", &FitResult::theta_hat)
      .def_readonly("objective", &FitResult::objective)
      .def_readonly("log_objective", &FitResult::log_objective)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("fixed_parameters", &FitResult::fixed_parameters)
      .def_readonly("warnings", &FitResult::warnings)
      .def_property_readonly("void_mode",
                             [](const FitResult& r) { return void_mode_name(r.void_mode); });

  mod.def(
      "mle_fit",
      [](const std::string& family, const PointPattern& x, const QuadratureScheme& q,
         const std::string& objective, const std::string& void_mode, std::uint64_t seed,
         const MCMCConfig& mc, const DiscreteSpace* oracle_space, std::size_t max_iterations) {
        FitOptions opts;
        if (objective == "exact")
          opts.objective = FitObjective::exact;
        else if (objective == "pseudo")
          opts.objective = FitObjective::pseudo;
        else
          throw std::invalid_argument("objective must be 'exact' or 'pseudo'");
        opts.void_mode = void_mode_from_name(void_mode);
        opts.seed = seed;
        opts.mc = mc;
        opts.oracle_space = oracle_space;
        opts.max_iterations = max_iterations;
        return mle_fit(family_from_name(family), x, q, opts);
      },
      py::arg("family"), py::arg("pattern"), py::arg("quadrature"),
      py::arg("objective") = "exact", py::arg("void_mode") = "conjecture", py::arg("seed") = 1,
      py::arg("mc") = MCMCConfig{}, py::arg("oracle_space") = nullptr,
      py::arg("max_iterations") = 200);

  py::class_<GridAxis>(mod, "GridAxis")
      .def(py::init([](const std::string& name, double lo, double hi, std::size_t count) {
             return GridAxis{name, lo, hi, count};
           }),
           py::arg("name"), py::arg("lo"), py::arg("hi"), py::arg("count"))
      .def_readonly("name", &GridAxis::name)
      .def_readonly("lo", &GridAxis::lo)
      .def_readonly("hi", &GridAxis::hi)
      .def_readonly("count", &GridAxis::count);

  py::class_<PosteriorGrid>(mod, "PosteriorGrid")
      .def_readonly("axes", &PosteriorGrid::axes)
      .def_readonly("log_unnorm", &PosteriorGrid::log_unnorm)
      .def_readonly("density", &PosteriorGrid::density)
      .def_readonly("cell_probability", &PosteriorGrid::cell_probability)
      .def_readonly("log_evidence", &PosteriorGrid::log_evidence);

  mod.def(
      "log_posterior_unnorm",
      [](const Model& m, const PointPattern& x, const QuadratureScheme& q,
         const py::function& log_prior) {
        return log_posterior_unnorm(m, x, q, point_function(log_prior));
      },
      py::arg("model"), py::arg("pattern"), py::arg("quadrature"), py::arg("log_prior"));
  mod.def(
      "posterior_grid",
      [](const Model& m, const PointPattern& x, const QuadratureScheme& q,
         const py::function& log_prior, const std::vector<GridAxis>& axes) {
        return posterior_grid(m, x, q, point_function(log_prior), axes);
      },
      py::arg("model"), py::arg("pattern"), py::arg("quadrature"), py::arg("log_prior"),
      py::arg("axes"));

  // ---------------------------------------------------------- randomfield
  py::class_<Lattice>(mod, "Lattice")
      .def_static("grid", &Lattice::grid, py::arg("width"), py::arg("height"),
                  py::arg("torus") = false)
      .def_readonly("width", &Lattice::width)
      .def_readonly("height", &Lattice::height)
      .def_readonly("torus", &Lattice::torus)
      .def_readonly("neighbours", &Lattice::neighbours)
      .def_property_readonly("size", &Lattice::size)
      .def("edge_count", &Lattice::edge_count)
      .def("__len__", &Lattice::size);

  py::class_<IsingParams>(mod, "IsingParams")
      .def(py::init([](double t1, double t2) {
             return IsingParams{t1, t2};
           }),
           py::arg("theta1") = 0.0, py::arg("theta2") = 0.0)
      .def_readwrite("theta1", &IsingParams::theta1)
      .def_readwrite("theta2", &IsingParams::theta2);

  mod.def("ising_potential_sum", &ising_potential_sum, py::arg("lattice"), py::arg("field"),
          py::arg("theta"));
  mod.def("local_characteristic", &local_characteristic, py::arg("lattice"), py::arg("field"),
          py::arg("theta"), py::arg("site"));
  mod.def("field_to_pattern", &field_to_pattern, py::arg("lattice"), py::arg("field"));
  mod.def("pattern_to_field", &pattern_to_field, py::arg("lattice"), py::arg("pattern"));
  mod.def("field_cond_intensity", &field_cond_intensity, py::arg("lattice"), py::arg("theta"),
          py::arg("site"), py::arg("conditioning"));
  mod.def("field_conjectured_log_likelihood", &field_conjectured_log_likelihood,
          py::arg("lattice"), py::arg("field"), py::arg("theta"));
  mod.def("field_exact_log_likelihood", &field_exact_log_likelihood, py::arg("lattice"),
          py::arg("field"), py::arg("theta"));
  mod.def("field_distribution", &field_distribution, py::arg("lattice"), py::arg("theta"));
  mod.def("field_exact_log_partition", &field_exact_log_partition, py::arg("lattice"),
          py::arg("theta"));
  mod.def("field_pseudo_log_likelihood", &field_pseudo_log_likelihood, py::arg("lattice"),
          py::arg("field"), py::arg("theta"));

  py::class_<FieldFitResult>(mod, "FieldFitResult")
      .def_readonly("theta_hat", &FieldFitResult::theta_hat)
      .def_readonly("objective", &FieldFitResult::objective)
      .def_readonly("log_objective", &FieldFitResult::log_objective)
      .def_readonly("iterations", &FieldFitResult::iterations)
      .def_readonly("converged", &FieldFitResult::converged);

  mod.def(
      "field_fit",
      [](const Lattice& l, const BinaryField& f, const std::string& objective,
         std::size_t max_iterations) {
        return field_fit(l, f, field_objective_from_name(objective), max_iterations);
      },
      py::arg("lattice"), py::arg("field"), py::arg("objective") = "exact",
      py::arg("max_iterations") = 200);

  py::class_<FieldSimConfig>(mod, "FieldSimConfig")
      .def(py::init<>())
      .def_readwrite("sweeps", &FieldSimConfig::sweeps)
      .def_readwrite("burn_in", &FieldSimConfig::burn_in)
      .def_readwrite("thin", &FieldSimConfig::thin)
      .def_readwrite("seed", &FieldSimConfig::seed)
      .def("validate", &FieldSimConfig::validate);

  mod.def("gibbs_sample_field", &gibbs_sample_field, py::arg("lattice"), py::arg("theta"),
          py::arg("config"), py::call_guard<py::gil_scoped_release>());

  py::class_<FieldConjectureReport>(mod, "FieldConjectureReport")
      .def_readonly("theta", &FieldConjectureReport::theta)
      .def_readonly("k", &FieldConjectureReport::k)
      .def_readonly("entries", &FieldConjectureReport::entries)
      .def("entry", [](const FieldConjectureReport& r, const std::string& name) {
        for (const auto& e : r.entries)
          if (e.name == name) return e.value;
        throw py::key_error(name);
      });

  mod.def("field_conjecture_report", &field_conjecture_report, py::arg("lattice"),
          py::arg("theta"));
}
