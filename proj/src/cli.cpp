#include "gibbslik/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gibbslik/inference.hpp"
#include "gibbslik/oracle.hpp"
#include "gibbslik/randomfield.hpp"
#include "gibbslik/simulate.hpp"

#ifndef GIBBSLIK_VERSION
#define GIBBSLIK_VERSION "0.0.0"
#endif

namespace gibbslik::cli {

namespace {

using nlohmann::json;

json meta_json(const std::string& command, const json& config, std::uint64_t seed,
               const std::string& void_mode) {
  return json{{"tool", "gibbslik"},
              {"version", GIBBSLIK_VERSION},
              {"command", command},
              {"energy_zero_convention", "E(empty)=0"},
              {"seed", seed},
              {"void_mode", void_mode},
              {"config", config}};
}

Window window_from_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("window json: cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("window json: parse error in " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("lower") || !j.contains("upper"))
    throw std::invalid_argument("window json: " + path +
                                " must be an object with 'lower' and 'upper' arrays");
  std::vector<double> lo, hi;
  try {
    lo = j.at("lower").get<std::vector<double>>();
    hi = j.at("upper").get<std::vector<double>>();
  } catch (const json::exception&) {
    throw std::invalid_argument("window json: 'lower'/'upper' must be numeric arrays in " + path);
  }
  return Window(lo, hi);
}

json window_to_json(const Window& w) {
  return json{{"lower", w.lower}, {"upper", w.upper}};
}

json model_to_json(const Model& m) { return json::parse(model_to_json_text(m)); }

void parse_lattice_spec(const std::string& spec, std::size_t& width, std::size_t& height) {
  auto x = spec.find('x');
  if (x == std::string::npos) x = spec.find('X');
  if (x == std::string::npos)
    throw std::invalid_argument("--lattice expects WIDTHxHEIGHT, e.g. 3x3; got '" + spec + "'");
  try {
    width = std::stoul(spec.substr(0, x));
    height = std::stoul(spec.substr(x + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("--lattice expects WIDTHxHEIGHT, e.g. 3x3; got '" + spec + "'");
  }
  if (width == 0 || height == 0)
    throw std::invalid_argument("--lattice dimensions must be positive; got '" + spec + "'");
}

void write_output(const std::string& path, const std::string& content, std::ostream& fallback) {
  if (path.empty()) {
    fallback << content;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
}

json pattern_to_json(const PointPattern& x) {
  json arr = json::array();
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto p = x.point(i);
    arr.push_back(std::vector<double>(p.begin(), p.end()));
  }
  return arr;
}

json entries_to_json(const std::vector<ReportEntry>& entries) {
  json arr = json::array();
  for (const auto& e : entries)
    arr.push_back(json{{"name", e.name}, {"value", e.value}, {"provenance", e.provenance}});
  return arr;
}

struct McmcFlags {
  std::size_t steps = 200000;
  std::size_t burn_in = 20000;
  std::size_t thin = 10;
  std::size_t chains = 1;
  std::uint64_t seed = 1;
  int threads = 1;

  MCMCConfig config() const {
    MCMCConfig c;
    c.steps = steps;
    c.burn_in = burn_in;
    c.thin = thin;
    c.chains = chains;
    c.seed = seed;
    c.threads = threads;
    return c;
  }

  json echo() const {
    return json{{"steps", steps}, {"burn_in", burn_in}, {"thin", thin},
                {"chains", chains}, {"seed", seed},     {"threads", threads}};
  }
};

void add_mcmc_flags(CLI::App* sub, McmcFlags& f) {
  sub->add_option("--steps", f.steps, "Total Markov chain steps per chain");
  sub->add_option("--burn-in", f.burn_in, "Steps discarded before recording");
  sub->add_option("--thin", f.thin, "Record every thin-th post-burn-in state");
  sub->add_option("--chains", f.chains, "Number of independent chains");
  sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--threads", f.threads, "Worker thread cap for parallel chains");
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string model_path;
  std::string window_path;
  std::string out_path;
  McmcFlags mc;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  Model m{};
  Window w;
  MCMCConfig cfg;
  try {
    m = model_from_json_file(a.model_path);
    w = window_from_json_file(a.window_path);
    cfg = a.mc.config();
    cfg.validate();
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    SampleSet s = sample_gibbs(m, w, cfg);
    json config_echo{{"model", model_to_json(m)},
                     {"window", window_to_json(w)},
                     {"mcmc", a.mc.echo()}};
    json meta = meta_json("simulate", config_echo, cfg.seed, "none");
    meta["acceptance_rate"] = s.acceptance_rate;
    meta["samples"] = s.samples.size();
    meta["per_chain"] = s.per_chain;
    meta["sample_format"] = "one JSON array of [x,y] points per line";
    std::string text = meta.dump() + "\n";
    for (const auto& x : s.samples) text += pattern_to_json(x).dump() + "\n";
    write_output(a.out_path, text, out);
    return kOk;
  } catch (const EnumerationLimitError& e) {
    err << "resource guard: " << e.what() << "\n";
    return kResourceGuard;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string model_path;
  std::string pattern_path;
  std::string window_path;
  std::string sites_path;
  std::string objective = "exact";
  std::string void_mode = "conjecture";
  std::size_t resolution = 100;
  std::string out_path;
  bool strict = false;
  McmcFlags mc{20000, 2000, 10, 1, 1, 1};
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  Model m{};
  Window w;
  PointPattern x;
  QuadratureScheme q;
  FitOptions opts;
  DiscreteSpace oracle_space;
  try {
    m = model_from_json_file(a.model_path);
    w = window_from_json_file(a.window_path);
    x = read_pattern(a.pattern_path, w, true);
    q = build_quadrature(w, a.resolution);
    opts.objective = a.objective == "pseudo" ? FitObjective::pseudo : FitObjective::exact;
    if (a.objective != "exact" && a.objective != "pseudo")
      throw std::invalid_argument("--objective must be 'exact' or 'pseudo'; got '" + a.objective +
                                  "'");
    opts.void_mode = void_mode_from_name(a.void_mode);
    opts.seed = a.mc.seed;
    opts.mc = a.mc.config();
    if (opts.void_mode == VoidMode::exact_discrete) {
      if (a.sites_path.empty())
        throw std::invalid_argument("--void oracle needs --sites with the discrete site list");
      PointPattern sites = read_pattern(a.sites_path, w, false);
      oracle_space = DiscreteSpace::from_sites(sites);
      opts.oracle_space = &oracle_space;
    }
  } catch (const EnumerationLimitError& e) {
    err << "resource guard: " << e.what() << "\n";
    return kResourceGuard;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    FitResult r = mle_fit(m.family, x, q, opts);
    json theta;
    for (std::size_t i = 0; i < r.free_names.size(); ++i) theta[r.free_names[i]] = r.theta_hat[i];
    json fixed = json::object();
    for (const auto& [k, v] : r.fixed_parameters) fixed[k] = v;
    json config_echo{{"model", model_to_json(m)},
                     {"pattern", a.pattern_path},
                     {"window", window_to_json(w)},
                     {"objective", a.objective},
                     {"void", a.void_mode},
                     {"resolution", a.resolution},
                     {"strict", a.strict},
                     {"mcmc", a.mc.echo()}};
    json doc = meta_json("fit", config_echo, r.seed, void_mode_name(r.void_mode));
    doc["family"] = family_name(r.model.family);
    doc["n_points"] = x.size();
    doc["theta_hat"] = theta;
    doc["objective"] = r.objective;
    doc["log_objective"] = r.log_objective;
    doc["iterations"] = r.iterations;
    doc["converged"] = r.converged;
    doc["fixed_parameters"] = fixed;
    doc["warnings"] = r.warnings;
    write_output(a.out_path, doc.dump(2) + "\n", out);
    if (a.strict && !r.converged) {
      err << "numerical failure: fit did not converge (strict mode)\n";
      return kNumericalError;
    }
    return kOk;
  } catch (const EnumerationLimitError& e) {
    err << "resource guard: " << e.what() << "\n";
    return kResourceGuard;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
}

// ------------------------------------------------------- verify-conjecture

struct VerifyArgs {
  bool continuum = false;
  bool discrete = false;
  bool field = false;
  std::string model_path;
  std::string window_path;
  std::string sites_path;
  std::string lattice_spec;
  double spacing = 1.0;
  bool torus = false;
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::size_t resolution = 100;
  std::size_t retention_cells = 0;  // 0 = size cells so per-cell voids are estimable
  std::size_t beta_grid = 401;
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  std::string out_path;
  McmcFlags mc;
};

int cmd_verify_discrete(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  Model m{};
  DiscreteSpace space;
  ConjectureReportOptions ropts;
  json space_echo;
  try {
    m = model_from_json_file(a.model_path);
    if (!a.sites_path.empty()) {
      PointPattern sites(2);
      {
        std::ifstream f(a.sites_path);
        if (!f) throw std::runtime_error("sites csv: cannot open " + a.sites_path);
        std::ostringstream buf;
        buf << f.rdbuf();
        sites = parse_pattern_csv(buf.str(), 2);
      }
      space = DiscreteSpace::from_sites(sites);
      space_echo = json{{"sites", a.sites_path}, {"count", space.size()}};
    } else if (!a.lattice_spec.empty()) {
      std::size_t width = 0, height = 0;
      parse_lattice_spec(a.lattice_spec, width, height);
      space = DiscreteSpace::grid(width, height, a.spacing);
      space_echo = json{{"lattice", a.lattice_spec}, {"spacing", a.spacing}};
    } else {
      throw std::invalid_argument("--discrete needs --sites or --lattice");
    }
    ropts.beta_grid = a.beta_grid;
    ropts.beta_lo = a.beta_lo;
    ropts.beta_hi = a.beta_hi;
    if (space.size() > kMaxEnumerationSites)
      throw EnumerationLimitError("exact enumeration is limited to " +
                                  std::to_string(kMaxEnumerationSites) + " sites; this space has " +
                                  std::to_string(space.size()));
  } catch (const EnumerationLimitError& e) {
    err << "resource guard: " << e.what() << "\n";
    return kResourceGuard;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    ConjectureReport rep = conjecture_report(space, m, ropts);
    json config_echo{{"mode", "discrete"},
                     {"model", model_to_json(m)},
                     {"space", space_echo},
                     {"beta_grid", a.beta_grid},
                     {"beta_lo", a.beta_lo},
                     {"beta_hi", a.beta_hi}};
    json doc = meta_json("verify-conjecture", config_echo, 0, "oracle");
    doc["k"] = rep.k;
    doc["argmax_data_mask"] = rep.argmax_data_mask;
    doc["entries"] = entries_to_json(rep.entries);
    write_output(a.out_path, doc.dump(2) + "\n", out);
    return kOk;
  } catch (const EnumerationLimitError& e) {
    err << "resource guard: " << e.what() << "\n";
    return kResourceGuard;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
}

int cmd_verify_field(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  Lattice l;
  try {
    std::size_t width = 0, height = 0;
    if (a.lattice_spec.empty())
      throw std::invalid_argument("--field needs --lattice WIDTHxHEIGHT");
    parse_lattice_spec(a.lattice_spec, width, height);
    if (width * height > kMaxEnumerationSites)
      throw EnumerationLimitError("exact enumeration is limited to " +
                                  std::to_string(kMaxEnumerationSites) +
                                  " sites; this lattice has " + std::to_string(width * height));
    l = Lattice::grid(width, height, a.torus);
  } catch (const EnumerationLimitError& e) {
    err << "resource guard: " << e.what() << "\n";
    return kResourceGuard;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    FieldConjectureReport rep = field_conjecture_report(l, {a.theta1, a.theta2});
    json config_echo{{"mode", "field"},
                     {"lattice", a.lattice_spec},
                     {"torus", a.torus},
                     {"theta1", a.theta1},
                     {"theta2", a.theta2}};
    json doc = meta_json("verify-conjecture", config_echo, 0, "oracle");
    doc["k"] = rep.k;
    doc["entries"] = entries_to_json(rep.entries);
    write_output(a.out_path, doc.dump(2) + "\n", out);
    return kOk;
  } catch (const EnumerationLimitError& e) {
    err << "resource guard: " << e.what() << "\n";
    return kResourceGuard;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
}

int cmd_verify_continuum(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  Model m{};
  Window w;
  QuadratureScheme q;
  MCMCConfig cfg;
  try {
    m = model_from_json_file(a.model_path);
    w = window_from_json_file(a.window_path);
    q = build_quadrature(w, a.resolution);
    cfg = a.mc.config();
    cfg.validate();
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    SampleSet s = sample_gibbs(m, w, cfg);
    const char* prov_conj = "conjectured closed form";
    const char* prov_mc = "birth-death MCMC estimate with batch-means error";
    const char* prov_mixed = "MCMC estimate compared against the conjectured closed form";

    std::vector<ReportEntry> entries;
    double alpha = local_stability_bound(m);

    // Probe the void conjecture on a corner box sized so the conjectured
    // void probability stays near exp(-2.5); the full window's void is
    // unobservably small for any realistic intensity.
    double target = std::min(w.measure(), 2.5 / alpha);
    double shrink = std::pow(target / w.measure(), 1.0 / static_cast<double>(w.dim()));
    Window box = w;
    for (std::size_t d = 0; d < w.dim(); ++d)
      box.upper[d] = w.lower[d] + shrink * (w.upper[d] - w.lower[d]);
    QuadratureScheme qbox = build_quadrature(box, a.resolution);

    double lv_conj = conjectured_log_void(m, qbox);
    MeanSe v = estimate_void(s, box);
    entries.push_back({"void_box_measure", box.measure(), "probe region for the void check"});
    entries.push_back({"void_conjectured", std::exp(lv_conj), prov_conj});
    entries.push_back({"void_mc", v.mean, prov_mc});
    entries.push_back({"void_mc_se", v.se, prov_mc});
    entries.push_back({"void_abs_discrepancy", std::abs(v.mean - std::exp(lv_conj)), prov_mixed});
    entries.push_back({"void_discrepancy_in_se",
                       v.se > 0.0 ? std::abs(v.mean - std::exp(lv_conj)) / v.se
                                  : std::numeric_limits<double>::infinity(),
                       prov_mixed});
    entries.push_back({"log_partition_conjectured", -conjectured_log_void(m, q), prov_conj});

    IntensityEstimate inten = estimate_intensity(s, 1);
    entries.push_back({"intensity_global_mc", inten.global.mean, prov_mc});
    entries.push_back({"intensity_global_mc_se", inten.global.se, prov_mc});
    entries.push_back({"local_stability_bound", local_stability_bound(m),
                       "uniform intensity bound of the model"});
    entries.push_back({"acceptance_rate", s.acceptance_rate, "observed MCMC acceptance rate"});

    // Auto partition: cells of measure about 2.5/alpha keep per-cell voids
    // observable; an explicit --retention-cells overrides.
    std::size_t res = a.retention_cells;
    if (res == 0)
      res = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(
                 std::pow(alpha * w.measure() / 2.5, 1.0 / static_cast<double>(w.dim())))));
    auto cells = implied_retention(s, alpha, res);
    double max_dev = 0.0;
    std::size_t ok_cells = 0;
    for (const auto& c : cells) {
      if (c.status == "void_zero" || !(c.se > 0.0)) continue;
      ++ok_cells;
      max_dev = std::max(max_dev, std::abs(c.p_hat - c.conjectured) / c.se);
    }
    entries.push_back({"retention_resolution", static_cast<double>(res),
                       "retention partition cells per axis"});
    entries.push_back({"retention_cells_with_estimates", static_cast<double>(ok_cells),
                       "implied retention probability per cell"});
    entries.push_back({"retention_max_abs_dev_in_se", max_dev,
                       "largest |implied - conjectured| retention deviation in SE units"});

    json config_echo{{"mode", "continuum"},
                     {"model", model_to_json(m)},
                     {"window", window_to_json(w)},
                     {"resolution", a.resolution},
                     {"retention_cells", a.retention_cells},
                     {"mcmc", a.mc.echo()}};
    json doc = meta_json("verify-conjecture", config_echo, cfg.seed, "mc");
    doc["entries"] = entries_to_json(entries);
    write_output(a.out_path, doc.dump(2) + "\n", out);
    return kOk;
  } catch (const EnumerationLimitError& e) {
    err << "resource guard: " << e.what() << "\n";
    return kResourceGuard;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  int modes = (a.continuum ? 1 : 0) + (a.discrete ? 1 : 0) + (a.field ? 1 : 0);
  if (modes != 1) {
    err << "config error: choose exactly one of --continuum, --discrete, --field\n";
    return kConfigError;
  }
  if (a.discrete) return cmd_verify_discrete(a, out, err);
  if (a.field) return cmd_verify_field(a, out, err);
  return cmd_verify_continuum(a, out, err);
}

// --------------------------------------------------------------- field-sim

struct FieldSimArgs {
  std::string lattice_spec;
  bool torus = false;
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::size_t sweeps = 2000;
  std::size_t burn_in = 200;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  std::string out_path;
};

int cmd_field_sim(const FieldSimArgs& a, std::ostream& out, std::ostream& err) {
  Lattice l;
  FieldSimConfig cfg;
  try {
    std::size_t width = 0, height = 0;
    parse_lattice_spec(a.lattice_spec, width, height);
    l = Lattice::grid(width, height, a.torus);
    cfg.sweeps = a.sweeps;
    cfg.burn_in = a.burn_in;
    cfg.thin = a.thin;
    cfg.seed = a.seed;
    cfg.validate();
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    auto fields = gibbs_sample_field(l, {a.theta1, a.theta2}, cfg);
    json config_echo{{"lattice", a.lattice_spec}, {"torus", a.torus},   {"theta1", a.theta1},
                     {"theta2", a.theta2},        {"sweeps", a.sweeps}, {"burn_in", a.burn_in},
                     {"thin", a.thin},            {"seed", a.seed}};
    json meta = meta_json("field-sim", config_echo, a.seed, "none");
    meta["samples"] = fields.size();
    meta["sample_format"] = "one JSON array of row-major 0/1 site values per line";
    std::string text = meta.dump() + "\n";
    for (const auto& f : fields) {
      json arr = json::array();
      for (auto v : f) arr.push_back(static_cast<int>(v));
      text += arr.dump() + "\n";
    }
    write_output(a.out_path, text, out);
    return kOk;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
}

// --------------------------------------------------------------- field-fit

struct FieldFitArgs {
  std::string field_path;
  bool torus = false;
  std::string objective = "exact";
  std::string out_path;
  bool strict = false;
};

int cmd_field_fit(const FieldFitArgs& a, std::ostream& out, std::ostream& err) {
  Lattice l;
  BinaryField f;
  FieldObjective objective;
  try {
    std::size_t width = 0, height = 0;
    f = read_field(a.field_path, width, height);
    l = Lattice::grid(width, height, a.torus);
    objective = field_objective_from_name(a.objective);
    if (objective == FieldObjective::exact && l.size() > kMaxEnumerationSites)
      throw EnumerationLimitError("exact enumeration is limited to " +
                                  std::to_string(kMaxEnumerationSites) +
                                  " sites; this lattice has " + std::to_string(l.size()));
  } catch (const EnumerationLimitError& e) {
    err << "resource guard: " << e.what() << "\n";
    return kResourceGuard;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    FieldFitResult r = field_fit(l, f, objective);
    json config_echo{{"field", a.field_path},
                     {"torus", a.torus},
                     {"objective", a.objective},
                     {"strict", a.strict}};
    json doc = meta_json("field-fit", config_echo, 0, "none");
    doc["lattice"] = json{{"width", l.width}, {"height", l.height}, {"torus", l.torus}};
    doc["theta_hat"] = json{{"theta1", r.theta_hat.theta1}, {"theta2", r.theta_hat.theta2}};
    doc["objective"] = r.objective;
    doc["log_objective"] = r.log_objective;
    doc["iterations"] = r.iterations;
    doc["converged"] = r.converged;
    write_output(a.out_path, doc.dump(2) + "\n", out);
    if (a.strict && !r.converged) {
      err << "numerical failure: fit did not converge (strict mode)\n";
      return kNumericalError;
    }
    return kOk;
  } catch (const EnumerationLimitError& e) {
    err << "resource guard: " << e.what() << "\n";
    return kResourceGuard;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
}

// ----------------------------------------------------------- config-schema

json option_doc(const std::string& type, const std::string& doc, bool required = false) {
  return json{{"type", type}, {"doc", doc}, {"required", required}};
}

int cmd_config_schema(std::ostream& out) {
  json mcmc{{"--steps", option_doc("integer", "total Markov chain steps per chain")},
            {"--burn-in", option_doc("integer", "steps discarded before recording")},
            {"--thin", option_doc("integer", "record every thin-th post-burn-in state")},
            {"--chains", option_doc("integer", "number of independent chains")},
            {"--seed", option_doc("integer", "random seed; same seed, same output")},
            {"--threads", option_doc("integer", "worker thread cap for parallel chains")}};
  json schema{
      {"tool", "gibbslik"},
      {"version", GIBBSLIK_VERSION},
      {"energy_zero_convention", "E(empty)=0"},
      {"exit_codes",
       {{"0", "success"},
        {"2", "configuration error"},
        {"3", "numerical failure"},
        {"4", "enumeration resource guard (more than 24 sites)"}}},
      {"subcommands",
       {{"simulate",
         {{"doc", "birth-death MCMC sampling of a point process model"},
          {"options",
           {{"--model", option_doc("path", "model JSON file", true)},
            {"--window", option_doc("path", "window JSON file", true)},
            {"--out", option_doc("path", "NDJSON output (stdout when omitted)")}}},
          {"mcmc_options", mcmc}}},
        {"fit",
         {{"doc", "maximum likelihood or pseudolikelihood parameter fit"},
          {"options",
           {{"--model", option_doc("path", "model JSON file (selects the family)", true)},
            {"--pattern", option_doc("path", "point pattern CSV", true)},
            {"--window", option_doc("path", "window JSON file", true)},
            {"--objective", option_doc("string", "exact | pseudo")},
            {"--void", option_doc("string", "conjecture | mc | oracle")},
            {"--sites", option_doc("path", "site CSV for the oracle void mode")},
            {"--resolution", option_doc("integer", "quadrature nodes per axis")},
            {"--strict", option_doc("flag", "exit 3 when the fit does not converge")},
            {"--out", option_doc("path", "result JSON (stdout when omitted)")}}},
          {"mcmc_options", mcmc}}},
        {"verify-conjecture",
         {{"doc", "conjectured closed forms against exact enumeration or MCMC"},
          {"options",
           {{"--continuum", option_doc("flag", "MCMC comparison on a continuum window")},
            {"--discrete", option_doc("flag", "exact enumeration on a finite site space")},
            {"--field", option_doc("flag", "exact enumeration of a binary lattice field")},
            {"--model", option_doc("path", "model JSON (continuum and discrete modes)")},
            {"--window", option_doc("path", "window JSON (continuum mode)")},
            {"--sites", option_doc("path", "site CSV (discrete mode)")},
            {"--lattice", option_doc("string", "WIDTHxHEIGHT (discrete and field modes)")},
            {"--spacing", option_doc("number", "lattice spacing (discrete mode)")},
            {"--torus", option_doc("flag", "periodic boundary (field mode)")},
            {"--theta1", option_doc("number", "external field (field mode)")},
            {"--theta2", option_doc("number", "pair interaction (field mode)")},
            {"--resolution", option_doc("integer", "quadrature nodes per axis (continuum)")},
            {"--retention-cells", option_doc("integer", "retention grid cells per axis, 0 = auto")},
            {"--beta-grid", option_doc("integer", "profile grid size (discrete mode)")},
            {"--beta-lo", option_doc("number", "profile grid lower end (discrete mode)")},
            {"--beta-hi", option_doc("number", "profile grid upper end (discrete mode)")},
            {"--out", option_doc("path", "report JSON (stdout when omitted)")}}},
          {"mcmc_options", mcmc}}},
        {"field-sim",
         {{"doc", "systematic-scan heat-bath sampling of the binary lattice model"},
          {"options",
           {{"--lattice", option_doc("string", "WIDTHxHEIGHT", true)},
            {"--torus", option_doc("flag", "periodic boundary")},
            {"--theta1", option_doc("number", "external field")},
            {"--theta2", option_doc("number", "pair interaction")},
            {"--sweeps", option_doc("integer", "full-lattice sweeps")},
            {"--burn-in", option_doc("integer", "sweeps discarded before recording")},
            {"--thin", option_doc("integer", "record every thin-th sweep")},
            {"--seed", option_doc("integer", "random seed")},
            {"--out", option_doc("path", "NDJSON output (stdout when omitted)")}}}}},
        {"field-fit",
         {{"doc", "two-parameter fit of the binary lattice model"},
          {"options",
           {{"--field", option_doc("path", "field CSV", true)},
            {"--torus", option_doc("flag", "periodic boundary")},
            {"--objective", option_doc("string", "exact | conjectured | pseudo")},
            {"--strict", option_doc("flag", "exit 3 when the fit does not converge")},
            {"--out", option_doc("path", "result JSON (stdout when omitted)")}}}}},
        {"config-schema", {{"doc", "print this schema"}, {"options", json::object()}}}}},
      {"formats", {{"reference", "see FORMATS.md in the repository root"}}}};
  out << schema.dump(2) << "\n";
  return kOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditional-intensity likelihoods, simulation, and enumeration "
               "diagnostics for locally stable interaction models"};
  app.name("gibbslik");
  app.set_version_flag("--version", std::string(GIBBSLIK_VERSION));
  app.require_subcommand(0, 1);

  SimulateArgs sim;
  auto* sub_sim = app.add_subcommand("simulate", "Sample a model by birth-death MCMC");
  sub_sim->add_option("--model", sim.model_path, "Model JSON file")->required();
  sub_sim->add_option("--window", sim.window_path, "Window JSON file")->required();
  sub_sim->add_option("--out", sim.out_path, "Output NDJSON path (stdout when omitted)");
  add_mcmc_flags(sub_sim, sim.mc);

  FitArgs fit;
  auto* sub_fit = app.add_subcommand("fit", "Fit model parameters to a pattern");
  sub_fit->add_option("--model", fit.model_path, "Model JSON file (selects the family)")
      ->required();
  sub_fit->add_option("--pattern", fit.pattern_path, "Point pattern CSV")->required();
  sub_fit->add_option("--window", fit.window_path, "Window JSON file")->required();
  sub_fit->add_option("--objective", fit.objective, "exact | pseudo");
  sub_fit->add_option("--void", fit.void_mode, "conjecture | mc | oracle");
  sub_fit->add_option("--sites", fit.sites_path, "Site CSV for the oracle void mode");
  sub_fit->add_option("--resolution", fit.resolution, "Quadrature nodes per axis");
  sub_fit->add_flag("--strict", fit.strict, "Exit 3 when the fit does not converge");
  sub_fit->add_option("--out", fit.out_path, "Result JSON path (stdout when omitted)");
  add_mcmc_flags(sub_fit, fit.mc);

  VerifyArgs ver;
  auto* sub_ver = app.add_subcommand(
      "verify-conjecture", "Compare conjectured closed forms against exact or MCMC references");
  sub_ver->add_flag("--continuum", ver.continuum, "MCMC comparison on a continuum window");
  sub_ver->add_flag("--discrete", ver.discrete, "Exact enumeration on a finite site space");
  sub_ver->add_flag("--field", ver.field, "Exact enumeration of a binary lattice field");
  sub_ver->add_option("--model", ver.model_path, "Model JSON file");
  sub_ver->add_option("--window", ver.window_path, "Window JSON file");
  sub_ver->add_option("--sites", ver.sites_path, "Site CSV (discrete mode)");
  sub_ver->add_option("--lattice", ver.lattice_spec, "WIDTHxHEIGHT (discrete and field modes)");
  sub_ver->add_option("--spacing", ver.spacing, "Lattice spacing (discrete mode)");
  sub_ver->add_flag("--torus", ver.torus, "Periodic boundary (field mode)");
  sub_ver->add_option("--theta1", ver.theta1, "External field (field mode)");
  sub_ver->add_option("--theta2", ver.theta2, "Pair interaction (field mode)");
  sub_ver->add_option("--resolution", ver.resolution, "Quadrature nodes per axis (continuum)");
  sub_ver->add_option("--retention-cells", ver.retention_cells,
                      "Retention grid cells per axis, 0 = auto (continuum)");
  sub_ver->add_option("--beta-grid", ver.beta_grid, "Profile grid size (discrete mode)");
  sub_ver->add_option("--beta-lo", ver.beta_lo, "Profile grid lower end (discrete mode)");
  sub_ver->add_option("--beta-hi", ver.beta_hi, "Profile grid upper end (discrete mode)");
  sub_ver->add_option("--out", ver.out_path, "Report JSON path (stdout when omitted)");
  add_mcmc_flags(sub_ver, ver.mc);

  FieldSimArgs fsim;
  auto* sub_fsim = app.add_subcommand("field-sim", "Heat-bath sampling of the lattice model");
  sub_fsim->add_option("--lattice", fsim.lattice_spec, "WIDTHxHEIGHT")->required();
  sub_fsim->add_flag("--torus", fsim.torus, "Periodic boundary");
  sub_fsim->add_option("--theta1", fsim.theta1, "External field");
  sub_fsim->add_option("--theta2", fsim.theta2, "Pair interaction");
  sub_fsim->add_option("--sweeps", fsim.sweeps, "Full-lattice sweeps");
  sub_fsim->add_option("--burn-in", fsim.burn_in, "Sweeps discarded before recording");
  sub_fsim->add_option("--thin", fsim.thin, "Record every thin-th sweep");
  sub_fsim->add_option("--seed", fsim.seed, "Random seed");
  sub_fsim->add_option("--out", fsim.out_path, "Output NDJSON path (stdout when omitted)");

  FieldFitArgs ffit;
  auto* sub_ffit = app.add_subcommand("field-fit", "Fit the two lattice parameters");
  sub_ffit->add_option("--field", ffit.field_path, "Field CSV")->required();
  sub_ffit->add_flag("--torus", ffit.torus, "Periodic boundary");
  sub_ffit->add_option("--objective", ffit.objective, "exact | conjectured | pseudo");
  sub_ffit->add_flag("--strict", ffit.strict, "Exit 3 when the fit does not converge");
  sub_ffit->add_option("--out", ffit.out_path, "Result JSON path (stdout when omitted)");

  auto* sub_schema = app.add_subcommand("config-schema", "Print the configuration schema");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // Help and version requests carry exit code 0; anything else is a
    // configuration error.
    return app.exit(e, out, err) == 0 ? kOk : kConfigError;
  }

  if (sub_sim->parsed()) return cmd_simulate(sim, out, err);
  if (sub_fit->parsed()) return cmd_fit(fit, out, err);
  if (sub_ver->parsed()) return cmd_verify(ver, out, err);
  if (sub_fsim->parsed()) return cmd_field_sim(fsim, out, err);
  if (sub_ffit->parsed()) return cmd_field_fit(ffit, out, err);
  if (sub_schema->parsed()) return cmd_config_schema(out);
  out << app.help();
  return kOk;
}

}  // namespace gibbslik::cli
