#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "gibbslik/cli.hpp"

using namespace gibbslik;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = cli::dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  REQUIRE(f.good());
  f << text;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

const std::string kDir = "/tmp/gibbslik_cli_";

struct Fixture {
  std::string model_poisson = kDir + "poisson.json";
  std::string model_strauss = kDir + "strauss.json";
  std::string window = kDir + "window.json";
  std::string pattern = kDir + "pattern.csv";

  Fixture() {
    write_text(model_poisson, R"({"family": "poisson", "beta": 30.0})");
    write_text(model_strauss, R"({"family": "strauss", "beta": 2.0, "gamma": 0.5, "R": 1.5})");
    write_text(window, R"({"lower": [0.0, 0.0], "upper": [1.0, 1.0]})");
    write_text(pattern, "x,y\n0.1,0.2\n0.4,0.9\n0.8,0.3\n0.5,0.55\n0.25,0.7\n");
  }
};

double entry_value(const json& doc, const std::string& name) {
  for (const auto& e : doc.at("entries"))
    if (e.at("name") == name) return e.at("value").get<double>();
  FAIL("missing entry " << name);
  return 0.0;
}

}  // namespace

TEST_CASE("schema, version, and help all succeed") {
  RunResult schema = run({"config-schema"});
  CHECK(schema.code == cli::kOk);
  json j = json::parse(schema.out);
  CHECK(j.at("tool") == "gibbslik");
  CHECK(j.at("exit_codes").contains("4"));
  CHECK(j.at("subcommands").contains("fit"));
  CHECK(j.at("energy_zero_convention") == "E(empty)=0");

  RunResult version = run({"--version"});
  CHECK(version.code == cli::kOk);
  CHECK(version.out.find("0.1.0") != std::string::npos);

  CHECK(run({"--help"}).code == cli::kOk);
  CHECK(run({"fit", "--help"}).code == cli::kOk);
  CHECK(run({}).code == cli::kOk);  // bare invocation prints help

  CHECK(run({"no-such-command"}).code == cli::kConfigError);
  CHECK(run({"fit", "--bogus-flag"}).code == cli::kConfigError);
}

TEST_CASE("simulate writes reproducible sample streams") {
  Fixture fx;
  std::string out1 = kDir + "sim1.ndjson";
  std::string out2 = kDir + "sim2.ndjson";
  std::vector<std::string> base{"simulate", "--model", fx.model_poisson,
                                "--window", fx.window,  "--steps",
                                "3000",     "--burn-in", "500",
                                "--thin",   "5",        "--seed",
                                "9"};
  auto with_out = [&](const std::string& path) {
    auto v = base;
    v.push_back("--out");
    v.push_back(path);
    return v;
  };
  RunResult r1 = run(with_out(out1));
  REQUIRE(r1.code == cli::kOk);
  RunResult r2 = run(with_out(out2));
  REQUIRE(r2.code == cli::kOk);
  CHECK(slurp(out1) == slurp(out2));  // byte-identical under the same seed

  std::istringstream lines(slurp(out1));
  std::string first;
  REQUIRE(std::getline(lines, first));
  json meta = json::parse(first);
  CHECK(meta.at("tool") == "gibbslik");
  CHECK(meta.at("command") == "simulate");
  CHECK(meta.at("seed") == 9);
  CHECK(meta.at("acceptance_rate").get<double>() > 0.0);
  std::size_t n_samples = meta.at("samples").get<std::size_t>();
  CHECK(n_samples == 500);
  std::size_t n_lines = 0;
  std::string line;
  while (std::getline(lines, line)) {
    json sample = json::parse(line);
    REQUIRE(sample.is_array());
    for (const auto& p : sample) {
      REQUIRE(p.size() == 2);
      CHECK(p[0].get<double>() >= 0.0);
      CHECK(p[0].get<double>() <= 1.0);
    }
    ++n_lines;
  }
  CHECK(n_lines == n_samples);

  // a different seed must change the stream
  auto other = with_out(out2);
  other[other.size() - 3] = "10";  // --seed value
  REQUIRE(run(other).code == cli::kOk);
  CHECK(slurp(out1) != slurp(out2));

  std::remove(out1.c_str());
  std::remove(out2.c_str());
}

TEST_CASE("fit recovers the count estimator end to end") {
  Fixture fx;
  std::string out = kDir + "fit.json";
  RunResult r = run({"fit", "--model", fx.model_poisson, "--pattern", fx.pattern,
                     "--window", fx.window, "--out", out});
  REQUIRE(r.code == cli::kOk);
  json doc = json::parse(slurp(out));
  CHECK(doc.at("family") == "poisson");
  CHECK(doc.at("n_points") == 5);
  CHECK(doc.at("converged") == true);
  CHECK(doc.at("theta_hat").at("beta").get<double>() == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(doc.at("command") == "fit");
  std::remove(out.c_str());
}

TEST_CASE("fit rejects malformed configuration") {
  Fixture fx;
  RunResult bad_obj = run({"fit", "--model", fx.model_poisson, "--pattern", fx.pattern,
                           "--window", fx.window, "--objective", "bogus"});
  CHECK(bad_obj.code == cli::kConfigError);
  CHECK(bad_obj.err.find("objective") != std::string::npos);

  RunResult missing = run({"fit", "--model", kDir + "nope.json", "--pattern", fx.pattern,
                           "--window", fx.window});
  CHECK(missing.code == cli::kConfigError);
  CHECK_FALSE(missing.err.empty());

  std::string bad_model = kDir + "bad_model.json";
  write_text(bad_model, R"({"family": "geyer", "beta": 1.0})");
  RunResult fam = run({"fit", "--model", bad_model, "--pattern", fx.pattern,
                       "--window", fx.window});
  CHECK(fam.code == cli::kConfigError);
  CHECK(fam.err.find("geyer") != std::string::npos);
  std::remove(bad_model.c_str());

  RunResult oracle = run({"fit", "--model", fx.model_poisson, "--pattern", fx.pattern,
                          "--window", fx.window, "--void", "oracle"});
  CHECK(oracle.code == cli::kConfigError);
  CHECK(oracle.err.find("--sites") != std::string::npos);

  // pattern outside the window is a strict configuration error
  std::string outside = kDir + "outside.csv";
  write_text(outside, "x,y\n2.0,0.5\n");
  RunResult oob = run({"fit", "--model", fx.model_poisson, "--pattern", outside,
                       "--window", fx.window});
  CHECK(oob.code == cli::kConfigError);
  std::remove(outside.c_str());
}

TEST_CASE("discrete verification reports enumeration entries") {
  Fixture fx;
  std::string out = kDir + "verify_discrete.json";
  RunResult r = run({"verify-conjecture", "--discrete", "--model", fx.model_strauss,
                     "--lattice", "2x2", "--beta-grid", "51", "--out", out});
  REQUIRE(r.code == cli::kOk);
  json doc = json::parse(slurp(out));
  CHECK(doc.at("k") == 4);
  CHECK(doc.contains("argmax_data_mask"));
  CHECK(entry_value(doc, "void_exact") > 0.0);
  CHECK(entry_value(doc, "void_conjectured") > 0.0);
  CHECK(entry_value(doc, "loglik_abs_error_max") >= 0.0);
  std::remove(out.c_str());

  RunResult guard = run({"verify-conjecture", "--discrete", "--model", fx.model_strauss,
                         "--lattice", "26x1"});
  CHECK(guard.code == cli::kResourceGuard);
  CHECK(guard.err.find("26") != std::string::npos);

  RunResult both = run({"verify-conjecture", "--discrete", "--field", "--model",
                        fx.model_strauss, "--lattice", "2x2"});
  CHECK(both.code == cli::kConfigError);

  RunResult neither = run({"verify-conjecture"});
  CHECK(neither.code == cli::kConfigError);
}

TEST_CASE("field verification matches the frozen partition value") {
  std::string out = kDir + "verify_field.json";
  RunResult r = run({"verify-conjecture", "--field", "--lattice", "2x2", "--theta1", "0.3",
                     "--theta2", "0.2", "--out", out});
  REQUIRE(r.code == cli::kOk);
  json doc = json::parse(slurp(out));
  CHECK(doc.at("k") == 4);
  CHECK(entry_value(doc, "log_partition_exact") ==
        doctest::Approx(2.847253192315831).epsilon(1e-12));
  std::remove(out.c_str());
}

TEST_CASE("continuum verification produces finite monte carlo entries") {
  Fixture fx;
  std::string out = kDir + "verify_continuum.json";
  RunResult r = run({"verify-conjecture", "--continuum", "--model", fx.model_poisson,
                     "--window", fx.window, "--steps", "6000", "--burn-in", "1000",
                     "--thin", "5", "--seed", "3", "--out", out});
  REQUIRE(r.code == cli::kOk);
  json doc = json::parse(slurp(out));
  CHECK(doc.at("void_mode") == "mc");
  CHECK(entry_value(doc, "void_mc") >= 0.0);
  CHECK(entry_value(doc, "void_mc_se") > 0.0);
  CHECK(entry_value(doc, "intensity_global_mc") > 0.0);
  CHECK(entry_value(doc, "local_stability_bound") == doctest::Approx(30.0));
  CHECK(entry_value(doc, "retention_cells_with_estimates") >= 1.0);
  std::remove(out.c_str());
}

TEST_CASE("field simulation streams reproducible 0/1 rows") {
  std::string out1 = kDir + "fsim1.ndjson";
  std::string out2 = kDir + "fsim2.ndjson";
  std::vector<std::string> base{"field-sim", "--lattice", "3x3",    "--theta1", "0.2",
                                "--theta2",  "0.1",       "--sweeps", "50",     "--burn-in",
                                "10",        "--seed",    "4"};
  auto with_out = [&](const std::string& p) {
    auto v = base;
    v.push_back("--out");
    v.push_back(p);
    return v;
  };
  REQUIRE(run(with_out(out1)).code == cli::kOk);
  REQUIRE(run(with_out(out2)).code == cli::kOk);
  CHECK(slurp(out1) == slurp(out2));

  std::istringstream lines(slurp(out1));
  std::string first;
  REQUIRE(std::getline(lines, first));
  json meta = json::parse(first);
  CHECK(meta.at("command") == "field-sim");
  CHECK(meta.at("samples") == 40);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    json row = json::parse(line);
    REQUIRE(row.size() == 9);
    for (const auto& v : row) CHECK((v == 0 || v == 1));
    ++n;
  }
  CHECK(n == 40);
  std::remove(out1.c_str());
  std::remove(out2.c_str());
}

TEST_CASE("field fit runs for every objective and guards enumeration") {
  std::string field3 = kDir + "field3.csv";
  write_text(field3, "1,0,1\n0,1,0\n0,0,1\n");
  for (const std::string& obj : {"exact", "conjectured", "pseudo"}) {
    std::string out = kDir + "ffit.json";
    RunResult r = run({"field-fit", "--field", field3, "--objective", obj, "--out", out});
    REQUIRE(r.code == cli::kOk);
    json doc = json::parse(slurp(out));
    CHECK(doc.at("converged") == true);
    CHECK(doc.at("objective") == (obj == "conjectured" ? "conjectured" : obj));
    CHECK(doc.at("theta_hat").contains("theta1"));
    std::remove(out.c_str());
  }

  CHECK(run({"field-fit", "--field", field3, "--objective", "bogus"}).code ==
        cli::kConfigError);

  std::string field5 = kDir + "field5.csv";
  std::string row = "1,0,1,0,1\n";
  write_text(field5, row + row + row + row + row);
  CHECK(run({"field-fit", "--field", field5, "--objective", "exact"}).code ==
        cli::kResourceGuard);
  CHECK(run({"field-fit", "--field", field5, "--objective", "pseudo"}).code == cli::kOk);

  std::remove(field3.c_str());
  std::remove(field5.c_str());
}
