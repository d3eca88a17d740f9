// qbt: verify boundary-triple identities on discretized elliptic models.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage or config error.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbt/analysis.hpp"
#include "qbt/config.hpp"
#include "qbt/error.hpp"
#include "qbt/report.hpp"

namespace {

using nlohmann::json;
using namespace qbt;

struct Options {
  std::string model;
  std::string pair = "dn";
  int m = 1;
  std::vector<std::string> lambdas;
  int levels = 3;
  bool levels_given = false;
  long samples = 32;
  std::optional<double> tol;
  std::uint64_t seed = 1;
  std::string out;
  bool record_time = false;
};

bool usage_like(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::UsageError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DegenerateGrid:
    case ErrorCode::EllipticityViolated:
    case ErrorCode::NotSelfAdjoint:
      return true;
    default:
      return false;
  }
}

std::vector<Complex> lambdas_of(const Options& o, const ModelConfig& cfg) {
  std::vector<Complex> out;
  for (const auto& s : o.lambdas) out.push_back(parse_complex(s));
  if (out.empty()) out = cfg.lambdas;
  if (out.empty()) throw Error(ErrorCode::UsageError, "no λ given (--lambda or config lambda)");
  return out;
}

std::string csv_path(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension(".csv");
  return p.string();
}

int run(const std::string& command, const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  if (o.model.empty()) throw Error(ErrorCode::UsageError, "--model is required");
  if (o.m < 1) throw Error(ErrorCode::UsageError, "--m must be ≥ 1");
  if (o.samples < 1) throw Error(ErrorCode::UsageError, "--samples must be ≥ 1");
  if (o.levels < 2) throw Error(ErrorCode::UsageError, "--levels must be ≥ 2");
  const Pair pair = parse_pair(o.pair);

  const ModelConfig cfg = load_model_config(o.model);
  RunManifest manifest{command, o.model, cfg, o.seed, {}, std::nullopt};
  json results = json::array();
  bool pass = true;
  std::optional<DecayReport> decay;

  const bool all = command == "all";
  std::optional<Problem> problem;
  auto get_problem = [&]() -> const Problem& {
    if (!problem) problem = make_problem(build_model(cfg));
    return *problem;
  };

  if (command == "green" || all) {
    const auto r = green_check(get_problem().model, static_cast<std::size_t>(o.samples),
                               all ? 1e-12 : o.tol.value_or(1e-12), o.seed);
    results.push_back(to_json(r));
    pass = pass && r.pass;
  }
  if (command == "krein" || all) {
    for (Complex lam : lambdas_of(o, cfg)) {
      const auto r = krein_check(get_problem(), lam, all ? 1e-10 : o.tol.value_or(1e-10));
      results.push_back(to_json(r));
      pass = pass && r.pass;
    }
  }
  if (command == "trace" || all) {
    const double tol = all ? 1e-8 : o.tol.value_or(1e-8);
    std::vector<Pair> pairs = {pair};
    if (all) pairs = {Pair::DN, Pair::RN, Pair::RR, Pair::RD};
    for (Complex lam : lambdas_of(o, cfg)) {
      for (Pair p : pairs) {
        const auto r = trace_formula_check(get_problem(), p, o.m, lam);
        results.push_back(to_json(r, tol));
        pass = pass && r.rel_discrepancy <= tol;
      }
    }
  }
  if (command == "decay" || (all && o.levels_given)) {
    std::vector<Complex> lams;
    for (const auto& s : o.lambdas) lams.push_back(parse_complex(s));
    if (lams.empty()) lams = cfg.lambdas;
    const Complex lam = lams.empty() ? Complex(-1.0) : lams.front();
    DecayOptions opt;
    if (!all && o.tol) opt.band = *o.tol;
    decay = singular_value_ladder(cfg, pair, o.m, lam, o.levels, opt);
    results.push_back(to_json(*decay));
    pass = pass && decay->applicable && decay->monotone;
  }

  if (!o.out.empty()) {
    manifest.outputs.push_back(o.out);
    if (decay) manifest.outputs.push_back(csv_path(o.out));
  }
  if (o.record_time) {
    manifest.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  const json doc = {{"manifest", to_json(manifest)}, {"results", results}, {"pass", pass}};
  if (o.out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::ofstream f(o.out);
    if (!f) throw Error(ErrorCode::UsageError, "cannot write " + o.out);
    f << doc.dump(2) << '\n';
    if (decay) {
      std::ofstream c(csv_path(o.out));
      if (!c) throw Error(ErrorCode::UsageError, "cannot write " + csv_path(o.out));
      write_decay_csv(*decay, c);
    }
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-triple verification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--model", o.model, "model config file");
  app.add_option("--pair", o.pair, "dn | rn | rr | rd");
  app.add_option("--m", o.m, "resolvent power");
  app.add_option("--lambda", o.lambdas, "spectral parameter re,im (repeatable)")->allow_extra_args(false);
  auto* lv = app.add_option("--levels", o.levels, "ladder levels");
  app.add_option("--samples", o.samples, "random samples for the Green check");
  app.add_option("--tol", o.tol, "tolerance (decay: convergence band)");
  app.add_option("--seed", o.seed, "seed for randomized checks");
  app.add_option("--out", o.out, "report path (decay also writes a .csv next to it)");
  app.add_flag("--record-time", o.record_time, "include wall time in the manifest");
  for (const char* name : {"green", "krein", "trace", "decay", "all"}) {
    app.add_subcommand(name, std::string("run the ") + name + " check");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  o.levels_given = lv->count() > 0;
  try {
    return run(app.get_subcommands().front()->get_name(), o);
  } catch (const Error& e) {
    std::cerr << "qbt: " << e.what() << '\n';
    return usage_like(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "qbt: " << e.what() << '\n';
    return 1;
  }
}
