// kleinopt command line: benchmark runs of the three search procedures,
// the constrained semi-NMF fitter, and the property verification suites.
//
// Exit codes: 0 success, 1 verification failure, 2 input error, 3 config
// error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kleinopt/bench_runner.hpp"
#include "kleinopt/seminmf.hpp"
#include "kleinopt/trace_io.hpp"
#include "kleinopt/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitConfigError = 3;

struct BenchOptions {
  std::string geometry = "sphere";
  int n = 8;
  int k = 1;
  std::string objective = "rayleigh";
  std::string algorithm = "algebra";
  std::uint64_t seed = 1;
  std::int64_t max_evals = 20000;
  double s_fix = -1.0;       // negative = geometry default
  double s_max = -1.0;
  double radius_cap = -1.0;
  int replicates = 1;
  std::string out_dir;
  std::string config_file;
  std::string matrix_file;
};

struct SemiNmfOptions {
  std::string input;
  std::string synthetic;  // "n,m,k,eps,seed"
  int k = 3;
  double eps = M_PI / 4.0;
  int iters = 500;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string config_file;
};

// Config files are flat JSON objects mirroring the CLI flags; explicitly
// given flags win over file values.
void apply_config_file(const CLI::App* cmd, const std::string& path, BenchOptions& opt) {
  std::ifstream in(path);
  if (!in) throw kleinopt::IoError("cannot open config: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw kleinopt::IoError(path + ": invalid JSON: " + e.what());
  }
  auto overridden = [&](const std::string& flag) { return cmd->count(flag) > 0; };
  if (doc.contains("geometry") && !overridden("--geometry")) opt.geometry = doc["geometry"];
  if (doc.contains("n") && !overridden("--n")) opt.n = doc["n"];
  if (doc.contains("k") && !overridden("--k")) opt.k = doc["k"];
  if (doc.contains("objective") && !overridden("--objective")) opt.objective = doc["objective"];
  if (doc.contains("algorithm") && !overridden("--algorithm")) opt.algorithm = doc["algorithm"];
  if (doc.contains("seed") && !overridden("--seed")) opt.seed = doc["seed"];
  if (doc.contains("max_evals") && !overridden("--max-evals")) opt.max_evals = doc["max_evals"];
  if (doc.contains("s_fix") && !overridden("--s-fix")) opt.s_fix = doc["s_fix"];
  if (doc.contains("s_max") && !overridden("--s-max")) opt.s_max = doc["s_max"];
  if (doc.contains("radius_cap") && !overridden("--radius-cap")) opt.radius_cap = doc["radius_cap"];
  if (doc.contains("replicates") && !overridden("--replicates")) opt.replicates = doc["replicates"];
  if (doc.contains("out") && !overridden("--out")) opt.out_dir = doc["out"];
  if (doc.contains("matrix_file") && !overridden("--matrix-file")) opt.matrix_file = doc["matrix_file"];
}

void apply_config_file(const CLI::App* cmd, const std::string& path, SemiNmfOptions& opt) {
  std::ifstream in(path);
  if (!in) throw kleinopt::IoError("cannot open config: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw kleinopt::IoError(path + ": invalid JSON: " + e.what());
  }
  auto overridden = [&](const std::string& flag) { return cmd->count(flag) > 0; };
  if (doc.contains("input") && !overridden("--input")) opt.input = doc["input"];
  if (doc.contains("synthetic") && !overridden("--synthetic")) opt.synthetic = doc["synthetic"];
  if (doc.contains("k") && !overridden("--k")) opt.k = doc["k"];
  if (doc.contains("eps") && !overridden("--eps")) opt.eps = doc["eps"];
  if (doc.contains("iters") && !overridden("--iters")) opt.iters = doc["iters"];
  if (doc.contains("seed") && !overridden("--seed")) opt.seed = doc["seed"];
  if (doc.contains("out") && !overridden("--out")) opt.out_dir = doc["out"];
}

int run_bench(const CLI::App* cmd, BenchOptions opt) {
  if (!opt.config_file.empty()) apply_config_file(cmd, opt.config_file, opt);

  kleinopt::BenchmarkSpec spec;
  spec.geometry = opt.geometry;
  spec.n = opt.n;
  spec.k = opt.k;
  spec.objective = opt.objective;
  spec.algorithm = opt.algorithm;
  spec.replicates = opt.replicates;
  if (!opt.matrix_file.empty()) {
    spec.custom_matrix = opt.matrix_file.ends_with(".csv")
                             ? kleinopt::read_matrix_csv(opt.matrix_file)
                             : kleinopt::read_matrix_json(opt.matrix_file);
  }

  const kleinopt::KleinGeometry geometry =
      kleinopt::KleinGeometry::from_name(opt.geometry, opt.n, opt.k);
  spec.solver = kleinopt::default_solver_config(geometry);
  spec.solver.seed = opt.seed;
  spec.solver.max_evals = opt.max_evals;
  if (opt.s_fix > 0.0) spec.solver.s_fix = opt.s_fix;
  if (opt.s_max > 0.0) {
    spec.solver.s_max = opt.s_max;
    spec.solver.initial_step = std::min(spec.solver.initial_step, 0.5 * opt.s_max);
  }
  if (opt.radius_cap > 0.0) {
    spec.solver.radius_cap = opt.radius_cap;
    spec.solver.initial_step = std::min(spec.solver.initial_step, 0.5 * opt.radius_cap);
  }

  const std::vector<kleinopt::RunResult> results = kleinopt::run_benchmark(spec);

  nlohmann::json summary = nlohmann::json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const kleinopt::RunResult& r = results[i];
    std::printf("replicate %zu: seed=%llu f_best=%.10g oracle=%.10g gap=%.3g evals=%lld ms=%.1f\n",
                i, static_cast<unsigned long long>(r.seed), r.f_best, r.oracle, r.gap,
                static_cast<long long>(r.evals), r.wall_ms);
    summary.push_back({{"replicate", i},
                       {"seed", r.seed},
                       {"f_best", r.f_best},
                       {"oracle", r.oracle},
                       {"gap", r.gap},
                       {"evals", r.evals}});
    if (!opt.out_dir.empty()) {
      std::filesystem::create_directories(opt.out_dir);
      const std::string stem = opt.out_dir + "/" + opt.algorithm + "_rep" + std::to_string(i);
      kleinopt::write_trace_csv(stem + "_trace.csv", r.trace);
      kleinopt::write_point_json(stem + "_point.json", r.best);
    }
  }
  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    std::ofstream out(opt.out_dir + "/results.json", std::ios::binary);
    out << summary.dump(2) << "\n";
  }
  return kExitOk;
}

int run_seminmf(const CLI::App* cmd, SemiNmfOptions opt) {
  if (!opt.config_file.empty()) apply_config_file(cmd, opt.config_file, opt);

  kleinopt::Matrix x;
  if (!opt.synthetic.empty()) {
    int n = 0;
    int m = 0;
    int k = 0;
    double eps = 0.0;
    unsigned long long seed = 0;
    if (std::sscanf(opt.synthetic.c_str(), "%d,%d,%d,%lf,%llu", &n, &m, &k, &eps, &seed) != 5) {
      throw std::invalid_argument("--synthetic expects n,m,k,eps,seed");
    }
    kleinopt::RandomSource gen(seed);
    x = kleinopt::synthetic_seminmf(n, m, k, eps, gen).x;
    opt.k = k;
    opt.eps = eps;
  } else if (!opt.input.empty()) {
    x = opt.input.ends_with(".json") ? kleinopt::read_matrix_json(opt.input)
                                     : kleinopt::read_matrix_csv(opt.input);
  } else {
    throw std::invalid_argument("seminmf needs --input or --synthetic");
  }

  const kleinopt::DataMatrix data = kleinopt::DataMatrix::from(std::move(x));
  kleinopt::SemiNmfConfig cfg;
  cfg.rank = opt.k;
  cfg.spread_bound = opt.eps;
  cfg.max_iterations = opt.iters;
  cfg.seed = opt.seed;
  kleinopt::RandomSource rng(cfg.seed);
  const kleinopt::SemiNmfResult result = kleinopt::fit(data, cfg, rng);

  const double rel = std::sqrt(result.factorization.fit_error) / data.x.norm();
  std::printf("final fit error: %.10g (relative %.4g)\n", result.factorization.fit_error, rel);
  std::printf("final spread S(W): %.10g (bound %.10g)\n", result.factorization.spread,
              cfg.spread_bound);

  std::filesystem::create_directories(opt.out_dir);
  kleinopt::write_matrix_json(opt.out_dir + "/W.json", result.factorization.w);
  kleinopt::write_matrix_json(opt.out_dir + "/H.json", result.factorization.h);
  kleinopt::write_seminmf_trace_csv(opt.out_dir + "/trace.csv", result.trace);
  return kExitOk;
}

int run_verify(const std::string& suite) {
  const std::vector<kleinopt::CheckResult> results = kleinopt::verify_suite(suite);
  for (const kleinopt::CheckResult& check : results) {
    std::printf("%s  %-55s residual=%.3e threshold=%.3e\n", check.pass ? "PASS" : "FAIL",
                check.name.c_str(), check.residual, check.threshold);
  }
  const bool ok = kleinopt::all_passed(results);
  std::printf("%s: %zu checks, %s\n", suite.c_str(), results.size(), ok ? "all passed" : "FAILURES");
  return ok ? kExitOk : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free optimization on matrix manifolds"};
  app.require_subcommand(1);

  BenchOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run a benchmark problem");
  bench_cmd->add_option("--geometry", bench.geometry,
                        "grassmann|stiefel|so|se|spd|sl|glplus|unipotent|translation|sphere");
  bench_cmd->add_option("--n", bench.n, "ambient dimension");
  bench_cmd->add_option("--k", bench.k, "subspace dimension (grassmann/stiefel)");
  bench_cmd->add_option("--objective", bench.objective,
                        "rayleigh|procrustes|nearest_spd|quadratic|custom");
  bench_cmd->add_option("--algorithm", bench.algorithm, "algebra|group|wrapper");
  bench_cmd->add_option("--seed", bench.seed, "base seed");
  bench_cmd->add_option("--max-evals", bench.max_evals, "evaluation budget");
  bench_cmd->add_option("--s-fix", bench.s_fix, "annulus inner radius");
  bench_cmd->add_option("--s-max", bench.s_max, "annulus outer radius");
  bench_cmd->add_option("--radius-cap", bench.radius_cap, "group generator cap R");
  bench_cmd->add_option("--replicates", bench.replicates, "replicate count");
  bench_cmd->add_option("--out", bench.out_dir, "output directory");
  bench_cmd->add_option("--config", bench.config_file, "JSON config file");
  bench_cmd->add_option("--matrix-file", bench.matrix_file, "matrix for custom objectives");

  SemiNmfOptions nmf;
  CLI::App* nmf_cmd = app.add_subcommand("seminmf", "Fit a spread-constrained semi-NMF");
  nmf_cmd->add_option("--input", nmf.input, "data matrix (csv or json)");
  nmf_cmd->add_option("--synthetic", nmf.synthetic, "generate data: n,m,k,eps,seed");
  nmf_cmd->add_option("--k", nmf.k, "factorization rank");
  nmf_cmd->add_option("--eps", nmf.eps, "spread bound in radians");
  nmf_cmd->add_option("--iters", nmf.iters, "iteration count");
  nmf_cmd->add_option("--seed", nmf.seed, "seed");
  nmf_cmd->add_option("--out", nmf.out_dir, "output directory");
  nmf_cmd->add_option("--config", nmf.config_file, "JSON config file");

  std::string suite = "all";
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run property suites");
  verify_cmd->add_option("suite", suite, "kernels|manifolds|generators|solvers|seminmf|all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (bench_cmd->parsed()) return run_bench(bench_cmd, bench);
    if (nmf_cmd->parsed()) return run_seminmf(nmf_cmd, nmf);
    if (verify_cmd->parsed()) return run_verify(suite);
  } catch (const kleinopt::IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFailure;
  }
  return kExitConfigError;
}
