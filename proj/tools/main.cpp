#include <algorithm>
#include <cctype>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "fgscan/error.hpp"
#include "report.hpp"

using namespace fgscan;
using namespace fgscan::cli;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io:
    case ErrorKind::data: return 1;
    case ErrorKind::usage: return 2;
    case ErrorKind::model: return 3;
  }
  return 1;
}

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::data: return "data";
    case ErrorKind::usage: return "usage";
    case ErrorKind::model: return "model";
  }
  return "unknown";
}

// Every long flag --foo-bar can also come from FGSCAN_FOO_BAR.
void add_env_names(CLI::App* app) {
  for (CLI::Option* opt : app->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help") continue;
    std::string env = "FGSCAN_" + names.front();
    std::transform(env.begin(), env.end(), env.begin(), [](unsigned char c) {
      return c == '-' ? '_' : static_cast<char>(std::toupper(c));
    });
    opt->envname(env);
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> echo(argv, argv + argc);
  CLI::App app{"Fine-Gray competing-risks regression with linear-time risk-set scans"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "simulate two-cause competing-risks data");
  s->add_option("--n", sim.n, "sample size")->required();
  s->add_option("--beta1", sim.beta1, "cause-1 coefficients, comma separated or @file")->required();
  s->add_option("--beta2", sim.beta2, "cause-2 coefficients, comma separated or @file")->required();
  s->add_option("--pi", sim.pi, "cause-1 mixture mass in (0, 1)")->capture_default_str();
  s->add_option("--umin", sim.umin, "censoring uniform lower bound")->capture_default_str();
  s->add_option("--umax", sim.umax, "censoring uniform upper bound")->capture_default_str();
  s->add_option("--rho", sim.rho, "AR(1) correlation of the covariates")->capture_default_str();
  s->add_option("--seed", sim.seed, "random seed")->capture_default_str();
  s->add_option("--out", sim.out, "dataset CSV to write")->required();
  s->add_option("--report", sim.report, "JSON report path (default: stdout)");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "unpenalized Fine-Gray regression");
  f->add_option("--data", fit.data, "dataset CSV (ftime,fstatus,z1..zp)")->required();
  f->add_flag("--variance", fit.variance, "bootstrap covariance, standard errors and intervals");
  f->add_option("--B", fit.replicates, "bootstrap replicates")->capture_default_str();
  f->add_option("--seed", fit.seed, "bootstrap master seed")->capture_default_str();
  f->add_option("--alpha", fit.alpha, "interval level is 1 - alpha")->capture_default_str();
  f->add_option("--tol", fit.tol, "convergence tolerance")->capture_default_str();
  f->add_option("--max-iter", fit.max_iter, "maximum sweeps")->capture_default_str();
  f->add_option("--engine", fit.engine, "scan or naive")->capture_default_str();
  f->add_option("--jobs", fit.jobs, "worker threads for the bootstrap")->capture_default_str();
  f->add_option("--out", fit.out, "JSON report path (default: stdout)");

  PenfitArgs pen;
  auto* p = app.add_subcommand("penfit", "penalized Fine-Gray regression over a lambda path");
  p->add_option("--data", pen.data, "dataset CSV")->required();
  p->add_option("--penalty", pen.penalty, "lasso, ridge, scad or mcp")->capture_default_str();
  p->add_option("--lambda-grid", pen.lambda_grid, "count:min:max on a log scale")->capture_default_str();
  p->add_option("--lambdas", pen.lambdas, "explicit lambda values (overrides --lambda-grid)");
  p->add_option("--gamma", pen.gamma, "SCAD/MCP concavity (default 3.7 / 3)");
  p->add_flag("--standardize", pen.standardize, "fit on unit-variance columns, report original scale");
  p->add_option("--tol", pen.tol, "convergence tolerance")->capture_default_str();
  p->add_option("--max-iter", pen.max_iter, "maximum sweeps per lambda")->capture_default_str();
  p->add_option("--engine", pen.engine, "scan or naive")->capture_default_str();
  p->add_option("--out", pen.out, "path CSV to write")->required();
  p->add_option("--report", pen.report, "JSON report path (default: stdout)");

  CifArgs cif;
  auto* c = app.add_subcommand("cif", "predicted cumulative incidence with bootstrap intervals");
  c->add_option("--data", cif.data, "dataset CSV")->required();
  c->add_option("--z0", cif.z0, "covariate profile, comma separated or @file")->required();
  c->add_option("--B", cif.replicates, "bootstrap replicates")->capture_default_str();
  c->add_option("--seed", cif.seed, "bootstrap master seed")->capture_default_str();
  c->add_option("--alpha", cif.alpha, "level is 1 - alpha")->capture_default_str();
  c->add_option("--tl", cif.tl, "lower end of the interval grid")->required();
  c->add_option("--tu", cif.tu, "upper end of the interval grid")->required();
  c->add_flag("--band", cif.band, "also compute the supremum confidence band");
  c->add_option("--jobs", cif.jobs, "worker threads")->capture_default_str();
  c->add_option("--out", cif.out, "curve CSV to write")->required();
  c->add_option("--svg", cif.svg, "SVG plot to write");
  c->add_option("--report", cif.report, "JSON report path (default: stdout)");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "fit timings across sample sizes");
  b->add_option("--sizes", bench.sizes, "comma separated sample sizes")->capture_default_str();
  b->add_option("--p", bench.p, "covariate count")->capture_default_str();
  b->add_option("--engine", bench.engine, "scan, naive or both")->capture_default_str();
  b->add_option("--replicates", bench.replicates, "timing repetitions (minimum is kept)")->capture_default_str();
  b->add_option("--seed", bench.seed, "data seed")->capture_default_str();
  b->add_flag("--force", bench.force, "allow the naive engine above its size cap");
  b->add_option("--jobs", bench.jobs, "accepted for symmetry; fits run sequentially")->capture_default_str();
  b->add_option("--out", bench.out, "timing CSV to write")->required();
  b->add_option("--report", bench.report, "JSON report path (default: stdout)");

  for (CLI::App* sub : {s, f, p, c, b}) add_env_names(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string command = "fgscan";
  try {
    if (s->parsed()) {
      command = "simulate";
      run_simulate(sim, echo);
    } else if (f->parsed()) {
      command = "fit";
      run_fit(fit, echo);
    } else if (p->parsed()) {
      command = "penfit";
      run_penfit(pen, echo);
    } else if (c->parsed()) {
      command = "cif";
      run_cif(cif, echo);
    } else if (b->parsed()) {
      command = "bench";
      run_bench(bench, echo);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    std::cout << error_body(command, kind_name(e.kind()), e.what()).dump(2) << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    std::cout << error_body(command, "internal", e.what()).dump(2) << '\n';
    return 1;
  }
  return 0;
}
