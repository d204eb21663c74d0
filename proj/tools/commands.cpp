#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "fgscan/bootstrap.hpp"
#include "fgscan/cif.hpp"
#include "fgscan/error.hpp"
#include "fgscan/fit.hpp"
#include "fgscan/penalized.hpp"
#include "fgscan/simulate.hpp"
#include "report.hpp"
#include "svg.hpp"

namespace fgscan::cli {

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

Json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) rows.push_back(to_json(Eigen::VectorXd(m.row(r).transpose())));
  return rows;
}

Engine parse_engine(const std::string& name) {
  if (name == "scan") return Engine::scan;
  if (name == "naive") return Engine::naive;
  fail(ErrorKind::usage, "unknown engine '" + name + "' (expected scan or naive)");
}

Json counts_json(const StatusCounts& c) {
  return {{"censored", c.censored}, {"cause1", c.cause1}, {"cause2", c.cause2}};
}

const Eigen::VectorXd& reference_block() {
  static const Eigen::VectorXd b =
      (Eigen::VectorXd(10) << 0.40, -0.40, 0, -0.50, 0, 0.60, 0.75, 0, 0, -0.80).finished();
  return b;
}

}  // namespace

void run_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  RunReport report("simulate", argv);
  SimConfig cfg;
  cfg.n = a.n;
  cfg.beta1 = to_eigen(parse_vector(a.beta1, "--beta1"));
  cfg.beta2 = to_eigen(parse_vector(a.beta2, "--beta2"));
  cfg.pi = a.pi;
  cfg.u_min = a.umin;
  cfg.u_max = a.umax;
  cfg.rho = a.rho;
  cfg.seed = a.seed;
  report.set_seed("seed", a.seed);
  const Simulation sim = report.timed("simulate", [&] { return simulate(cfg); });
  report.timed("write", [&] { write_csv(sim.data, a.out, RowOrder::input); });
  report.set_input(sim.data, a.out.string());
  Json& r = report.result();
  r["output"] = a.out.string();
  r["status_counts"] = counts_json(sim.report.counts);
  r["clamped"] = sim.report.clamped;
  r["config"] = {{"n", cfg.n},        {"beta1", to_json(cfg.beta1)}, {"beta2", to_json(cfg.beta2)},
                 {"pi", cfg.pi},      {"umin", cfg.u_min},           {"umax", cfg.u_max},
                 {"rho", cfg.rho},    {"seed", cfg.seed}};
  if (sim.report.clamped > 0) {
    report.add_warning(std::to_string(sim.report.clamped) + " linear predictors clamped to |eta| <= 30");
  }
  report.write(a.report);
}

void run_fit(const FitArgs& a, const std::vector<std::string>& argv) {
  RunReport report("fit", argv);
  const Dataset ds = report.timed("load", [&] { return load_csv(a.data); });
  report.set_input(ds, a.data.string());
  FitOptions opts;
  opts.tolerance = a.tol;
  opts.max_iter = a.max_iter;
  opts.engine = parse_engine(a.engine);
  if (!(a.alpha > 0.0 && a.alpha <= 1.0)) fail(ErrorKind::usage, "--alpha must lie in (0, 1]");

  const WeightSet w = report.timed("weights", [&] { return precompute_weights(ds); });
  FitResult fit = report.timed("fit", [&] { return fit_unpenalized(ds, w, opts); });
  if (!fit.converged) report.add_warning("fit did not converge in " + std::to_string(opts.max_iter) + " sweeps");

  std::optional<CovarianceEstimate> cov;
  if (a.variance) {
    BootstrapControl control;
    control.replicates = a.replicates;
    control.seed = a.seed;
    control.jobs = a.jobs;
    report.set_seed("bootstrap", a.seed);
    cov = report.timed("bootstrap", [&] { return bootstrap_covariance(ds, control, opts, fit.coefficients); });
    fit.covariance = cov->matrix;
    if (cov->skipped > 0) report.add_warning(std::to_string(cov->skipped) + " bootstrap replicates skipped");
  }

  Json& r = report.result();
  r["converged"] = fit.converged;
  r["iterations"] = fit.iterations;
  r["loglik"] = fit.loglik;
  r["null_loglik"] = fit.null_loglik;
  r["alpha"] = a.alpha;
  Json table = Json::array();
  for (const SummaryRow& row : summarize(fit, a.alpha)) {
    Json j{{"name", row.name}, {"coef", row.coef}, {"exp_coef", row.exp_coef}};
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    j["se"] = opt(row.se);
    j["z"] = opt(row.z);
    j["p_value"] = opt(row.p_value);
    j["lower"] = opt(row.lower);
    j["upper"] = opt(row.upper);
    table.push_back(std::move(j));
  }
  r["coefficients"] = std::move(table);
  if (cov) {
    r["covariance"] = to_json(cov->matrix);
    r["bootstrap"] = {{"replicates", a.replicates},
                      {"used", cov->replicate_coefs.rows()},
                      {"skipped", cov->skipped},
                      {"seed", a.seed}};
  }
  report.write(a.out);
}

namespace {

std::vector<double> lambda_grid(const PenfitArgs& a) {
  if (!a.lambdas.empty()) {
    auto grid = parse_vector(a.lambdas, "--lambdas");
    std::sort(grid.begin(), grid.end(), std::greater<>());
    return grid;
  }
  std::vector<std::string> parts;
  std::stringstream ss(a.lambda_grid);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) fail(ErrorKind::usage, "--lambda-grid expects count:min:max, got '" + a.lambda_grid + "'");
  int count = 0;
  double lo = 0.0, hi = 0.0;
  try {
    std::size_t used = 0;
    count = std::stoi(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("count");
    lo = std::stod(parts[1]);
    hi = std::stod(parts[2]);
  } catch (const std::exception&) {
    fail(ErrorKind::usage, "--lambda-grid expects count:min:max, got '" + a.lambda_grid + "'");
  }
  return log_grid(count, lo, hi);
}

}  // namespace

void run_penfit(const PenfitArgs& a, const std::vector<std::string>& argv) {
  RunReport report("penfit", argv);
  const PenaltyKind kind = parse_penalty(a.penalty);
  PenaltySpec{kind, 0.0, a.gamma}.validate();
  const std::vector<double> grid = lambda_grid(a);
  const Dataset raw = report.timed("load", [&] { return load_csv(a.data); });
  report.set_input(raw, a.data.string());

  PathOptions opts;
  opts.tolerance = a.tol;
  opts.max_iter = a.max_iter;
  opts.engine = parse_engine(a.engine);

  Eigen::VectorXd scale = Eigen::VectorXd::Ones(raw.dim());
  std::optional<Dataset> standardized;
  if (a.standardize) {
    Standardized st = standardize_columns(raw);
    scale = st.scale;
    standardized = std::move(st.data);
  }
  const Dataset& ds = standardized ? *standardized : raw;
  const PenalizedPath path = report.timed("path", [&] { return fit_path(ds, kind, a.gamma, grid, opts); });
  // Back to the original covariate scale.
  const Eigen::MatrixXd coefs = scale.cwiseInverse().asDiagonal() * path.coefficients;

  std::ostringstream csv;
  csv << "lambda";
  for (const auto& name : path.names) csv << ",coef_" << name;
  csv << ",df,bic,loglik\n";
  for (std::size_t t = 0; t < grid.size(); ++t) {
    csv << format_double(grid[t]);
    for (Index j = 0; j < coefs.rows(); ++j) csv << ',' << format_double(coefs(j, static_cast<Index>(t)));
    csv << ',' << path.df[t] << ',' << format_double(path.bic[t]) << ',' << format_double(path.loglik[t]) << '\n';
  }
  report.timed("write", [&] { write_text(a.out, csv.str()); });

  int unconverged = 0;
  for (const bool c : path.converged) unconverged += c ? 0 : 1;
  if (unconverged > 0) report.add_warning(std::to_string(unconverged) + " lambda values did not converge");

  const auto sel = static_cast<std::size_t>(path.selected);
  Json& r = report.result();
  r["penalty"] = std::string(penalty_name(kind));
  r["gamma"] = (kind == PenaltyKind::scad || kind == PenaltyKind::mcp) ? Json(path.gamma) : Json(nullptr);
  r["standardized"] = a.standardize;
  r["lambdas"] = grid;
  r["output"] = a.out.string();
  r["selected"] = {{"index", path.selected},
                   {"lambda", grid[sel]},
                   {"df", path.df[sel]},
                   {"bic", path.bic[sel]},
                   {"loglik", path.loglik[sel]},
                   {"coefficients", to_json(Eigen::VectorXd(coefs.col(path.selected)))},
                   {"names", path.names}};
  report.write(a.report);
}

void run_cif(const CifArgs& a, const std::vector<std::string>& argv) {
  RunReport report("cif", argv);
  const Dataset ds = report.timed("load", [&] { return load_csv(a.data); });
  report.set_input(ds, a.data.string());
  const Eigen::VectorXd z0 = to_eigen(parse_vector(a.z0, "--z0"));
  if (z0.size() != ds.dim()) {
    fail(ErrorKind::usage, "--z0 has " + std::to_string(z0.size()) + " values, data has " +
                               std::to_string(ds.dim()) + " covariates");
  }
  CifBootstrapOptions opts;
  opts.control.replicates = a.replicates;
  opts.control.seed = a.seed;
  opts.control.jobs = a.jobs;
  opts.alpha = a.alpha;
  opts.t_lower = a.tl;
  opts.t_upper = a.tu;
  opts.band = a.band;
  report.set_seed("bootstrap", a.seed);
  const CifEstimate cif = report.timed("bootstrap", [&] { return cif_bootstrap(ds, z0, opts); });

  std::ostringstream csv;
  write_cif_csv(cif, csv);
  report.timed("write", [&] {
    write_text(a.out, csv.str());
    if (a.svg) write_text(*a.svg, cif_svg(cif, a.alpha));
  });
  if (cif.grid.size() < static_cast<std::size_t>(std::count_if(cif.times.begin(), cif.times.end(), [&](double t) {
        return t >= a.tl && t <= a.tu;
      }))) {
    report.add_warning("grid points with an estimate of 0 or 1 were dropped");
  }

  Json& r = report.result();
  r["z0"] = to_json(z0);
  r["alpha"] = a.alpha;
  r["interval"] = {{"t_lower", a.tl}, {"t_upper", a.tu}};
  r["transform"] = cif.transform;
  r["grid_points"] = cif.grid.size();
  r["critical_value"] = cif.critical_value ? Json(*cif.critical_value) : Json(nullptr);
  r["replicates"] = {{"requested", a.replicates}, {"used", cif.replicates_used}, {"skipped", cif.replicates_skipped}};
  r["output"] = a.out.string();
  r["svg"] = a.svg ? Json(a.svg->string()) : Json(nullptr);
  report.write(a.report);
}

void run_bench(const BenchArgs& a, const std::vector<std::string>& argv) {
  RunReport report("bench", argv);
  std::vector<Index> sizes;
  for (const double s : parse_vector(a.sizes, "--sizes")) {
    if (!(s >= 2) || s != std::floor(s)) fail(ErrorKind::usage, "--sizes must be integers >= 2");
    sizes.push_back(static_cast<Index>(s));
  }
  if (a.p < 1) fail(ErrorKind::usage, "--p must be at least 1");
  if (a.replicates < 1) fail(ErrorKind::usage, "--replicates must be at least 1");
  std::vector<Engine> engines;
  if (a.engine == "scan" || a.engine == "both") engines.push_back(Engine::scan);
  if (a.engine == "naive" || a.engine == "both") engines.push_back(Engine::naive);
  if (engines.empty()) fail(ErrorKind::usage, "--engine must be scan, naive or both");
  const Index largest = *std::max_element(sizes.begin(), sizes.end());
  const bool naive = std::find(engines.begin(), engines.end(), Engine::naive) != engines.end();
  if (naive && largest > kBruteForceCap && !a.force) {
    fail(ErrorKind::usage, "naive engine refused for n = " + std::to_string(largest) + " (cap " +
                               std::to_string(kBruteForceCap) + "); pass --force to run it");
  }

  // beta1 = (reference block, zeros), beta2 = -beta1, AR(1) rho = 0.5.
  SimConfig cfg;
  cfg.beta1 = Eigen::VectorXd::Zero(a.p);
  const Index head = std::min<Index>(a.p, 10);
  cfg.beta1.head(head) = reference_block().head(head);
  cfg.beta2 = -cfg.beta1;
  cfg.rho = 0.5;
  cfg.u_max = 1.75;
  report.set_seed("seed", a.seed);

  std::ostringstream csv;
  csv << "n,p,engine,seconds,iterations,converged\n";
  Json rows = Json::array();
  for (const Index n : sizes) {
    cfg.n = n;
    cfg.seed = derive_seed(a.seed, static_cast<std::uint64_t>(n));
    const Dataset ds = simulate(cfg).data;
    const WeightSet w = precompute_weights(ds);
    std::vector<Eigen::VectorXd> coefs;
    Json row{{"n", n}};
    for (const Engine engine : engines) {
      FitOptions opts;
      opts.engine = engine;
      opts.naive_cap = std::max(largest, kBruteForceCap);
      double best = INFINITY;
      FitResult fit;
      for (int r = 0; r < a.replicates; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fit = fit_unpenalized(ds, w, opts);
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      }
      const std::string name = engine == Engine::scan ? "scan" : "naive";
      csv << n << ',' << a.p << ',' << name << ',' << format_double(best) << ',' << fit.iterations << ','
          << (fit.converged ? "true" : "false") << '\n';
      row[name] = {{"seconds", best}, {"iterations", fit.iterations}, {"converged", fit.converged}};
      coefs.push_back(fit.coefficients);
    }
    if (coefs.size() == 2) row["max_abs_coef_diff"] = (coefs[0] - coefs[1]).cwiseAbs().maxCoeff();
    rows.push_back(std::move(row));
  }
  write_text(a.out, csv.str());
  Json& r = report.result();
  r["p"] = a.p;
  r["output"] = a.out.string();
  r["sizes"] = std::move(rows);
  report.write(a.report);
}

}  // namespace fgscan::cli
