#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "fgscan/bootstrap.hpp"
#include "fgscan/cif.hpp"
#include "fgscan/dataset.hpp"
#include "fgscan/error.hpp"
#include "fgscan/fit.hpp"
#include "fgscan/ipcw.hpp"
#include "fgscan/penalized.hpp"
#include "fgscan/scan.hpp"
#include "fgscan/simulate.hpp"

namespace py = pybind11;
using namespace fgscan;

namespace {

Engine engine_from(const std::string& name) {
  if (name == "scan") return Engine::scan;
  if (name == "naive") return Engine::naive;
  fail(ErrorKind::usage, "engine must be 'scan' or 'naive', got '" + name + "'");
}

py::dict counts_dict(const StatusCounts& c) {
  py::dict d;
  d["censored"] = c.censored;
  d["cause1"] = c.cause1;
  d["cause2"] = c.cause2;
  return d;
}

Dataset from_arrays(const Eigen::VectorXd& time, const Eigen::VectorXi& status, const Eigen::MatrixXd& z,
                    std::vector<std::string> names) {
  if (time.size() != status.size() || time.size() != z.rows()) {
    fail(ErrorKind::usage, "time, status and covariates must have the same number of rows");
  }
  std::vector<Subject> rows(static_cast<std::size_t>(time.size()));
  for (Index i = 0; i < time.size(); ++i) {
    auto& s = rows[static_cast<std::size_t>(i)];
    s.time = time(i);
    if (status(i) < 0 || status(i) > 2) {
      fail(ErrorKind::data, "status must be 0, 1 or 2 at row " + std::to_string(i + 1));
    }
    s.status = static_cast<Status>(status(i));
    for (Index j = 0; j < z.cols(); ++j) s.covariates.push_back(z(i, j));
    validate_subject(s, i + 1);
  }
  return canonicalize(std::move(rows), CanonicalizeOptions{.require_primary_event = false}, std::move(names));
}

py::dict scan_dict(const ScanOutput& out) {
  py::dict d;
  d["loglik"] = out.loglik;
  d["gradient"] = out.gradient;
  d["hessian_diag"] = out.hessian_diag;
  d["ops"] = out.ops;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fgscan, m) {
  m.doc() = "Fine-Gray competing-risks regression";
  m.attr("__version__") = FGSCAN_VERSION;

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::io: PyErr_SetString(PyExc_OSError, e.what()); return;
        case ErrorKind::usage:
        case ErrorKind::data: PyErr_SetString(PyExc_ValueError, e.what()); return;
        case ErrorKind::model: PyErr_SetString(PyExc_RuntimeError, e.what()); return;
      }
    }
  });

  py::class_<Dataset>(m, "Dataset", "competing-risks sample, stored in canonical (descending time) order")
      .def(py::init([](const Eigen::VectorXd& time, const Eigen::VectorXi& status, const Eigen::MatrixXd& z,
                       std::vector<std::string> names) { return from_arrays(time, status, z, std::move(names)); }),
           py::arg("time"), py::arg("status"), py::arg("covariates"), py::arg("names") = std::vector<std::string>{})
      .def_static("from_csv", [](const std::string& path) {
        return load_csv(path, CanonicalizeOptions{.require_primary_event = false});
      }, py::arg("path"))
      .def("to_csv", [](const Dataset& ds, const std::string& path) { write_csv(ds, std::filesystem::path(path)); },
           py::arg("path"))
      .def_property_readonly("n", &Dataset::size)
      .def_property_readonly("p", &Dataset::dim)
      .def_property_readonly("names", &Dataset::covariate_names)
      .def_property_readonly("counts", [](const Dataset& ds) { return counts_dict(ds.counts()); })
      .def_property_readonly("time", [](const Dataset& ds) {
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(ds.times().data(), ds.size()));
      })
      .def_property_readonly("status", [](const Dataset& ds) {
        Eigen::VectorXi s(ds.size());
        for (Index i = 0; i < ds.size(); ++i) s(i) = static_cast<int>(ds.status(i));
        return s;
      })
      .def_property_readonly("covariates", &Dataset::covariates)
      .def_property_readonly("input_index", [](const Dataset& ds) {
        return std::vector<Index>(ds.input_index().begin(), ds.input_index().end());
      })
      .def("__len__", &Dataset::size)
      .def("__repr__", [](const Dataset& ds) {
        return "<fgscan.Dataset n=" + std::to_string(ds.size()) + " p=" + std::to_string(ds.dim()) + ">";
      });

  m.def("simulate", [](Index n, const Eigen::VectorXd& beta1, const Eigen::VectorXd& beta2, double pi,
                       double umin, double umax, double rho, std::uint64_t seed,
                       std::optional<Eigen::MatrixXd> design) {
    SimConfig cfg;
    cfg.n = n;
    cfg.beta1 = beta1;
    cfg.beta2 = beta2;
    cfg.pi = pi;
    cfg.u_min = umin;
    cfg.u_max = umax;
    cfg.rho = rho;
    cfg.seed = seed;
    cfg.design = std::move(design);
    Simulation sim = simulate(cfg);
    py::dict report;
    report["counts"] = counts_dict(sim.report.counts);
    report["clamped"] = sim.report.clamped;
    return py::make_tuple(std::move(sim.data), report);
  }, py::arg("n"), py::arg("beta1"), py::arg("beta2"), py::arg("pi") = 0.5, py::arg("umin") = 0.0,
     py::arg("umax") = 1.0, py::arg("rho") = 0.0, py::arg("seed") = 1, py::arg("design") = std::nullopt,
     "simulate a two-cause sample; returns (Dataset, report)");

  m.def("scan", [](const Dataset& ds, const Eigen::VectorXd& beta) {
    return scan_dict(scan_all(ds, precompute_weights(ds), beta));
  }, py::arg("data"), py::arg("beta"), "log pseudo-likelihood, score and Hessian diagonal in linear time");

  m.def("brute_force", [](const Dataset& ds, const Eigen::VectorXd& beta) {
    return scan_dict(brute_force(ds, precompute_weights(ds), beta));
  }, py::arg("data"), py::arg("beta"), "the same quantities by direct double sums (small n only)");

  m.def("lambda_max", [](const Dataset& ds) { return lambda_max(ds, precompute_weights(ds)); }, py::arg("data"));

  m.def("fit", [](const Dataset& ds, bool variance, int B, std::uint64_t seed, double alpha, double tol,
                  int max_iter, const std::string& engine, int jobs) {
    FitOptions opts;
    opts.tolerance = tol;
    opts.max_iter = max_iter;
    opts.engine = engine_from(engine);
    py::gil_scoped_release release;
    const WeightSet w = precompute_weights(ds);
    FitResult res = fit_unpenalized(ds, w, opts);
    std::optional<CovarianceEstimate> cov;
    if (variance) {
      BootstrapControl control;
      control.replicates = B;
      control.seed = seed;
      control.jobs = jobs;
      cov = bootstrap_covariance(ds, control, opts, res.coefficients);
      res.covariance = cov->matrix;
    }
    py::gil_scoped_acquire hold;
    py::dict d;
    d["coefficients"] = res.coefficients;
    d["names"] = res.names;
    d["loglik"] = res.loglik;
    d["null_loglik"] = res.null_loglik;
    d["iterations"] = res.iterations;
    d["converged"] = res.converged;
    if (cov) {
      const auto rows = summarize(res, alpha, true);
      Eigen::VectorXd se(rows.size()), lo(rows.size()), hi(rows.size());
      for (std::size_t j = 0; j < rows.size(); ++j) {
        se(static_cast<Index>(j)) = *rows[j].se;
        lo(static_cast<Index>(j)) = *rows[j].lower;
        hi(static_cast<Index>(j)) = *rows[j].upper;
      }
      d["covariance"] = cov->matrix;
      d["se"] = se;
      d["lower"] = lo;
      d["upper"] = hi;
      d["replicates_skipped"] = cov->skipped;
    }
    return d;
  }, py::arg("data"), py::arg("variance") = false, py::arg("B") = 100, py::arg("seed") = 2019,
     py::arg("alpha") = 0.05, py::arg("tol") = 1e-6, py::arg("max_iter") = 1000, py::arg("engine") = "scan",
     py::arg("jobs") = 1);

  m.def("penfit", [](const Dataset& ds, const std::string& penalty, std::optional<std::vector<double>> lambdas,
                     double gamma, bool standardize, double tol, int max_iter, const std::string& engine) {
    const PenaltyKind kind = parse_penalty(penalty);
    PathOptions opts;
    opts.tolerance = tol;
    opts.max_iter = max_iter;
    opts.engine = engine_from(engine);
    const std::vector<double> grid = lambdas ? *lambdas : log_grid(25, 0.001, 0.1);
    py::gil_scoped_release release;
    std::optional<Standardized> st;
    if (standardize) st = standardize_columns(ds);
    const Dataset& work = st ? st->data : ds;
    PenalizedPath path = fit_path(work, kind, gamma, grid, opts);
    if (st) {
      for (Index k = 0; k < path.coefficients.cols(); ++k) {
        path.coefficients.col(k).array() /= st->scale.array();
      }
    }
    py::gil_scoped_acquire hold;
    py::dict d;
    d["penalty"] = std::string(penalty_name(kind));
    d["gamma"] = path.gamma;
    d["lambdas"] = path.lambdas;
    d["coefficients"] = path.coefficients;
    d["loglik"] = path.loglik;
    d["df"] = path.df;
    d["bic"] = path.bic;
    d["iterations"] = path.iterations;
    d["converged"] = path.converged;
    d["selected"] = path.selected;
    return d;
  }, py::arg("data"), py::arg("penalty") = "lasso", py::arg("lambdas") = std::nullopt, py::arg("gamma") = 0.0,
     py::arg("standardize") = false, py::arg("tol") = 1e-6, py::arg("max_iter") = 1000, py::arg("engine") = "scan",
     "coefficient path over a lambda grid; coefficients are p x len(lambdas)");

  m.def("cif", [](const Dataset& ds, const Eigen::VectorXd& z0, double tl, double tu, int B, std::uint64_t seed,
                  double alpha, bool band, int jobs) {
    CifBootstrapOptions opts;
    opts.control.replicates = B;
    opts.control.seed = seed;
    opts.control.jobs = jobs;
    opts.alpha = alpha;
    opts.t_lower = tl;
    opts.t_upper = tu;
    opts.band = band;
    CifEstimate est;
    {
      py::gil_scoped_release release;
      est = cif_bootstrap(ds, z0, opts);
    }
    py::dict d;
    d["times"] = est.times;
    d["estimate"] = est.values;
    d["grid"] = est.grid;
    d["grid_estimate"] = est.grid_values;
    d["sigma"] = est.sigma;
    d["lower"] = est.lower;
    d["upper"] = est.upper;
    if (band) {
      d["band_lower"] = est.band_lower;
      d["band_upper"] = est.band_upper;
      d["critical_value"] = *est.critical_value;
    }
    d["replicates_used"] = est.replicates_used;
    d["replicates_skipped"] = est.replicates_skipped;
    return d;
  }, py::arg("data"), py::arg("z0"), py::arg("tl"), py::arg("tu"), py::arg("B") = 100, py::arg("seed") = 2019,
     py::arg("alpha") = 0.05, py::arg("band") = false, py::arg("jobs") = 1);
}
