#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fgscan::cli {

using OptPath = std::optional<std::filesystem::path>;

struct SimulateArgs {
  long n = 0;
  std::string beta1, beta2;
  double pi = 0.5;
  double umin = 0.0;
  double umax = 1.0;
  double rho = 0.0;
  std::uint64_t seed = 1;
  std::filesystem::path out;
  OptPath report;
};

struct FitArgs {
  std::filesystem::path data;
  bool variance = false;
  int replicates = 100;
  std::uint64_t seed = 2019;
  double alpha = 0.05;
  double tol = 1e-6;
  int max_iter = 1000;
  std::string engine = "scan";
  int jobs = 1;
  OptPath out;
};

struct PenfitArgs {
  std::filesystem::path data;
  std::string penalty = "lasso";
  std::string lambda_grid = "25:0.001:0.1";
  std::string lambdas;
  double gamma = 0.0;
  bool standardize = false;
  double tol = 1e-6;
  int max_iter = 1000;
  std::string engine = "scan";
  std::filesystem::path out;
  OptPath report;
};

struct CifArgs {
  std::filesystem::path data;
  std::string z0;
  int replicates = 100;
  std::uint64_t seed = 2019;
  double alpha = 0.05;
  double tl = 0.0;
  double tu = 0.0;
  bool band = false;
  int jobs = 1;
  std::filesystem::path out;
  OptPath svg;
  OptPath report;
};

struct BenchArgs {
  std::string sizes = "1000,2000,4000,8000";
  long p = 10;
  std::string engine = "scan";
  int replicates = 1;
  std::uint64_t seed = 1;
  bool force = false;
  int jobs = 1;
  std::filesystem::path out;
  OptPath report;
};

/// Each command throws fgscan::Error on failure; main maps kinds to exit codes.
void run_simulate(const SimulateArgs& a, const std::vector<std::string>& argv);
void run_fit(const FitArgs& a, const std::vector<std::string>& argv);
void run_penfit(const PenfitArgs& a, const std::vector<std::string>& argv);
void run_cif(const CifArgs& a, const std::vector<std::string>& argv);
void run_bench(const BenchArgs& a, const std::vector<std::string>& argv);

}  // namespace fgscan::cli
