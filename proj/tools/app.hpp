#pragma once

// Configuration-driven experiment runner behind the `klstoch` executable.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "klstoch/function.hpp"
#include "klstoch/interval.hpp"
#include "klstoch/kernel.hpp"
#include "klstoch/optimality.hpp"
#include "klstoch/quadrature.hpp"

namespace klstoch::cli {

enum ExitCode : int { kOk = 0, kChecksFailed = 1, kConfigError = 2, kNumericError = 3, kIoError = 4 };

struct Integrand {
  std::string id;
  FunctionSpec real;
  std::optional<FunctionSpec> imag;
};

struct ExperimentConfig {
  KernelSpec kernel = KernelSpec::brownian();
  Interval interval{0.0, 1.0};
  std::size_t grid_size = 512;
  QuadratureKind quadrature = QuadratureKind::Trapezoid;
  double tol = 1e-12;
  std::string basis = "nystrom";  // nystrom | verified-kl | paper-dirichlet
  std::size_t truncation = 0;     // 0 keeps every retained mode
  std::optional<std::pair<double, double>> range;
  std::vector<Integrand> integrands;
  std::size_t partition_size = 256;
  double integrate_tol = 1e-2;
  std::size_t mc_paths = 0;
  std::optional<std::uint64_t> seed;
  std::size_t dump_limit = kDefaultDumpLimit;
  std::vector<OnbFamily> onbs;
  std::size_t onb_count = 64;
  std::size_t n_max = 32;
  std::size_t entropy_n = 16;

  static constexpr std::size_t kDefaultDumpLimit = 1024;
};

/// Parses and validates a config document. Throws Error(Config) on bad input.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool dump_paths = false;
};

int run_spectrum(const ExperimentConfig& config, const RunOptions& options);
int run_integrate(const ExperimentConfig& config, const RunOptions& options);
int run_simulate(const ExperimentConfig& config, const RunOptions& options);
int run_optimality(const ExperimentConfig& config, const RunOptions& options);
int run_report(const RunOptions& options);

/// Full command line (without the program name); returns the exit code.
int run(const std::vector<std::string>& args);

/// %.12g formatting used for every floating-point output.
std::string format_number(double value);

}  // namespace klstoch::cli
