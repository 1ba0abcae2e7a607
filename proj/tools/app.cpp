#include "app.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "klstoch/basis_io.hpp"
#include "klstoch/errors.hpp"
#include "klstoch/montecarlo.hpp"
#include "klstoch/parallel.hpp"
#include "klstoch/spectral.hpp"
#include "klstoch/stieltjes.hpp"

namespace klstoch::cli {

using nlohmann::json;

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

namespace {

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorCategory::Config, msg); }

template <class T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

std::size_t get_count(const json& doc, const char* key, std::size_t fallback) {
  const auto v = get_or<long long>(doc, key, static_cast<long long>(fallback));
  if (v < 0) config_error(std::string("field '") + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

KernelSpec parse_kernel(const json& k) {
  if (k.is_string()) return parse_kernel(json{{"type", k}});
  const auto type = get_or<std::string>(k, "type", "");
  if (type == "brownian") return KernelSpec::brownian();
  if (type == "fbm") return KernelSpec::fractional_brownian(get_or<double>(k, "hurst", 0.5));
  if (type == "ou") return KernelSpec::ornstein_uhlenbeck(get_or<double>(k, "theta", 1.0), get_or<double>(k, "sigma", 1.0));
  if (type == "tabulated") return load_tabulated_csv(get_or<std::string>(k, "path", ""));
  config_error("unknown kernel type '" + type + "'");
}

FunctionSpec parse_function(const json& f) {
  const auto type = get_or<std::string>(f, "type", "");
  if (type == "constant") return FunctionSpec::constant(get_or<double>(f, "value", 1.0));
  if (type == "polynomial") return FunctionSpec::polynomial(get_or<std::vector<double>>(f, "coefficients", {}));
  if (type == "sine") {
    return FunctionSpec::sine(get_or<double>(f, "amplitude", 1.0), get_or<double>(f, "frequency", 1.0),
                              get_or<double>(f, "phase", 0.0));
  }
  if (type == "piecewise_linear") {
    return FunctionSpec::piecewise_linear(get_or<std::vector<std::pair<double, double>>>(f, "knots", {}));
  }
  config_error("unknown integrand type '" + type + "'");
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("KLSTOCH_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') config_error("KLSTOCH_SEED must be a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) config_error("config must be a JSON object");
  ExperimentConfig c;
  try {
    if (doc.contains("kernel")) c.kernel = parse_kernel(doc.at("kernel"));
    if (doc.contains("interval")) {
      const auto iv = get_or<std::vector<double>>(doc, "interval", {});
      if (iv.size() != 2) config_error("interval must be [a, b]");
      c.interval = Interval(iv[0], iv[1]);
    }
    c.grid_size = get_count(doc, "grid_size", c.grid_size);
    if (doc.contains("quadrature")) c.quadrature = quadrature_kind_from_string(get_or<std::string>(doc, "quadrature", ""));
    c.tol = get_or<double>(doc, "tol", c.tol);
    c.basis = get_or<std::string>(doc, "basis", c.basis);
    c.truncation = get_count(doc, "truncation", c.truncation);
    if (doc.contains("range")) {
      const auto r = get_or<std::vector<double>>(doc, "range", {});
      if (r.size() != 2 || !(r[0] < r[1])) config_error("range must be [t0, t] with t0 < t");
      c.range = std::pair{r[0], r[1]};
    }
    if (doc.contains("integrands")) {
      std::size_t index = 0;
      for (const auto& f : doc.at("integrands")) {
        Integrand item{get_or<std::string>(f, "id", "f" + std::to_string(index)), parse_function(f), std::nullopt};
        if (f.contains("imag")) item.imag = parse_function(f.at("imag"));
        c.integrands.push_back(std::move(item));
        ++index;
      }
    }
    c.partition_size = get_count(doc, "partition_size", c.partition_size);
    c.integrate_tol = get_or<double>(doc, "integrate_tol", c.integrate_tol);
    c.mc_paths = get_count(doc, "mc_paths", c.mc_paths);
    if (doc.contains("seed")) c.seed = get_or<std::uint64_t>(doc, "seed", 0);
    c.dump_limit = get_count(doc, "dump_limit", c.dump_limit);
    if (doc.contains("onbs")) {
      for (const auto& name : doc.at("onbs")) c.onbs.push_back(onb_family_from_string(name.get<std::string>()));
    }
    c.onb_count = get_count(doc, "onb_count", c.onb_count);
    c.n_max = get_count(doc, "n_max", c.n_max);
    c.entropy_n = get_count(doc, "entropy_n", c.entropy_n);
  } catch (const json::exception& e) {
    config_error(e.what());
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::Io) throw;
    config_error(e.what());
  }

  if (auto s = env_seed()) c.seed = s;

  if (c.grid_size < 2) config_error("grid_size must be at least 2");
  if (c.partition_size < 1) config_error("partition_size must be positive");
  if (c.onb_count < 1) config_error("onb_count must be positive");
  if (c.n_max > c.onb_count) config_error("n_max must not exceed onb_count");
  if (c.entropy_n > c.onb_count) config_error("entropy_n must not exceed onb_count");
  if (c.mc_paths > 0 && !c.seed) config_error("a seed is required when mc_paths > 0");
  if (c.basis != "nystrom") {
    (void)brownian_variant_from_string(c.basis);
    if (c.truncation == 0) config_error("closed-form bases need an explicit truncation");
  }
  for (OnbFamily f : c.onbs) {
    if (f == OnbFamily::Haar && !is_power_of_two(c.grid_size)) {
      config_error("Haar comparisons need a power-of-two grid_size");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::Io, "cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    config_error("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

namespace {

// Collects checks and writes summary_<command>.json on every exit path.
class Summary {
 public:
  Summary(std::string command, std::filesystem::path out_dir)
      : command_(std::move(command)), out_dir_(std::move(out_dir)) {}

  void check(const std::string& name, bool pass, double value) {
    checks_.push_back({{"name", name}, {"pass", pass}, {"value", format_number(value)}});
    all_pass_ = all_pass_ && pass;
  }
  json& extra() { return extra_; }

  int finish() { return write(all_pass_ ? kOk : kChecksFailed, nullptr); }
  int error(int code, const std::string& category, const std::string& message) {
    const json err{{"category", category}, {"message", message}};
    return write(code, &err);
  }

 private:
  int write(int code, const json* err) {
    json doc{{"command", command_}, {"exit_code", code}, {"status", code == kOk ? "ok" : (err ? "error" : "failed")}};
    doc["checks"] = checks_;
    if (!extra_.is_null()) doc["results"] = extra_;
    if (err) doc["error"] = *err;
    std::error_code ec;
    std::filesystem::create_directories(out_dir_, ec);
    std::ofstream out(out_dir_ / ("summary_" + command_ + ".json"));
    if (!out) {
      std::cerr << "error[io]: cannot write summary in " << out_dir_.string() << "\n";
      return kIoError;
    }
    out << doc.dump(2) << "\n";
    return code;
  }

  std::string command_;
  std::filesystem::path out_dir_;
  json checks_ = json::array();
  json extra_;
  bool all_pass_ = true;
};

std::ofstream open_output(const RunOptions& options, const std::string& name) {
  std::filesystem::create_directories(options.out_dir);
  std::ofstream out(options.out_dir / name);
  if (!out) fail(ErrorCategory::Io, "cannot write " + (options.out_dir / name).string());
  return out;
}

QuadratureRule config_rule(const ExperimentConfig& c) { return QuadratureRule::make(c.quadrature, c.interval, c.grid_size); }

KLBasis build_basis(const ExperimentConfig& c) {
  const auto rule = config_rule(c);
  if (c.basis == "nystrom") return nystrom_decompose(c.kernel, rule, c.tol);
  return closed_form_brownian_basis(c.truncation, brownian_variant_from_string(c.basis), rule);
}

std::size_t effective_K(const ExperimentConfig& c, const KLBasis& basis) {
  if (c.truncation == 0) return basis.size();
  require(c.truncation <= basis.size(), ErrorCategory::Range,
          "truncation " + std::to_string(c.truncation) + " exceeds the " + std::to_string(basis.size()) +
              " retained modes");
  return c.truncation;
}

std::pair<double, double> config_range(const ExperimentConfig& c) {
  return c.range.value_or(std::pair{c.interval.a(), c.interval.b()});
}

void write_spectrum_csv(std::ostream& out, const KLBasis& basis, const std::vector<double>& residuals) {
  out << "k,lambda,residual\n";
  for (std::size_t k = 0; k < basis.size(); ++k) {
    out << k + 1 << "," << format_number(basis.eigenvalues()[k]) << "," << format_number(residuals[k]) << "\n";
  }
}

bool is_brownian(const KernelSpec& spec) { return std::holds_alternative<BrownianMotion>(spec.variant()); }

}  // namespace

int run_spectrum(const ExperimentConfig& c, const RunOptions& options) {
  Summary summary("spectrum", options.out_dir);
  const KLBasis basis = build_basis(c);
  const auto residuals = eigen_residuals(basis, c.kernel);
  save_basis(basis, options.out_dir / "spectrum.json");
  {
    auto out = open_output(options, "spectrum.csv");
    write_spectrum_csv(out, basis, residuals);
  }

  const auto rule = config_rule(c);
  const double trace = discrete_trace(c.kernel, rule);
  const double sum = pairwise_sum(basis.eigenvalues());
  std::cout << "modes " << basis.size() << "\n";
  std::cout << "lambda_1 " << format_number(basis.eigenvalues().front()) << "\n";
  std::cout << "sum_lambda " << format_number(sum) << "\n";
  std::cout << "diagonal_quadrature " << format_number(trace) << "\n";
  summary.extra() = {{"basis_id", basis.id()},
                     {"modes", basis.size()},
                     {"lambda_1", format_number(basis.eigenvalues().front())},
                     {"sum_lambda", format_number(sum)},
                     {"diagonal_quadrature", format_number(trace)}};
  if (c.basis == "nystrom") summary.check("trace_identity", std::abs(sum - trace) <= 1e-8 * trace, sum - trace);

  if (is_brownian(c.kernel) && c.interval == Interval(0.0, 1.0)) {
    const std::size_t K = std::min<std::size_t>(c.truncation == 0 ? 10 : c.truncation, rule.size());
    auto out = open_output(options, "brownian_closed_form.csv");
    out << "variant,k,lambda,residual\n";
    for (auto variant : {BrownianVariant::Dirichlet, BrownianVariant::VerifiedKL}) {
      const auto closed = closed_form_brownian_basis(K, variant, rule);
      const auto r = eigen_residuals(closed, c.kernel);
      for (std::size_t k = 0; k < K; ++k) {
        out << to_string(variant) << "," << k + 1 << "," << format_number(closed.eigenvalues()[k]) << ","
            << format_number(r[k]) << "\n";
      }
      summary.extra()["max_residual_" + to_string(variant)] = format_number(*std::max_element(r.begin(), r.end()));
    }
  }
  return summary.finish();
}

int run_integrate(const ExperimentConfig& c, const RunOptions& options) {
  Summary summary("integrate", options.out_dir);
  require(!c.integrands.empty(), ErrorCategory::Config, "integrate needs at least one integrand");
  const KLBasis basis = build_basis(c);
  const std::size_t K = effective_K(c, basis);
  const auto [t0, t] = config_range(c);
  const auto partition = Partition::uniform(Interval(t0, t), c.partition_size);
  const bool brownian = is_brownian(c.kernel);

  auto out = open_output(options, "integrate.csv");
  out << "f_id,t0,t,K,spectral,discrete,oracle,abs_error,bound\n";
  json rows = json::array();
  for (const auto& item : c.integrands) {
    double spectral = 0.0;
    double discrete = 0.0;
    double isometry = 0.0;
    if (item.imag) {
      const ComplexFunction f{item.real, *item.imag};
      spectral = variance_spectral(f, basis, t0, t, K);
      discrete = variance_discrete(f, partition, c.kernel);
      isometry = integrate_squared(item.real, t0, t) + integrate_squared(*item.imag, t0, t);
    } else {
      spectral = variance_spectral(item.real, basis, t0, t, K);
      discrete = variance_discrete(item.real, partition, c.kernel);
      isometry = integrate_squared(item.real, t0, t);
    }
    const double oracle = brownian ? isometry : discrete;
    const double error = std::abs(spectral - oracle);

    std::string bound = "n/a";
    const bool vanishing = std::abs(item.real(t0)) <= 1e-12 && std::abs(item.real(t)) <= 1e-12 && !item.imag;
    if (vanishing) {
      const auto b = apriori_bound(item.real, basis, t0, t, K);
      bound = b.holds() ? "pass" : "fail";
      summary.check(item.id + ":apriori_bound", b.holds(), b.bound - b.lhs);
    }
    summary.check(item.id + ":spectral_vs_oracle", error <= c.integrate_tol, error);
    out << item.id << "," << format_number(t0) << "," << format_number(t) << "," << K << "," << format_number(spectral)
        << "," << format_number(discrete) << "," << format_number(oracle) << "," << format_number(error) << ","
        << bound << "\n";
    rows.push_back({{"id", item.id}, {"spectral", format_number(spectral)}, {"discrete", format_number(discrete)},
                    {"oracle", format_number(oracle)}, {"bound", bound}});
  }
  summary.extra() = {{"basis_id", basis.id()}, {"K", K}, {"rows", rows}};
  return summary.finish();
}

int run_simulate(const ExperimentConfig& c, const RunOptions& options) {
  Summary summary("simulate", options.out_dir);
  require(c.mc_paths >= 2, ErrorCategory::Config, "simulate needs mc_paths >= 2");
  require(!c.integrands.empty(), ErrorCategory::Config, "simulate needs at least one integrand");
  const KLBasis basis = build_basis(c);
  const std::size_t K = effective_K(c, basis);
  const auto partition = Partition::uniform(c.interval, c.partition_size);
  const RandomSource source{*c.seed, 0};

  std::vector<FunctionSpec> functions;
  for (const auto& item : c.integrands) {
    require(!item.imag, ErrorCategory::Config, "simulate supports real integrands only");
    functions.push_back(item.real);
  }
  const auto estimates = stream_integral_variance(functions, basis, K, c.mc_paths, source, partition);

  auto out = open_output(options, "simulate.csv");
  out << "f_id,M,K,estimate,std_error,oracle,z_score\n";
  json rows = json::array();
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const double oracle = truncated_discrete_variance(functions[i], basis, K, partition);
    const auto& e = estimates[i];
    const double z = e.std_error > 0.0 ? (e.estimate - oracle) / e.std_error : 0.0;
    summary.check(c.integrands[i].id + ":within_3se", std::abs(e.estimate - oracle) <= 3.0 * e.std_error, z);
    out << c.integrands[i].id << "," << c.mc_paths << "," << K << "," << format_number(e.estimate) << ","
        << format_number(e.std_error) << "," << format_number(oracle) << "," << format_number(z) << "\n";
    rows.push_back({{"id", c.integrands[i].id}, {"estimate", format_number(e.estimate)},
                    {"std_error", format_number(e.std_error)}, {"oracle", format_number(oracle)}});
  }

  if (options.dump_paths) {
    const std::size_t rows_out = std::min({c.dump_limit, c.mc_paths, kPathBlock});
    const auto ensemble = simulate_block(basis, K, rows_out, source, 0);
    auto paths = open_output(options, "paths.csv");
    for (std::size_t j = 0; j < ensemble.grid.size(); ++j) paths << (j ? "," : "") << format_number(ensemble.grid[j]);
    paths << "\n";
    for (Eigen::Index p = 0; p < ensemble.paths.rows(); ++p) {
      for (Eigen::Index j = 0; j < ensemble.paths.cols(); ++j) paths << (j ? "," : "") << format_number(ensemble.paths(p, j));
      paths << "\n";
    }
  }
  summary.extra() = {{"basis_id", basis.id()}, {"K", K}, {"M", c.mc_paths}, {"seed", *c.seed}, {"rows", rows}};
  return summary.finish();
}

int run_optimality(const ExperimentConfig& c, const RunOptions& options) {
  Summary summary("check-optimality", options.out_dir);
  const std::vector<OnbFamily> families =
      c.onbs.empty() ? std::vector<OnbFamily>{OnbFamily::FourierCosine, OnbFamily::LegendreShifted} : c.onbs;

  auto out = open_output(options, "optimality.csv");
  out << "onb,n,sum_lambda,sum_d,margin,S_n_KL,S_n_psi\n";
  json results = json::array();
  for (OnbFamily family : families) {
    const QuadratureKind kind = family == OnbFamily::KL ? c.quadrature : native_rule(family);
    const auto rule = QuadratureRule::make(kind, c.interval, c.grid_size);
    const KLBasis basis = nystrom_decompose(c.kernel, rule, c.tol);
    const ONBSpec onb = family == OnbFamily::KL ? kl_onb(basis, c.onb_count) : make_onb(family, rule, c.onb_count);
    require(onb.size() >= c.n_max && onb.size() >= c.entropy_n, ErrorCategory::Range,
            "fewer basis elements than n_max or entropy_n");
    const auto d = diagonal_compressions(onb, c.kernel);
    const auto rows = check_trace_dominance(d, basis.eigenvalues(), c.n_max);
    const double normalizer = discrete_trace(c.kernel, rule);

    double worst_margin = rows.empty() ? 0.0 : rows.front().margin;
    bool dominance = true;
    bool entropy_ok = true;
    const std::size_t n_rows = std::max(c.n_max, c.entropy_n);
    for (std::size_t n = 1; n <= n_rows; ++n) {
      out << onb.name() << "," << n;
      if (n <= rows.size()) {
        const auto& r = rows[n - 1];
        out << "," << format_number(r.sum_lambda) << "," << format_number(r.sum_d) << "," << format_number(r.margin);
        worst_margin = std::min(worst_margin, r.margin);
        dominance = dominance && r.pass;
      } else {
        out << ",,,";
      }
      if (n <= c.entropy_n) {
        const std::size_t n_lambda = std::min(n, basis.size());
        const double s_kl = entropy_numbers(basis.eigenvalues(), n_lambda, normalizer).value;
        const double s_psi = entropy_numbers(d, n, normalizer).value;
        entropy_ok = entropy_ok && s_kl <= s_psi + 1e-10;
        out << "," << format_number(s_kl) << "," << format_number(s_psi);
      } else {
        out << ",,";
      }
      out << "\n";
    }
    summary.check(onb.name() + ":trace_dominance", dominance, worst_margin);
    if (c.entropy_n > 0) summary.check(onb.name() + ":entropy", entropy_ok, 0.0);
    results.push_back({{"onb", onb.name()}, {"rule", to_string(kind)}, {"worst_margin", format_number(worst_margin)}});
  }
  summary.extra() = results;
  return summary.finish();
}

int run_report(const RunOptions& options) {
  Summary summary("report", options.out_dir);
  auto out = open_output(options, "report.csv");
  out << "command,status,exit_code,checks_passed,checks_total\n";
  json rows = json::array();
  for (const char* command : {"spectrum", "integrate", "simulate", "check-optimality"}) {
    const auto path = options.out_dir / (std::string("summary_") + command + ".json");
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path);
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      fail(ErrorCategory::Io, "malformed summary " + path.string());
    }
    std::size_t passed = 0;
    std::size_t total = 0;
    for (const auto& check : doc.value("checks", json::array())) {
      ++total;
      if (check.value("pass", false)) ++passed;
    }
    const std::string status = doc.value("status", "unknown");
    const int code = doc.value("exit_code", -1);
    out << command << "," << status << "," << code << "," << passed << "," << total << "\n";
    rows.push_back({{"command", command}, {"status", status}});
    summary.check(command, code == kOk, static_cast<double>(passed));
  }
  summary.extra() = rows;
  return summary.finish();
}

namespace {

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Io: return kIoError;
    case ErrorCategory::Numeric:
    case ErrorCategory::EmptySpectrum:
    case ErrorCategory::Convergence:
    case ErrorCategory::UndefinedEntropy:
    case ErrorCategory::InsufficientSample: return kNumericError;
    default: return kConfigError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Karhunen-Loeve stochastic integration experiments", "klstoch"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  bool dump_paths = false;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "experiment config (JSON)");
    if (needs_config) opt->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  };
  auto* spectrum = app.add_subcommand("spectrum", "eigen-decomposition and trace comparison");
  auto* integrate = app.add_subcommand("integrate", "spectral vs discrete second moments");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo second moments");
  auto* optimality = app.add_subcommand("check-optimality", "trace dominance and entropy against other bases");
  auto* report = app.add_subcommand("report", "aggregate summaries in the output directory");
  for (auto* sub : {spectrum, integrate, simulate, optimality}) add_common(sub, true);
  add_common(report, false);
  simulate->add_flag("--dump-paths", dump_paths, "write paths.csv (first block of paths)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const RunOptions options{out_dir, dump_paths};
  const std::string command = app.get_subcommands().front()->get_name();
  if (threads > 0) set_thread_count(threads);
  try {
    std::filesystem::create_directories(options.out_dir);
    if (command == "report") return run_report(options);
    const auto config = load_config(config_path);
    if (command == "spectrum") return run_spectrum(config, options);
    if (command == "integrate") return run_integrate(config, options);
    if (command == "simulate") return run_simulate(config, options);
    return run_optimality(config, options);
  } catch (const Error& e) {
    const int code = exit_code_for(e.category());
    std::cerr << "error[" << to_string(e.category()) << "]: " << e.what() << "\n";
    Summary(command, options.out_dir).error(code, std::string(to_string(e.category())), e.what());
    return code;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error[io]: " << e.what() << "\n";
    Summary(command, options.out_dir).error(kIoError, "io", e.what());
    return kIoError;
  }
}

}  // namespace klstoch::cli
