// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "app.hpp"
#include "klstoch/montecarlo.hpp"
#include "klstoch/optimality.hpp"
#include "klstoch/parallel.hpp"
#include "klstoch/spectral.hpp"
#include "klstoch/stieltjes.hpp"

using namespace klstoch;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct NamedKernel {
  std::string name;
  KernelSpec spec;
};

std::vector<NamedKernel> corpus_kernels() {
  return {{"brownian", KernelSpec::brownian()},
          {"fbm(0.7)", KernelSpec::fractional_brownian(0.7)},
          {"ou(1,1)", KernelSpec::ornstein_uhlenbeck(1.0, 1.0)}};
}

struct NamedFunction {
  std::string name;
  FunctionSpec f;
  bool zero_endpoints;
};

std::vector<NamedFunction> corpus_functions() {
  return {{"1", FunctionSpec::constant(1.0), false},
          {"s", FunctionSpec::polynomial({0.0, 1.0}), false},
          {"sin(pi s)", FunctionSpec::sine(1.0, kPi), true},
          {"sin(2 pi s)", FunctionSpec::sine(1.0, 2.0 * kPi), true},
          {"s(1-s)", FunctionSpec::polynomial({0.0, 1.0, -1.0}), true},
          {"tent", FunctionSpec::piecewise_linear({{0.0, 0.0}, {0.3, 1.0}, {1.0, 0.0}}), true}};
}

QuadratureRule trapezoid(std::size_t n) { return QuadratureRule::make(QuadratureKind::Trapezoid, Interval(0.0, 1.0), n); }

double verified_lambda(std::size_t k) {
  const double w = (static_cast<double>(k) - 0.5) * kPi;
  return 1.0 / (w * w);
}

Outcome spectrum_correctness() {
  const auto start = std::chrono::steady_clock::now();
  const auto basis = nystrom_decompose(KernelSpec::brownian(), Interval(0.0, 1.0), 512, QuadratureKind::Trapezoid);
  const double elapsed = seconds_since(start);
  double worst = 0.0;
  for (std::size_t k = 1; k <= 10; ++k) {
    worst = std::max(worst, std::abs(basis.eigenvalues()[k - 1] - verified_lambda(k)) / verified_lambda(k));
  }
  const auto dirichlet = closed_form_brownian_basis(10, BrownianVariant::Dirichlet, basis.rule());
  const auto verified = closed_form_brownian_basis(10, BrownianVariant::VerifiedKL, basis.rule());
  const auto rd = eigen_residuals(dirichlet, KernelSpec::brownian());
  const auto rv = eigen_residuals(verified, KernelSpec::brownian());
  const auto rayleigh = recursive_rayleigh(KernelSpec::brownian(), basis.rule(), 10);
  double rayleigh_gap = 0.0;
  for (std::size_t k = 0; k < 10; ++k) {
    rayleigh_gap = std::max(rayleigh_gap, std::abs(rayleigh[k] - basis.eigenvalues()[k]) / basis.eigenvalues()[k]);
  }
  return {worst <= 1e-3 && elapsed < 5.0,
          fmt("max rel err %.3g, %.2f s; recursive Rayleigh gap %.2g; residual paper-dirichlet phi_1 %.3g vs "
              "verified-kl %.3g",
              worst, elapsed, rayleigh_gap, rd[0], rv[0])};
}

Outcome mercer_trace() {
  const auto basis = nystrom_decompose(KernelSpec::brownian(), Interval(0.0, 1.0), 512, QuadratureKind::Trapezoid);
  const double sum = pairwise_sum(basis.eigenvalues());
  const double trace = discrete_trace(KernelSpec::brownian(), basis.rule());
  return {std::abs(sum - 0.5) <= 1e-3 && std::abs(sum - trace) <= 1e-10,
          fmt("sum lambda %.12g, |sum - 0.5| %.3g, |sum - quadrature trace| %.3g", sum, std::abs(sum - 0.5),
              std::abs(sum - trace))};
}

Outcome wiener_isometry() {
  const auto basis = closed_form_brownian_basis(1000, BrownianVariant::VerifiedKL, trapezoid(2049));
  double worst = 0.0;
  for (const auto& f : {FunctionSpec::constant(1.0), FunctionSpec::polynomial({0.0, 1.0}), FunctionSpec::sine(1.0, kPi)}) {
    for (double t : {0.5, 1.0}) {
      worst = std::max(worst, std::abs(variance_spectral(f, basis, 0.0, t, 1000) - integrate_squared(f, 0.0, t)));
    }
  }
  return {worst <= 5e-3, fmt("max |spectral - int f^2| %.3g over 6 cases", worst)};
}

Outcome spectral_discrete_consistency() {
  // Monotonicity is gated on the smooth integrands {1, s, sin(pi s)}; for the
  // rest it is reported only.
  bool pass = true;
  double worst = 0.0;
  std::string gated;
  std::string info;
  for (const auto& kernel : {corpus_kernels()[0], corpus_kernels()[1]}) {
    const auto basis = nystrom_decompose(kernel.spec, trapezoid(1025));
    const auto functions = corpus_functions();
    for (std::size_t i = 0; i < functions.size(); ++i) {
      const auto& item = functions[i];
      const double spectral = variance_spectral(item.f, basis, 0.0, 1.0, 512);
      double previous = INFINITY;
      bool monotone = true;
      for (std::size_t n : {64u, 128u, 256u}) {
        const double gap =
            std::abs(spectral - variance_discrete(item.f, Partition::uniform(Interval(0.0, 1.0), n), kernel.spec));
        monotone = monotone && gap <= previous + 1e-12;
        previous = gap;
      }
      worst = std::max(worst, previous);
      if (!monotone) (i < 3 ? gated : info) += " " + kernel.name + "/" + item.name;
      if (!monotone && i < 3) pass = false;
    }
  }
  pass = pass && worst <= 1e-2;
  std::string detail = fmt("max |spectral - discrete| at n=256 %.3g over %zu pairs", worst, 2 * corpus_functions().size());
  detail += gated.empty() ? "; nonincreasing for {1, s, sin(pi s)}" : "; non-monotone:" + gated;
  if (!info.empty()) detail += "; not monotone at the floor (ungated):" + info;
  return {pass, detail};
}

Outcome monte_carlo_closure() {
  constexpr std::size_t M = 200000;
  constexpr std::size_t K = 128;
  const auto partition = Partition::uniform(Interval(0.0, 1.0), 64);
  std::vector<FunctionSpec> fs;
  for (const auto& item : corpus_functions()) fs.push_back(item.f);
  bool pass = true;
  std::string detail;
  for (const auto& kernel : corpus_kernels()) {
    const auto start = std::chrono::steady_clock::now();
    const auto basis = nystrom_decompose(kernel.spec, trapezoid(257));
    std::vector<double> exact;
    for (const auto& f : fs) exact.push_back(truncated_discrete_variance(f, basis, K, partition));
    std::vector<int> hits(fs.size(), 0);
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const auto est = stream_integral_variance(fs, basis, K, M, {seed, 0}, partition);
      for (std::size_t i = 0; i < fs.size(); ++i) {
        if (std::abs(est[i].estimate - exact[i]) <= 3.0 * est[i].std_error) ++hits[i];
      }
    }
    const double elapsed = seconds_since(start);
    const int fewest = *std::min_element(hits.begin(), hits.end());
    pass = pass && fewest >= 29 && elapsed < 60.0;
    detail += fmt("%s: min %d/30 seeds, %.1f s; ", kernel.name.c_str(), fewest, elapsed);
  }
  return {pass, detail};
}

Outcome double_orthogonality() {
  const auto basis = nystrom_decompose(KernelSpec::brownian(), Interval(0.0, 1.0), 512, QuadratureKind::Trapezoid);
  const double phi_err = orthonormality_error(basis.rule(), basis.eigenfunctions());
  constexpr std::size_t K = 5;
  const auto gram = stream_coefficient_gram(basis, K, 200000, {2024, 0});
  double worst_z = 0.0;
  bool z_ok = true;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(K); ++j) {
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(K); ++k) {
      const double z = std::abs(gram.mean(j, k) - (j == k ? 1.0 : 0.0)) / gram.std_error(j, k);
      worst_z = std::max(worst_z, z);
      z_ok = z_ok && z <= 3.0;
    }
  }
  return {phi_err <= 1e-8 && z_ok, fmt("phi-Gram max |G - I| %.3g; Z-Gram max deviation %.2f SE", phi_err, worst_z)};
}

Outcome truncation_law() {
  const auto start = std::chrono::steady_clock::now();
  const auto basis = closed_form_brownian_basis(2000, BrownianVariant::VerifiedKL, trapezoid(2049));
  const auto e = stream_truncation_error(basis, 2000, 50, 100000, {7, 0});
  const double tail = truncation_error(basis, 50);
  double infinite_tail = 0.5;
  for (std::size_t k = 1; k <= 50; ++k) infinite_tail -= verified_lambda(k);
  return {std::abs(e.estimate - tail) <= 3.0 * e.std_error,
          fmt("estimate %.6g +- %.2g, tail sum_{k>50}^{2000} %.6g (%.2f SE), full tail %.6g, %.1f s", e.estimate,
              e.std_error, tail, (e.estimate - tail) / e.std_error, infinite_tail, seconds_since(start))};
}

Outcome increment_relations() {
  const auto rule = trapezoid(1001);
  const auto bm = closed_form_brownian_basis(1000, BrownianVariant::VerifiedKL, rule);
  const double b = increment_cross_moment(bm, 0.2, 0.5, 0.8, 1000);
  const auto spec = KernelSpec::fractional_brownian(0.7);
  const auto fbm = nystrom_decompose(spec, rule);
  const double f = increment_cross_moment(fbm, 0.2, 0.5, 0.8, fbm.size());
  const double direct = spec(0.5, 0.8) - spec(0.2, 0.8) + spec(0.2, 0.5) - spec(0.5, 0.5);
  return {std::abs(b) <= 1e-3 && std::abs(f - direct) <= 1e-3,
          fmt("brownian %.3g; fbm(0.7) %.9g vs kernel %.9g", b, f, direct)};
}

Outcome apriori_estimate() {
  double worst = INFINITY;
  bool pass = true;
  int count = 0;
  for (const auto& kernel : corpus_kernels()) {
    const auto basis = nystrom_decompose(kernel.spec, trapezoid(513));
    for (const auto& item : corpus_functions()) {
      if (!item.zero_endpoints) continue;
      const auto b = apriori_bound(item.f, basis, 0.0, 1.0, basis.size());
      pass = pass && b.holds();
      worst = std::min(worst, b.bound - b.lhs);
      ++count;
    }
  }
  return {pass, fmt("%d cases, min slack bound - lhs %.3g", count, worst)};
}

Outcome optimality() {
  bool pass = true;
  double worst_margin = INFINITY;
  double worst_entropy = INFINITY;
  double worst_kl = 0.0;
  for (const auto& kernel : corpus_kernels()) {
    for (auto family : {OnbFamily::FourierCosine, OnbFamily::LegendreShifted, OnbFamily::Haar}) {
      const auto rule = QuadratureRule::make(native_rule(family), Interval(0.0, 1.0), 256);
      const auto basis = nystrom_decompose(kernel.spec, rule);
      const auto d = diagonal_compressions(make_onb(family, rule, 64), kernel.spec);
      for (const auto& row : check_trace_dominance(d, basis.eigenvalues(), 32)) {
        worst_margin = std::min(worst_margin, row.margin);
        pass = pass && row.pass;
      }
      const double z = discrete_trace(kernel.spec, rule);
      for (std::size_t n = 1; n <= 16; ++n) {
        const double gap = entropy_numbers(d, n, z).value - entropy_numbers(basis.eigenvalues(), n, z).value;
        worst_entropy = std::min(worst_entropy, gap);
        pass = pass && gap >= -1e-10;
      }
      const auto kl = diagonal_compressions(kl_onb(basis, 64), kernel.spec);
      for (const auto& row : check_trace_dominance(kl, basis.eigenvalues(), 32)) {
        worst_kl = std::max(worst_kl, std::abs(row.margin));
      }
    }
  }
  pass = pass && worst_kl <= 1e-10;
  return {pass, fmt("min dominance margin %.3g; min S_psi - S_KL %.3g; max |KL margin| %.3g", worst_margin,
                    worst_entropy, worst_kl)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const auto root = fs::temp_directory_path() / "klstoch_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const nlohmann::json config{
      {"kernel", {{"type", "fbm"}, {"hurst", 0.7}}},
      {"grid_size", 256},
      {"truncation", 128},
      {"partition_size", 51},
      {"mc_paths", 20000},
      {"seed", 5},
      {"onbs", {"cosine", "legendre", "haar", "kl"}},
      {"integrands",
       {{{"id", "one"}, {"type", "constant"}, {"value", 1.0}},
        {{"id", "sin"}, {"type", "sine"}, {"amplitude", 1.0}, {"frequency", kPi}}}}};
  std::ofstream(root / "config.json") << config.dump(2);

  bool pass = true;
  bool ok = true;
  std::size_t files = 0;
  const auto run_all = [&](const fs::path& out, int threads) {
    const std::string t = std::to_string(threads);
    const std::string cfg = (root / "config.json").string();
    for (const std::string cmd : {"spectrum", "integrate", "check-optimality"}) {
      ok = ok && cli::run({cmd, "--config", cfg, "--out", out.string(), "--threads", t}) == cli::kOk;
    }
    ok = ok && cli::run({"simulate", "--config", cfg, "--out", out.string(), "--threads", t, "--dump-paths"}) == cli::kOk;
    ok = ok && cli::run({"report", "--out", out.string(), "--threads", t}) == cli::kOk;
  };
  run_all(root / "t1", 1);
  for (int threads : {2, 4, 7}) {
    const auto out = root / ("t" + std::to_string(threads));
    run_all(out, threads);
    for (const auto& entry : fs::directory_iterator(root / "t1")) {
      ++files;
      pass = pass && slurp(entry.path()) == slurp(out / entry.path().filename());
    }
    pass = pass && std::distance(fs::directory_iterator(out), fs::directory_iterator{}) ==
                       std::distance(fs::directory_iterator(root / "t1"), fs::directory_iterator{});
  }
  fs::remove_all(root);
  return {pass && ok && files > 0, fmt("%zu file comparisons across --threads {1,2,4,7}; all runs exit 0: %s", files,
                                        ok ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number.
  std::vector<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.push_back(static_cast<std::size_t>(std::stoul(argv[i])));
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"spectrum correctness", spectrum_correctness},
      {"Mercer trace", mercer_trace},
      {"Wiener isometry", wiener_isometry},
      {"spectral/discrete consistency", spectral_discrete_consistency},
      {"Monte Carlo closure", monte_carlo_closure},
      {"double orthogonality", double_orthogonality},
      {"truncation law", truncation_law},
      {"increment relations", increment_relations},
      {"a priori estimate", apriori_estimate},
      {"KL optimality", optimality},
      {"CLI determinism", cli_determinism},
  };
  int failures = 0;
  std::size_t ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), i + 1) == only.end()) continue;
    ++ran;
    Outcome outcome{false, ""};
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] %2zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, ran);
  return failures == 0 ? 0 : 1;
}
