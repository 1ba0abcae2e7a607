#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "klstoch/errors.hpp"
#include "klstoch/quadrature.hpp"

namespace klstoch {

template <class H>
double integrate_adaptive(const H& h, double lo, double hi, const std::vector<double>& breakpoints,
                          std::size_t initial_panels, double rel_tol, int max_levels) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts{lo};
  for (double x : breakpoints) {
    if (x > lo && x < hi) cuts.push_back(x);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto evaluate = [&](std::size_t panels, double& l1) {
    double total = 0.0;
    l1 = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double share = (cuts[s + 1] - cuts[s]) / (hi - lo);
      const auto p = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(share * panels)));
      total += composite_gauss(h, cuts[s], cuts[s + 1], p);
      l1 += composite_gauss([&](double x) { return std::abs(h(x)); }, cuts[s], cuts[s + 1], p);
    }
    return total;
  };

  std::size_t panels = std::max<std::size_t>(1, initial_panels);
  double l1 = 0.0;
  double previous = evaluate(panels, l1);
  double current = previous;
  for (int level = 1; level <= max_levels; ++level) {
    panels *= 2;
    previous = current;
    current = evaluate(panels, l1);
    if (std::abs(current - previous) <= rel_tol * std::max(std::abs(current), l1) ||
        current == previous) {
      return current;
    }
  }
  throw ConvergenceError("quadrature did not converge", current, previous);
}

}  // namespace klstoch
