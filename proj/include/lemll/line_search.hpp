#pragma once

#include <optional>

namespace lemll {

struct LineSearchPolicy {
  double armijo_c = 1e-4;
  int max_backtracks = 30;
};

struct LineSearchStep {
  double step;
  double value;
};

// Backtracking by halving from the full step. `slope` is the directional
// derivative at step 0 and must be negative. Returns nothing when no step
// satisfies the sufficient-decrease test.
template <typename Eval>
std::optional<LineSearchStep> backtrack(double f0, double slope, Eval&& eval,
                                        const LineSearchPolicy& policy) {
  double t = 1.0;
  for (int k = 0; k <= policy.max_backtracks; ++k, t *= 0.5) {
    const double f = eval(t);
    if (f <= f0 + policy.armijo_c * t * slope) return LineSearchStep{t, f};
  }
  return std::nullopt;
}

}  // namespace lemll
