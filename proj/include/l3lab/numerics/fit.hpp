#pragma once

#include <vector>

namespace l3lab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual.
  double rms = 0.0;
};

/// Least-squares line y = intercept + slope x. Throws InvalidArgument for
/// fewer than two points, mismatched sizes or degenerate x.
[[nodiscard]] LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace l3lab
