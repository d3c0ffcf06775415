#pragma once

#include <functional>

namespace l3lab {

struct RootOptions {
  double tol = 1e-14;
  int max_iter = 200;
};

/// Safeguarded Newton on [lo, hi] with bisection fallback. When `dg` is
/// empty the derivative is replaced by the secant slope through the latest
/// iterates. Throws NoBracket if g(lo) and g(hi) share a strict sign.
double find_root(const std::function<double(double)>& g, const std::function<double(double)>& dg,
                 double lo, double hi, const RootOptions& opt = {});

double find_root(const std::function<double(double)>& g, double lo, double hi, double tol);

}  // namespace l3lab
