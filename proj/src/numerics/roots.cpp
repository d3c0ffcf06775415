#include "l3lab/numerics/roots.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "l3lab/error.hpp"

namespace l3lab {

double find_root(const std::function<double(double)>& g, const std::function<double(double)>& dg,
                 double lo, double hi, const RootOptions& opt) {
  if (!(lo <= hi)) std::swap(lo, hi);
  double glo = g(lo);
  double ghi = g(hi);
  if (!std::isfinite(glo) || !std::isfinite(ghi)) {
    throw Error(ErrorCode::NonFinite, "function not finite at bracket ends");
  }
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0.0) == (ghi > 0.0)) {
    std::ostringstream os;
    os << "g(" << lo << ") = " << glo << " and g(" << hi << ") = " << ghi << " share a sign";
    throw Error(ErrorCode::NoBracket, os.str());
  }
  // Orient so that g(a) < 0 < g(b).
  double a = glo < 0.0 ? lo : hi;
  double b = glo < 0.0 ? hi : lo;
  double x = 0.5 * (lo + hi);
  double gx = g(x);
  double x_old = a;
  double g_old = glo < 0.0 ? glo : ghi;
  auto done = [&] {
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x);
    return std::abs(gx) <= opt.tol || std::abs(b - a) <= std::max(opt.tol, floor);
  };
  for (int it = 0; it < opt.max_iter; ++it) {
    if (done()) return x;
    if (gx < 0.0) {
      a = x;
    } else {
      b = x;
    }
    double slope = 0.0;
    if (dg) {
      slope = dg(x);
    } else if (x != x_old) {
      slope = (gx - g_old) / (x - x_old);
    }
    double next = slope != 0.0 && std::isfinite(slope) ? x - gx / slope : a;
    const double left = std::min(a, b);
    const double right = std::max(a, b);
    // Reject Newton steps leaving the bracket or stalling relative to bisection.
    if (!(next > left && next < right) || std::abs(next - x) > 0.5 * (right - left)) {
      next = 0.5 * (left + right);
    }
    x_old = x;
    g_old = gx;
    x = next;
    gx = g(x);
    if (!std::isfinite(gx)) throw Error(ErrorCode::NonFinite, "function not finite inside bracket");
    if (gx == 0.0) return x;
  }
  if (done()) return x;
  throw Error(ErrorCode::NoConvergence, "root iteration budget exhausted");
}

double find_root(const std::function<double(double)>& g, double lo, double hi, double tol) {
  RootOptions opt;
  opt.tol = tol;
  return find_root(g, {}, lo, hi, opt);
}

}  // namespace l3lab
