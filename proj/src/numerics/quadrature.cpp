#include "l3lab/numerics/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "l3lab/error.hpp"

namespace l3lab {

namespace {

// v = (pi/2) sinh(u) is capped here so that exp(2v) stays finite.
constexpr double kMaxV = 340.0;

struct Node {
  double s;
  double anchor_s;
  double ds;  // signed offset from the anchor in parameter units
  double weight;
};

Node make_node(double u) {
  const double v = 0.5 * std::numbers::pi * std::sinh(u);
  const double av = std::abs(v);
  const double ev = std::exp(-av);
  // 1/cosh^2(v) = 4 e^{-2|v|} / (1 + e^{-2|v|})^2
  const double sech2 = 4.0 * ev * ev / ((1.0 + ev * ev) * (1.0 + ev * ev));
  const double weight = 0.25 * std::numbers::pi * std::cosh(u) * sech2;
  // distance from the nearer end: 1/(e^{2|v|} + 1)
  const double near = ev * ev / (1.0 + ev * ev);
  if (u > 0.0) return {1.0 - near, 1.0, -near, weight};
  if (u < 0.0) return {near, 0.0, near, weight};
  return {0.5, 0.0, 0.5, weight};
}

cplx eval_node(const PathIntegrand& f, const PathSegment& seg, std::size_t k, const Node& nd) {
  PathPoint p;
  p.segment = k;
  p.s = nd.s;
  p.anchor = segment_point(seg, nd.anchor_s);
  p.offset = segment_offset(seg, nd.anchor_s, nd.ds);
  p.z = p.anchor + p.offset;
  const cplx val = f(p) * segment_tangent(seg, nd.s);
  if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) {
    std::ostringstream os;
    os << "integrand not finite at z = " << p.z;
    throw Error(ErrorCode::NonFinite, os.str());
  }
  return val * nd.weight;
}

QuadResult quad_segment(const PathIntegrand& f, const PathSegment& seg, std::size_t k,
                        double tol, int max_level) {
  const double u_max = std::asinh(2.0 * kMaxV / std::numbers::pi);
  QuadResult out;
  double h = 1.0;
  cplx sum = 0.0;
  double abs_sum = 0.0;
  auto add = [&](double u) {
    const cplx v = eval_node(f, seg, k, make_node(u));
    sum += v;
    abs_sum += std::abs(v);
    ++out.evals;
  };
  add(0.0);
  for (double u = h; u <= u_max; u += h) {
    add(u);
    add(-u);
  }
  cplx prev = sum * h;
  double diff = 0.0;
  double target = tol;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    for (double u = h; u <= u_max; u += 2.0 * h) {
      add(u);
      add(-u);
    }
    const cplx cur = sum * h;
    diff = std::abs(cur - prev);
    prev = cur;
    // Rounding floor: differences below it carry no information.
    target = std::max(tol, 64.0 * std::numeric_limits<double>::epsilon() * abs_sum * h);
    if (level >= 3 && diff <= target) break;
  }
  out.value = prev;
  out.err = diff;
  if (diff > 10.0 * target) {
    std::ostringstream os;
    os << "tanh-sinh refinement did not settle on segment " << k << " (diff " << diff
       << ", tol " << tol << ")";
    throw Error(ErrorCode::NoConvergence, os.str());
  }
  return out;
}

}  // namespace

QuadResult quad_path(const PathIntegrand& f, const ComplexPath& path, const QuadOptions& opt) {
  path.validate();
  if (!(opt.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const double total_len = path.length();
  QuadResult out;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const PathSegment& seg = path.segment(k);
    const double share = opt.tol * segment_length(seg) / total_len;
    const QuadResult r = quad_segment(f, seg, k, share, opt.max_level);
    out.value += r.value;
    out.err += r.err;
    out.evals += r.evals;
  }
  return out;
}

QuadResult quad_path(const std::function<cplx(cplx)>& f, const ComplexPath& path, double tol) {
  QuadOptions opt;
  opt.tol = tol;
  return quad_path([&f](const PathPoint& p) { return f(p.z); }, path, opt);
}

}  // namespace l3lab
