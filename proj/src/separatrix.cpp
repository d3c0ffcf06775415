#include "l3lab/separatrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "l3lab/error.hpp"
#include "l3lab/numerics/fit.hpp"

namespace l3lab {

namespace {

using std::numbers::pi;
using std::numbers::sqrt2;
const cplx I(0.0, 1.0);

// Centers of the four linear factors of f_hat, in BranchedPoint order.
std::array<double, 4> factor_centers() { return {0.0, -1.0, a_plus(), a_minus()}; }

// Splits the line from `from` to `to` geometrically in the distance to
// `focus`, which must be collinear with and nearer to one end of it.
void geometric_line(ComplexPath& path, cplx to, cplx focus, double ratio = 2.0) {
  const cplx from = path.end();
  const double d_from = std::abs(from - focus);
  const double d_to = std::abs(to - focus);
  std::vector<cplx> pts;
  if (d_from < d_to) {
    for (double d = d_from * ratio; d < d_to / ratio * 1.5; d *= ratio) {
      pts.push_back(focus + (to - focus) * (d / d_to));
    }
  } else {
    std::vector<cplx> rev;
    for (double d = d_to * ratio; d < d_from / ratio * 1.5; d *= ratio) {
      rev.push_back(focus + (from - focus) * (d / d_from));
    }
    pts.assign(rev.rbegin(), rev.rend());
  }
  for (cplx p : pts) path.line_to(p);
  path.line_to(to);
}

}  // namespace

double a_plus() { return 0.5 * (sqrt2 - 1.0); }
double a_minus() { return -0.5 * (sqrt2 + 1.0); }

cplx pend_V(cplx lambda) { return 1.0 - std::cos(lambda) - 1.0 / (2.0 * std::cos(0.5 * lambda)); }

cplx pend_energy(const PendulumState& s) { return -1.5 * s.Lambda * s.Lambda + pend_V(s.lambda); }

std::array<cplx, 2> pend_rhs(cplx lambda, cplx Lambda) {
  const cplx c = std::cos(0.5 * lambda);
  if (std::abs(c) < 1e-12) throw Error(ErrorCode::Collision, "cos(lambda/2) vanishes");
  return {-3.0 * Lambda, -std::sin(lambda) + std::sin(0.5 * lambda) / (4.0 * c * c)};
}

double lambda0() { return 2.0 * std::acos(a_plus()); }

QuadResult compute_A(double tol) {
  const double ap = a_plus();
  const double am = a_minus();
  QuadOptions opt;
  opt.tol = tol;
  return quad_path(
      [=](const PathPoint& p) {
        const double x = p.z.real();
        const double gap = p.anchor.real() == ap ? -p.offset.real() : ap - x;
        return cplx(std::sqrt(x / (3.0 * (x + 1.0) * gap * (x - am))) / (1.0 - x));
      },
      ComplexPath::line(0.0, ap), opt);
}

QuadResult compute_A_rescaled(double tol) {
  const double b = 0.5 * (sqrt2 - 1.0);
  QuadOptions opt;
  opt.tol = tol;
  return quad_path(
      [=](const PathPoint& p) {
        const double x = p.z.real();
        // 1 - 4x - 4x^2 = 4 d (sqrt2 - d) with d = b - x
        const double d = p.anchor.real() == b ? -p.offset.real() : b - x;
        const double poly = 4.0 * d * (sqrt2 - d);
        return cplx(2.0 / (1.0 - x) * std::sqrt(x / (3.0 * (x + 1.0) * poly)));
      },
      ComplexPath::line(0.0, b), opt);
}

namespace {

cplx f_hat_parts(cplx q_minus_1, const std::array<cplx, 4>& factors,
                 const std::array<double, 4>& args) {
  const double mod = std::sqrt(std::abs(factors[0]) / (3.0 * std::abs(factors[1]) *
                                                       std::abs(factors[2]) * std::abs(factors[3])));
  const double phase = 0.5 * (args[0] - args[1] - args[2] - args[3]);
  return std::polar(mod, phase) / q_minus_1;
}

}  // namespace

cplx f_hat(cplx q, const std::array<cplx, 4>& factors, const std::array<double, 4>& args) {
  return f_hat_parts(q - 1.0, factors, args);
}

cplx f_hat(const BranchedPoint& p) {
  const auto c = factor_centers();
  return f_hat(p.q, {p.q - c[0], p.q - c[1], p.q - c[2], p.q - c[3]}, p.args);
}

BranchTracker::BranchTracker(const ComplexPath& path) : path_(path) {
  const auto c = factor_centers();
  bool first = true;
  Rung prev{};
  ladder_.resize(path_.size());
  for (std::size_t k = 0; k < path_.size(); ++k) {
    for (int j = 0; j < kLadder; ++j) {
      Rung r;
      r.s = (j + 0.5) / kLadder;
      r.z = segment_point(path_.segment(k), r.s);
      for (int f = 0; f < 4; ++f) {
        r.args[f] = first ? std::arg(r.z - c[f])
                          : prev.args[f] + std::arg((r.z - c[f]) / (prev.z - c[f]));
      }
      first = false;
      prev = r;
      ladder_[k].push_back(r);
    }
  }
}

BranchedPoint BranchTracker::at(const PathPoint& p) const {
  const auto c = factor_centers();
  const auto& rungs = ladder_.at(p.segment);
  const int j = std::clamp(static_cast<int>(p.s * kLadder), 0, kLadder - 1);
  const Rung& r = rungs[j];
  BranchedPoint out;
  out.q = p.z;
  for (int f = 0; f < 4; ++f) {
    const cplx diff = (p.anchor - c[f]) + p.offset;
    out.args[f] = r.args[f] + std::arg(diff / (r.z - c[f]));
  }
  return out;
}

cplx BranchTracker::eval(const PathPoint& p) const {
  const auto c = factor_centers();
  const BranchedPoint b = at(p);
  std::array<cplx, 4> factors;
  for (int f = 0; f < 4; ++f) factors[f] = (p.anchor - c[f]) + p.offset;
  return f_hat_parts((p.anchor - 1.0) + p.offset, factors, b.args);
}

std::array<double, 4> BranchTracker::end_args() const {
  PathPoint p;
  p.segment = path_.size() - 1;
  p.s = 1.0;
  p.anchor = path_.end();
  p.offset = 0.0;
  p.z = p.anchor;
  return at(p).args;
}

QuadResult integrate_f_hat(const ComplexPath& path, double tol) {
  const BranchTracker tracker(path);
  QuadOptions opt;
  opt.tol = tol;
  return quad_path([&tracker](const PathPoint& p) { return tracker.eval(p); }, path, opt);
}

double residue_pole() { return std::sqrt(1.0 / (6.0 * (1.0 - a_plus()) * (1.0 - a_minus()))); }

cplx residue_pole_numeric(double radius, double tol) {
  if (!(radius > 1e-6 && radius < 0.2)) {
    throw Error(ErrorCode::InvalidArgument, "residue radius outside (1e-6, 0.2)");
  }
  const auto path = ComplexPath::arc(1.0, radius, pi, 3.0 * pi);
  const QuadResult r = integrate_f_hat(path, tol);
  return r.value / (2.0 * pi * I);
}

const char* to_string(SingularityPath kind) {
  switch (kind) {
    case SingularityPath::ToZeroUpper: return "to_zero_upper";
    case SingularityPath::ToZeroLower: return "to_zero_lower";
    case SingularityPath::ToInfinityUpper: return "to_infinity_upper";
    case SingularityPath::ToInfinityLower: return "to_infinity_lower";
  }
  return "unknown";
}

ComplexPath singularity_path(SingularityPath kind, const SingularityPathOptions& opt) {
  const double ap = a_plus();
  const double eps = opt.detour;
  const bool upper = kind == SingularityPath::ToZeroUpper || kind == SingularityPath::ToInfinityUpper;
  if (kind == SingularityPath::ToZeroUpper || kind == SingularityPath::ToZeroLower) {
    if (!(eps > 0.0 && eps < 0.5 * ap)) throw Error(ErrorCode::InvalidArgument, "detour radius");
    auto path = ComplexPath::line(ap, ap + eps);
    path.arc_about(ap, upper ? pi : -pi);
    geometric_line(path, 0.0, ap);
    return path;
  }
  if (!(eps > 0.0 && eps < 0.5 * (1.0 - ap))) throw Error(ErrorCode::InvalidArgument, "detour");
  if (!(opt.r_max > 4.0)) throw Error(ErrorCode::InvalidArgument, "r_max must exceed 4");
  auto path = ComplexPath::line(ap, 0.5 * (ap + 1.0));
  geometric_line(path, 1.0 - eps, 1.0);
  path.arc_about(1.0, upper ? -pi : pi);
  geometric_line(path, 2.0, 1.0);
  geometric_line(path, opt.r_max, 0.0);
  return path;
}

TStar t_star(SingularityPath kind, const SingularityPathOptions& opt) {
  const auto path = singularity_path(kind, opt);
  const BranchTracker tracker(path);
  QuadOptions qopt;
  qopt.tol = opt.tol;
  const QuadResult r =
      quad_path([&tracker](const PathPoint& p) { return tracker.eval(p); }, path, qopt);
  TStar out;
  out.value = r.value;
  out.err = r.err;
  out.evals = r.evals;
  if (kind == SingularityPath::ToInfinityUpper || kind == SingularityPath::ToInfinityLower) {
    // f_hat ~ phase / (sqrt3 q^2) with a vanishing 1/q^3 correction.
    const auto a = tracker.end_args();
    const cplx phase = std::polar(1.0, 0.5 * (a[0] - a[1] - a[2] - a[3]));
    out.tail = phase / (std::sqrt(3.0) * opt.r_max);
    out.value += out.tail;
    out.err += 10.0 / (opt.r_max * opt.r_max);
  }
  return out;
}

OdeOptions separatrix_ode_options() {
  OdeOptions opt;
  opt.rtol = 1e-13;
  opt.atol = 1e-13;
  return opt;
}

PendulumState continue_separatrix(const PendulumState& start, const ComplexPath& path,
                                  const OdeOptions& opt) {
  auto field = [](cplx, std::span<const cplx> y, std::span<cplx> dy) {
    const auto f = pend_rhs(y[0], y[1]);
    dy[0] = f[0];
    dy[1] = f[1];
  };
  const auto r = integrate_ode(field, path, {start.lambda, start.Lambda}, opt);
  return {r.y_end[0], r.y_end[1]};
}

PendulumState sigma(const ComplexPath& t_path, const OdeOptions& opt) {
  if (std::abs(t_path.start()) > ComplexPath::kJoinTolerance) {
    throw Error(ErrorCode::InvalidArgument, "separatrix paths start at t = 0");
  }
  return continue_separatrix({lambda0(), 0.0}, t_path, opt);
}

PendulumState sigma_at(cplx t, const OdeOptions& opt) {
  if (t == cplx(0.0)) return {lambda0(), 0.0};
  std::vector<cplx> verts{0.0};
  if (t.real() != 0.0 && t.imag() != 0.0) verts.push_back(t.real());
  verts.push_back(t);
  return sigma(ComplexPath::polyline(verts), opt);
}

namespace {

cplx linear_intercept(const std::vector<double>& x, const std::vector<cplx>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sxx = 0;
  cplx sy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sxx += x[i] * x[i];
    sy += y[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  return (sxx * sy - sx * sxy) / det;
}

}  // namespace

std::vector<double> default_branch_offsets() {
  std::vector<double> out;
  for (int k = 0; k <= 16; ++k) out.push_back(std::pow(10.0, -4.0 + k / 16.0));
  return out;
}

SingularityReport fit_branch(const std::vector<double>& offsets, double A) {
  if (offsets.size() < 3) throw Error(ErrorCode::InvalidArgument, "need at least 3 offsets");
  std::vector<double> s = offsets;
  std::sort(s.begin(), s.end(), std::greater<>());
  if (s.back() <= 0.0 || s.front() >= A) throw Error(ErrorCode::InvalidArgument, "offset range");

  std::vector<double> ls, ld, lL;
  std::vector<cplx> lam_dev, Lam;
  PendulumState state = sigma(ComplexPath::line(0.0, I * (A - s.front())));
  cplx t = I * (A - s.front());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const cplx next = I * (A - s[i]);
    if (next != t) {
      state = continue_separatrix(state, ComplexPath::line(t, next));
      t = next;
    }
    lam_dev.push_back(state.lambda - pi);
    Lam.push_back(state.Lambda);
    ls.push_back(std::log(s[i]));
    ld.push_back(std::log(std::abs(state.lambda - pi)));
    lL.push_back(std::log(std::abs(state.Lambda)));
  }
  SingularityReport rep;
  rep.t_star = I * A;
  rep.kind = SingularityKind::Branch23;
  const LineFit f1 = fit_line(ls, ld);
  const LineFit f2 = fit_line(ls, lL);
  rep.fitted_exponent = f1.slope;
  rep.lambda_exponent = f2.slope;
  rep.residual = std::max(f1.rms, f2.rms);

  // On this ray t - iA = s e^{-i pi/2}, so (t - iA)^p = s^p e^{-i pi p/2}.
  // Coefficients come from u(s) = c + b s^{2/3}, fitted by least squares.
  std::vector<double> w;
  std::vector<cplx> u1, u2;
  for (std::size_t i = 0; i < s.size(); ++i) {
    w.push_back(std::pow(s[i], 2.0 / 3.0));
    u1.push_back(lam_dev[i] / std::polar(std::pow(s[i], 2.0 / 3.0), -pi / 3.0));
    u2.push_back(Lam[i] / std::polar(std::pow(s[i], -1.0 / 3.0), pi / 6.0));
  }
  rep.fitted_coefficient = linear_intercept(w, u1);
  rep.Lambda_coefficient = linear_intercept(w, u2);
  rep.alpha_fitted = rep.fitted_coefficient / 3.0;
  double best = 1e300;
  for (int k = 0; k < 3; ++k) {
    const cplx root = std::polar(std::cbrt(0.5), 2.0 * pi * k / 3.0);
    if (std::abs(root - rep.alpha_fitted) < best) {
      best = std::abs(root - rep.alpha_fitted);
      rep.alpha = root;
    }
  }
  if (rep.residual > 1e-2) {
    std::ostringstream os;
    os << "log-log regression residual " << rep.residual << " exceeds 1e-2";
    throw Error(ErrorCode::FitRejected, os.str());
  }
  return rep;
}

LambdaScan check_zero_of_Lambda(const LambdaScanOptions& opt, double A) {
  if (!(opt.spacing > 0.0 && opt.spacing <= 0.02)) {
    throw Error(ErrorCode::InvalidArgument, "grid spacing must be in (0, 0.02]");
  }
  const int n_re = static_cast<int>(std::ceil(opt.re_max / opt.spacing));
  const int n_im = static_cast<int>(std::ceil(A / opt.spacing));
  const double h_re = opt.re_max / n_re;
  const double h_im = A / n_im;
  LambdaScan scan;
  scan.min_abs_Lambda = std::numeric_limits<double>::infinity();
  auto consider = [&](cplx t, const PendulumState& st) {
    const bool hole = std::abs(t) < opt.hole_radius || std::abs(t - I * A) < opt.hole_radius ||
                      std::abs(t + I * A) < opt.hole_radius;
    if (hole) return;
    ++scan.points;
    if (std::abs(st.Lambda) < scan.min_abs_Lambda) {
      scan.min_abs_Lambda = std::abs(st.Lambda);
      scan.argmin = t;
    }
  };
  for (int dir : {1, -1}) {
    PendulumState base{lambda0(), 0.0};
    double re = 0.0;
    for (int k = 0; k <= n_re; ++k) {
      if (dir < 0 && k == 0) continue;
      const double target = dir * k * h_re;
      if (target != re) {
        base = continue_separatrix(base, ComplexPath::line(re, target));
        re = target;
      }
      for (int side : {1, -1}) {
        PendulumState st = base;
        cplx t = re;
        for (int j = 0; j < n_im; ++j) {
          const cplx next(re, side * (j + 0.5) * h_im);
          st = continue_separatrix(st, ComplexPath::line(t, next));
          t = next;
          consider(t, st);
        }
      }
    }
  }
  return scan;
}

}  // namespace l3lab
