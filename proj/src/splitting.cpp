#include "l3lab/splitting.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "l3lab/error.hpp"
#include "l3lab/numerics/fit.hpp"
#include "l3lab/numerics/ode.hpp"
#include "l3lab/numerics/parallel.hpp"

namespace l3lab {

namespace {

using std::numbers::pi;

constexpr double kThetaTol = 1e-10;
constexpr double kDegenerate = 1e-9;

CartesianState to_state(std::span<const double> y) { return {y[0], y[1], y[2], y[3]}; }

Dop853<double>::Rhs field(double mu) {
  return [mu](double, std::span<const double> y, std::span<double> dy) {
    const auto f = cart_rhs(to_state(y), mu);
    std::copy(f.begin(), f.end(), dy.begin());
  };
}

OdeOptions ode_options(const SectionOptions& opt) {
  OdeOptions o;
  o.rtol = opt.rtol;
  o.atol = opt.atol;
  return o;
}

std::vector<double> seed(double mu, ManifoldBranch b, const SectionOptions& opt) {
  if (!(mu >= 1e-4 && mu <= 1e-2)) throw Error(ErrorCode::InvalidArgument, "mu outside [1e-4, 1e-2]");
  if (!(opt.seed_eps > 0.0 && opt.seed_eps <= 1e-3)) {
    throw Error(ErrorCode::InvalidArgument, "seed_eps outside (0, 1e-3]");
  }
  if (!(opt.t_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_max must be positive");
  const Equilibrium eq = locate_L3(mu);
  const Eigen::Vector4d v = hyperbolic_direction(eq, b);
  return {eq.cart.q1 + opt.seed_eps * v(0), eq.cart.q2 + opt.seed_eps * v(1),
          eq.cart.p1 + opt.seed_eps * v(2), eq.cart.p2 + opt.seed_eps * v(3)};
}

double theta_dot(const CartesianState& s) {
  const PolarState p = polar_from_cart(s);
  return p.G / (p.r * p.r) - 1.0;
}

}  // namespace

double asymptotic_distance(double mu, double A, double theta_abs) {
  if (!(mu > 0.0 && mu <= 0.05)) throw Error(ErrorCode::InvalidArgument, "mu outside (0, 0.05]");
  return std::cbrt(4.0 * mu) * std::exp(-A / std::sqrt(mu)) * theta_abs;
}

const char* to_string(ManifoldBranch b) {
  return b == ManifoldBranch::UnstablePlus ? "unstable_plus" : "stable_plus";
}

Eigen::Vector4d hyperbolic_direction(const Equilibrium& eq, ManifoldBranch b) {
  Eigen::EigenSolver<Eigen::Matrix4d> solver(eq.jacobian, true);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "eigenvectors");
  const double sign = b == ManifoldBranch::UnstablePlus ? 1.0 : -1.0;
  int best = -1;
  for (int i = 0; i < 4; ++i) {
    const cplx ev = solver.eigenvalues()(i);
    if (std::abs(ev.imag()) > 1e-8 * std::abs(ev)) continue;
    if (best < 0 || sign * ev.real() > sign * solver.eigenvalues()(best).real()) best = i;
  }
  if (best < 0 || sign * solver.eigenvalues()(best).real() <= 0.0) {
    throw Error(ErrorCode::HyperbolicInput, "no hyperbolic eigenvalue of the requested sign");
  }
  Eigen::Vector4d v = solver.eigenvectors().col(best).real();
  v.normalize();
  if (v(1) < 0.0) v = -v;
  return v;
}

SectionPoint manifold_section_point(double mu, ManifoldBranch b, const SectionOptions& opt) {
  std::vector<double> y0 = seed(mu, b, opt);
  const double dir = b == ManifoldBranch::UnstablePlus ? 1.0 : -1.0;
  const auto rhs = field(mu);
  const OdeOptions oo = ode_options(opt);

  bool found = false;
  SectionPoint hit;
  auto refine = [&](double ta, std::span<const double> ya, double tb) {
    // Bisection on q1 over the accepted step, re-integrating from its start.
    std::vector<double> start(ya.begin(), ya.end());
    const double qa = ya[0];
    double lo = 0.0;
    double hi = tb - ta;
    std::vector<double> y;
    double t = tb;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      y = integrate_real<double>(rhs, ta, ta + mid, start, oo).y_end;
      t = ta + mid;
      const double th = std::atan2(y[1], y[0]);
      if (std::abs(th - pi / 2) <= kThetaTol) break;
      if ((y[0] > 0.0) == (qa > 0.0)) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (std::abs(hi - lo) <= 1e-15 * std::abs(tb)) {
        throw Error(ErrorCode::EventDegenerate, "bisection stalled before reaching the section");
      }
    }
    const CartesianState s = to_state(y);
    const PolarState p = polar_from_cart(s);
    if (std::abs(p.theta - pi / 2) > kThetaTol) {
      throw Error(ErrorCode::EventDegenerate, "section not resolved");
    }
    if (std::abs(theta_dot(s)) < kDegenerate) {
      throw Error(ErrorCode::EventDegenerate, "theta' vanishes at the crossing");
    }
    return SectionPoint{p.r, p.R, p.G, p.theta, t, s};
  };

  auto observer = [&](double tp, std::span<const double> yp, double t, std::span<const double> y) {
    if (yp[1] <= 0.0 || y[1] <= 0.0) return true;
    if ((yp[0] > 0.0) == (y[0] > 0.0)) return true;
    const SectionPoint sp = refine(tp, yp, t);
    if (sp.r <= 1.0) return true;
    hit = sp;
    found = true;
    return false;
  };
  integrate_real<double>(rhs, 0.0, dir * opt.t_max, std::move(y0), oo, observer);
  if (!found) throw Error(ErrorCode::NoCrossing, "no crossing of the section before t_max");
  return hit;
}

std::vector<std::pair<double, CartesianState>> manifold_orbit(double mu, ManifoldBranch b,
                                                              double t_end, double dt,
                                                              const SectionOptions& opt) {
  if (!(dt > 0.0 && t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end and dt must be positive");
  std::vector<double> y = seed(mu, b, opt);
  const double dir = b == ManifoldBranch::UnstablePlus ? 1.0 : -1.0;
  const auto rhs = field(mu);
  const OdeOptions oo = ode_options(opt);
  std::vector<std::pair<double, CartesianState>> out{{0.0, to_state(y)}};
  const auto n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  for (std::size_t k = 1; k <= n; ++k) {
    const double ta = dir * std::min(t_end, (k - 1) * dt);
    const double tb = dir * std::min(t_end, k * dt);
    y = integrate_real<double>(rhs, ta, tb, std::move(y), oo).y_end;
    out.emplace_back(tb, to_state(y));
  }
  return out;
}

SplittingSample splitting_sample(double mu, double A, double theta_abs, const SectionOptions& opt) {
  SplittingSample s;
  s.mu = mu;
  s.unstable = manifold_section_point(mu, ManifoldBranch::UnstablePlus, opt);
  s.stable = manifold_section_point(mu, ManifoldBranch::StablePlus, opt);
  s.gap_r = s.unstable.r - s.stable.r;
  s.gap_R = s.unstable.R - s.stable.R;
  s.gap_G = s.unstable.G - s.stable.G;
  s.dist_measured = std::sqrt(s.gap_r * s.gap_r + s.gap_R * s.gap_R + s.gap_G * s.gap_G);
  s.dist_asymptotic = asymptotic_distance(mu, A, theta_abs);
  return s;
}

SplittingFit fit_splitting_exponent(const std::vector<double>& mus, double A, double theta_abs,
                                    const SectionOptions& opt, unsigned threads) {
  if (mus.size() < 4) throw Error(ErrorCode::InvalidArgument, "at least four mass ratios needed");
  for (double mu : mus) {
    if (!(mu >= 1e-4 && mu <= 1e-2)) throw Error(ErrorCode::InvalidArgument, "mu outside [1e-4, 1e-2]");
  }
  SplittingFit fit;
  fit.samples.resize(mus.size());
  parallel_for(mus.size(), threads,
               [&](std::size_t i) { fit.samples[i] = splitting_sample(mus[i], A, theta_abs, opt); });
  std::vector<double> x, y;
  for (const SplittingSample& s : fit.samples) {
    x.push_back(1.0 / std::sqrt(s.mu));
    y.push_back(std::log(s.dist_measured / std::cbrt(s.mu)));
  }
  const LineFit lf = fit_line(x, y);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.rms = lf.rms;
  fit.theta_eff = std::exp(lf.intercept) / std::cbrt(4.0);
  return fit;
}

}  // namespace l3lab
