#include "l3lab/rpc3bp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "l3lab/error.hpp"
#include "l3lab/numerics/roots.hpp"

namespace l3lab {

namespace {

constexpr double kCollision = 1e-12;
const cplx I(0.0, 1.0);

void check_mu(double mu) {
  if (!(mu >= 0.0 && mu <= 0.5)) throw Error(ErrorCode::InvalidArgument, "mu outside [0, 1/2]");
}

double checked_dist(double dx, double dy, const char* who) {
  const double d = std::hypot(dx, dy);
  if (d < kCollision) {
    std::ostringstream os;
    os << "collision with " << who;
    throw Error(ErrorCode::Collision, os.str());
  }
  return d;
}

// H1 from the planar position: (1/sqrt(D0) - 1/sqrt(Dmu))/mu + 1/sqrt(Dmu) - 1/sqrt(D[mu-1]),
// with the first difference rewritten to avoid cancellation as mu -> 0.
template <class T>
T h1_from_roots(T X, T s0, T smu, T sp, double mu) {
  return (mu - 2.0 * X) / (s0 * smu * (s0 + smu)) + 1.0 / smu - 1.0 / sp;
}

}  // namespace

MassRatio MassRatio::from_mu(double mu) {
  check_mu(mu);
  if (mu <= 0.0) throw Error(ErrorCode::InvalidArgument, "mu must be positive");
  return {mu, std::sqrt(std::sqrt(mu))};
}

MassRatio MassRatio::from_delta(double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  const double d2 = delta * delta;
  return {d2 * d2, delta};
}

double h_cart(const CartesianState& s, double mu) {
  check_mu(mu);
  const double r1 = checked_dist(s.q1 - mu, s.q2, "the large primary");
  const double r2 = checked_dist(s.q1 - mu + 1.0, s.q2, "the small primary");
  const double kinetic = 0.5 * (s.p1 * s.p1 + s.p2 * s.p2);
  return kinetic - (s.q1 * s.p2 - s.q2 * s.p1) - (1.0 - mu) / r1 - mu / r2;
}

std::array<double, 4> cart_rhs(const CartesianState& s, double mu) {
  const double r1 = checked_dist(s.q1 - mu, s.q2, "the large primary");
  const double r2 = checked_dist(s.q1 - mu + 1.0, s.q2, "the small primary");
  const double c1 = (1.0 - mu) / (r1 * r1 * r1);
  const double c2 = mu / (r2 * r2 * r2);
  return {
      s.p1 + s.q2,
      s.p2 - s.q1,
      s.p2 - c1 * (s.q1 - mu) - c2 * (s.q1 - mu + 1.0),
      -s.p1 - c1 * s.q2 - c2 * s.q2,
  };
}

Eigen::Matrix4d cart_jacobian(const CartesianState& s, double mu) {
  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  J(0, 1) = 1.0;
  J(0, 2) = 1.0;
  J(1, 0) = -1.0;
  J(1, 3) = 1.0;
  J(2, 3) = 1.0;
  J(3, 2) = -1.0;
  // d(pdot)/dq = -sum m (I / r^3 - 3 d d^T / r^5)
  const std::array<std::pair<double, double>, 2> bodies{{{mu, 1.0 - mu}, {mu - 1.0, mu}}};
  for (const auto& [cx, m] : bodies) {
    const double dx = s.q1 - cx;
    const double dy = s.q2;
    const double r = checked_dist(dx, dy, "a primary");
    const double r3 = r * r * r;
    const double r5 = r3 * r * r;
    J(2, 0) -= m * (1.0 / r3 - 3.0 * dx * dx / r5);
    J(2, 1) -= m * (-3.0 * dx * dy / r5);
    J(3, 0) -= m * (-3.0 * dx * dy / r5);
    J(3, 1) -= m * (1.0 / r3 - 3.0 * dy * dy / r5);
  }
  return J;
}

CartesianState reflect(const CartesianState& s) { return {s.q1, -s.q2, -s.p1, s.p2}; }

PolarState polar_from_cart(const CartesianState& s) {
  const double r = std::hypot(s.q1, s.q2);
  if (r <= kCollision) throw Error(ErrorCode::OriginSingular, "r vanishes");
  return {r, std::atan2(s.q2, s.q1), (s.q1 * s.p1 + s.q2 * s.p2) / r, s.q1 * s.p2 - s.q2 * s.p1};
}

CartesianState cart_from_polar(const PolarState& s) {
  if (s.r <= kCollision) throw Error(ErrorCode::OriginSingular, "r vanishes");
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  const double gr = s.G / s.r;
  return {s.r * c, s.r * sn, s.R * c - gr * sn, s.R * sn + gr * c};
}

PolarEnergy h_polar(const PolarState& s, double mu) {
  check_mu(mu);
  if (s.r <= kCollision) throw Error(ErrorCode::OriginSingular, "r vanishes");
  const double X = s.r * std::cos(s.theta);
  const double Y = s.r * std::sin(s.theta);
  const double s0 = s.r;
  const double smu = checked_dist(X - mu, Y, "the large primary");
  const double sp = checked_dist(X - mu + 1.0, Y, "the small primary");
  PolarEnergy e;
  e.h0 = 0.5 * (s.R * s.R + s.G * s.G / (s.r * s.r)) - 1.0 / s.r - s.G;
  e.h1 = h1_from_roots(X, s0, smu, sp, mu);
  return e;
}

double kepler_u(double ell, double e) {
  if (!(e >= 0.0 && e < 1.0)) throw Error(ErrorCode::HyperbolicInput, "eccentricity not in [0,1)");
  if (e == 0.0) return ell;
  auto g = [=](double u) { return u - e * std::sin(u) - ell; };
  auto dg = [=](double u) { return 1.0 - e * std::cos(u); };
  RootOptions opt;
  opt.tol = 1e-15 * std::max(1.0, std::abs(ell));
  return find_root(g, dg, ell - e, ell + e, opt);
}

cplx eccentricity(cplx L, cplx eta, cplx xi) {
  const cplx ex = std::sqrt(2.0 * L - eta * xi) / (2.0 * L);
  return 2.0 * ex * std::sqrt(eta * xi);
}

PolarState polar_from_poincare(const PoincareState& s) {
  if (!(s.L > 0.0)) throw Error(ErrorCode::InvalidArgument, "L must be positive");
  const double ex = std::sqrt(2.0 * s.L - (s.eta * s.xi).real()) / (2.0 * s.L);
  const double amp = std::abs(s.eta);
  const double e = 2.0 * ex * amp;
  if (!(e < 1.0)) throw Error(ErrorCode::HyperbolicInput, "eccentricity >= 1");
  const double g = amp > 0.0 ? std::arg(s.eta) : 0.0;
  const double u = kepler_u(s.lambda - g, e);
  const double ecu = e * std::cos(u);
  const double denom = 1.0 - ecu;
  PolarState p;
  p.r = s.L * s.L * denom;
  const double f = std::atan2(std::sqrt(1.0 - e * e) * std::sin(u), std::cos(u) - e);
  p.theta = f + g;
  p.R = e * std::sin(u) / (s.L * denom);
  p.G = s.L - (s.eta * s.xi).real();
  return p;
}

PoincareState poincare_from_polar(const PolarState& s) {
  if (s.r <= kCollision) throw Error(ErrorCode::OriginSingular, "r vanishes");
  const double inv_l2 = 2.0 / s.r - s.R * s.R - s.G * s.G / (s.r * s.r);
  if (!(inv_l2 > 0.0)) throw Error(ErrorCode::HyperbolicInput, "orbit is not elliptic");
  const double L2 = 1.0 / inv_l2;
  const double L = std::sqrt(L2);
  const double esu = s.R * s.r / L;
  const double ecu = 1.0 - s.r / L2;
  const double e = std::hypot(esu, ecu);
  if (!(e < 1.0)) throw Error(ErrorCode::HyperbolicInput, "eccentricity >= 1");
  PoincareState out;
  out.L = L;
  if (e == 0.0) {
    out.lambda = s.theta;
    return out;
  }
  const double u = std::atan2(esu, ecu);
  const double ell = u - esu;
  const double f = std::atan2(std::sqrt(1.0 - e * e) * esu, ecu - e * e);
  const double g = s.theta - f;
  out.lambda = std::remainder(ell + g, 2.0 * std::numbers::pi);
  const double amp = std::sqrt(std::max(0.0, L - s.G));
  out.eta = std::polar(amp, g);
  out.xi = std::conj(out.eta);
  return out;
}

PlanarPosition position_from_poincare(const ComplexPoincareState& s) {
  const cplx ex = std::sqrt(2.0 * s.L - s.eta * s.xi) / (2.0 * s.L);
  const cplx k = ex * (s.eta + s.xi);
  const cplx h = -I * ex * (s.eta - s.xi);
  cplx v = s.lambda;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    const cplx sv = std::sin(v);
    const cplx cv = std::cos(v);
    const cplx F = v - k * sv + h * cv - s.lambda;
    const cplx dF = 1.0 - k * cv - h * sv;
    const cplx step = F / dF;
    const double size = std::abs(step);
    const double scale = std::max(1.0, std::abs(v));
    // Stop once Newton reaches rounding level and stops contracting.
    if (size <= 1e-15 * scale && size >= 0.5 * last) break;
    v -= step;
    if (size == 0.0) break;
    last = size;
    if (it == 60) {
      if (size <= 1e-12 * scale) break;
      throw Error(ErrorCode::NoConvergence, "complex Kepler iteration");
    }
  }
  const cplx beta = 1.0 / (1.0 + std::sqrt(1.0 - h * h - k * k));
  const cplx a = s.L * s.L;
  const cplx sv = std::sin(v);
  const cplx cv = std::cos(v);
  return {a * ((1.0 - h * h * beta) * cv + h * k * beta * sv - k),
          a * ((1.0 - k * k * beta) * sv + h * k * beta * cv - h)};
}

cplx D_exact(double zeta, const ComplexPoincareState& s) {
  const auto p = position_from_poincare(s);
  return (p.X - zeta) * (p.X - zeta) + p.Y * p.Y;
}

cplx D_exact(double zeta, const PoincareState& s) {
  const PolarState p = polar_from_poincare(s);
  return p.r * p.r - 2.0 * zeta * p.r * std::cos(p.theta) + zeta * zeta;
}

DSeries D_series(double zeta, const ComplexPoincareState& s) {
  const cplx L = s.L;
  const cplx L2 = L * L;
  const cplx em = std::exp(-I * s.lambda);
  const cplx ep = std::exp(I * s.lambda);
  const cplx c = std::sqrt(2.0 * L * L2) / 2.0;
  DSeries d;
  d.d0 = L2 * L2 - 2.0 * zeta * L2 * std::cos(s.lambda) + zeta * zeta;
  d.d1 = s.eta * c * (3.0 * zeta - 2.0 * L2 * em - zeta * em * em) +
         s.xi * c * (3.0 * zeta - 2.0 * L2 * ep - zeta * ep * ep);
  d.d2 = -s.eta * s.eta * (L * em / 4.0) * (zeta + 2.0 * L2 * em + 3.0 * zeta * em * em) -
         s.xi * s.xi * (L * ep / 4.0) * (zeta + 2.0 * L2 * ep + 3.0 * zeta * ep * ep) +
         s.eta * s.xi * L * (3.0 * L2 + 2.0 * zeta * std::cos(s.lambda));
  return d;
}

cplx h0_poincare(cplx L, cplx eta, cplx xi) { return -1.0 / (2.0 * L * L) - L + eta * xi; }

double h1_poincare(const PoincareState& s, double mu) {
  const PolarState p = polar_from_poincare(s);
  return h_polar(p, mu).h1;
}

cplx h1_poincare(const ComplexPoincareState& s, double mu) {
  check_mu(mu);
  const auto p = position_from_poincare(s);
  const cplx D0 = p.X * p.X + p.Y * p.Y;
  const cplx Dmu = (p.X - mu) * (p.X - mu) + p.Y * p.Y;
  const cplx Dp = (p.X - mu + 1.0) * (p.X - mu + 1.0) + p.Y * p.Y;
  if (std::abs(D0) < kCollision || std::abs(Dmu) < kCollision || std::abs(Dp) < kCollision) {
    throw Error(ErrorCode::Collision, "complex state at a primary");
  }
  const cplx s_ref = 2.0 * std::cos(0.5 * s.lambda);
  const cplx sp = std::abs(s_ref) > 1e-8 ? s_ref * std::sqrt(Dp / (s_ref * s_ref)) : std::sqrt(Dp);
  return h1_from_roots<cplx>(p.X, std::sqrt(D0), std::sqrt(Dmu), sp, mu);
}

double h_poincare(const PoincareState& s, double mu) {
  return h0_poincare(s.L, s.eta, s.xi).real() + mu * h1_poincare(s, mu);
}

double potential_V(double lambda) {
  return 1.0 - std::cos(lambda) - 1.0 / std::sqrt(2.0 + 2.0 * std::cos(lambda));
}

cplx potential_V(cplx lambda) {
  return 1.0 - std::cos(lambda) - 1.0 / (2.0 * std::cos(0.5 * lambda));
}

cplx F_pend(cplx z) {
  const cplx opz = 1.0 + z;
  return z * z * z * (4.0 + 3.0 * z) / (2.0 * opz * opz);
}

cplx h_scaled(cplx lambda, cplx Lambda, cplx x, cplx y, double delta) {
  const MassRatio m = MassRatio::from_delta(delta);
  const double d2 = delta * delta;
  const cplx z = d2 * Lambda;
  // F_pend(z)/delta^4 = delta^2 Lambda^3 (4 + 3z) / (2 (1+z)^2)
  const cplx fz = d2 * Lambda * Lambda * Lambda * (4.0 + 3.0 * z) / (2.0 * (1.0 + z) * (1.0 + z));
  const ComplexPoincareState s{lambda, 1.0 + z, delta * x, delta * y};
  return -1.5 * Lambda * Lambda + fz + x * y / d2 + h1_poincare(s, m.mu);
}

double h_scaled(double lambda, double Lambda, cplx x, cplx y, double delta) {
  const MassRatio m = MassRatio::from_delta(delta);
  const double d2 = delta * delta;
  const double z = d2 * Lambda;
  const double fz = d2 * Lambda * Lambda * Lambda * (4.0 + 3.0 * z) / (2.0 * (1.0 + z) * (1.0 + z));
  const PoincareState s{lambda, 1.0 + z, delta * x, delta * y};
  return -1.5 * Lambda * Lambda + fz + (x * y).real() / d2 + h1_poincare(s, m.mu);
}

double l3_balance(double d, double mu) {
  const double a = d - mu;
  const double b = d + 1.0 - mu;
  return d - (1.0 - mu) / (a * a) - mu / (b * b);
}

Equilibrium locate_L3(double mu) {
  if (!(mu > 0.0 && mu <= 0.05)) throw Error(ErrorCode::InvalidArgument, "mu outside (0, 0.05]");
  auto g = [mu](double d) { return l3_balance(d, mu); };
  auto dg = [mu](double d) {
    const double a = d - mu;
    const double b = d + 1.0 - mu;
    return 1.0 + 2.0 * (1.0 - mu) / (a * a * a) + 2.0 * mu / (b * b * b);
  };
  RootOptions opt;
  opt.tol = 1e-16;
  Equilibrium eq;
  eq.d_mu = find_root(g, dg, 1.0, 1.0 + mu, opt);
  const double d = eq.d_mu;
  eq.polar = {d, 0.0, 0.0, d * d};
  eq.cart = cart_from_polar(eq.polar);
  eq.jacobian = cart_jacobian(eq.cart, mu);

  Eigen::EigenSolver<Eigen::Matrix4d> solver(eq.jacobian, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "eigenvalues");
  std::array<cplx, 4> ev;
  for (int i = 0; i < 4; ++i) ev[i] = solver.eigenvalues()(i);
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    const bool ra = std::abs(a.real()) > std::abs(a.imag());
    const bool rb = std::abs(b.real()) > std::abs(b.imag());
    if (ra != rb) return ra;
    return ra ? a.real() > b.real() : a.imag() > b.imag();
  });
  eq.eigenvalues = ev;
  return eq;
}

ScaledL3 L3_scaled(double delta) {
  const MassRatio m = MassRatio::from_delta(delta);
  const Equilibrium eq = locate_L3(m.mu);
  const double d = eq.d_mu;
  const double d3 = d * d * d;
  const double L = std::sqrt(d / (2.0 - d3));
  // L - G with G = d^2 computed as (L^2 - d^4)/(L + d^2) = d (d^3 - 1)^2 / ((2 - d^3)(L + d^2))
  const double dm1 = d3 - 1.0;
  const double lmg = d * dm1 * dm1 / ((2.0 - d3) * (L + d * d));
  const double eta = std::sqrt(lmg);
  const double d4 = m.mu;
  ScaledL3 out;
  out.Lambda_hat = (L - 1.0) / d4;
  out.x_hat = eta / d4;
  out.y_hat = eta / d4;
  return out;
}

}  // namespace l3lab
