#include "l3lab/inner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "l3lab/error.hpp"
#include "l3lab/numerics/fit.hpp"
#include "l3lab/numerics/parallel.hpp"
#include "l3lab/rpc3bp.hpp"
#include "l3lab/separatrix.hpp"

namespace l3lab {

namespace {

using std::numbers::pi;
const cplx I(0.0, 1.0);

constexpr double kCutGap = 1e-6;

// arg U moved onto [-3pi/2, pi/2).
double sheet_arg(cplx U) {
  if (U == cplx(0.0)) throw Error(ErrorCode::OriginSingular, "inner powers at U = 0");
  double a = std::arg(U);
  if (a >= 0.5 * pi) a -= 2.0 * pi;
  if (a > 0.5 * pi - kCutGap || a < -1.5 * pi + kCutGap) {
    std::ostringstream os;
    os << "U = " << U << " lies on the cut along the positive imaginary axis";
    throw Error(ErrorCode::NearBranchCut, os.str());
  }
  return a;
}

struct Term {
  cplx coef;
  int k;  // coef * U^{-k/3}
};

const Term kSeriesW[] = {{4.0 / 243.0, 8}, {-172.0 / 2187.0, 14}};
const Term kSeriesX[] = {{-2.0 * I / 9.0, 4}, {28.0 / 81.0, 7}, {20.0 * I / 27.0, 10},
                         {-16424.0 / 6561.0, 13}};
const Term kSeriesY[] = {{2.0 * I / 9.0, 4}, {28.0 / 81.0, 7}, {-20.0 * I / 27.0, 10},
                         {-16424.0 / 6561.0, 13}};

template <std::size_t N>
cplx sum_terms(cplx U, const Term (&terms)[N]) {
  cplx s = 0.0;
  for (const Term& t : terms) s += t.coef * inner_pow(U, -t.k);
  return s;
}

template <std::size_t N>
cplx sum_terms_derivative(cplx U, const Term (&terms)[N]) {
  cplx s = 0.0;
  for (const Term& t : terms) s += -(t.k / 3.0) * t.coef * inner_pow(U, -t.k - 3);
  return s;
}

}  // namespace

InnerState operator-(const InnerState& a, const InnerState& b) {
  return {a.W - b.W, a.X - b.X, a.Y - b.Y};
}

InnerPowers inner_powers(cplx U) {
  const double a = sheet_arg(U);
  InnerPowers p;
  p.u13 = std::polar(std::cbrt(std::abs(U)), a / 3.0);
  p.u23 = p.u13 * p.u13;
  p.u43 = p.u23 * p.u23;
  return p;
}

cplx inner_pow(cplx U, int k) {
  const double a = sheet_arg(U);
  return std::polar(std::pow(std::abs(U), k / 3.0), k * a / 3.0);
}

cplx inner_J(cplx U, const InnerState& z) {
  const InnerPowers p = inner_powers(U);
  const cplx W = z.W, X = z.X, Y = z.Y;
  return 4.0 * W * W / (9.0 * p.u23) - 16.0 * W / (27.0 * p.u43) + 16.0 / (81.0 * U * U) +
         4.0 * (X + Y) / (9.0 * U) * (W - 2.0 / (3.0 * p.u23)) - 4.0 * I * (X - Y) / (3.0 * p.u23) -
         (X * X + Y * Y) / (3.0 * p.u43) + 10.0 * X * Y / (9.0 * p.u43);
}

namespace {

// (1 + J)^{-1/2}, principal root.
cplx inv_sqrt_1pJ(cplx J) {
  const cplx s = 1.0 + J;
  if (std::abs(s) <= 0.1) {
    std::ostringstream os;
    os << "|1 + J| = " << std::abs(s) << " at or below 0.1";
    throw Error(ErrorCode::SqrtDomain, os.str());
  }
  return 1.0 / std::sqrt(s);
}

}  // namespace

cplx inner_K(cplx U, const InnerState& z) {
  const InnerPowers p = inner_powers(U);
  const cplx S = inv_sqrt_1pJ(inner_J(U, z));
  return -0.75 * p.u23 * z.W * z.W - (S - 1.0) / (3.0 * p.u23);
}

InnerGradient grad_K(cplx U, const InnerState& z) {
  const InnerPowers p = inner_powers(U);
  const cplx W = z.W, X = z.X, Y = z.Y;
  const cplx J = inner_J(U, z);
  const cplx S = inv_sqrt_1pJ(J);
  const cplx S3 = S * S * S;

  const cplx J_W = 8.0 * W / (9.0 * p.u23) - 16.0 / (27.0 * p.u43) + 4.0 * (X + Y) / (9.0 * U);
  const cplx common = 4.0 / (9.0 * U) * (W - 2.0 / (3.0 * p.u23));
  const cplx J_X = common - 4.0 * I / (3.0 * p.u23) - 2.0 * X / (3.0 * p.u43) +
                   10.0 * Y / (9.0 * p.u43);
  const cplx J_Y = common + 4.0 * I / (3.0 * p.u23) - 2.0 * Y / (3.0 * p.u43) +
                   10.0 * X / (9.0 * p.u43);
  // U times dJ/dU, term by term from the homogeneity of each monomial.
  const cplx UJ_U = -(2.0 / 3.0) * 4.0 * W * W / (9.0 * p.u23) +
                    (4.0 / 3.0) * 16.0 * W / (27.0 * p.u43) - 2.0 * 16.0 / (81.0 * U * U) -
                    4.0 * (X + Y) * W / (9.0 * U) +
                    (5.0 / 3.0) * 8.0 * (X + Y) / (27.0 * U * p.u23) +
                    (2.0 / 3.0) * 4.0 * I * (X - Y) / (3.0 * p.u23) +
                    (4.0 / 3.0) * (X * X + Y * Y) / (3.0 * p.u43) -
                    (4.0 / 3.0) * 10.0 * X * Y / (9.0 * p.u43);

  const cplx tail = S3 / (6.0 * p.u23);
  InnerGradient g;
  g.dU = -0.5 * p.u23 / U * W * W + 2.0 * (S - 1.0) / (9.0 * p.u23 * U) + tail * UJ_U / U;
  g.dW = -1.5 * p.u23 * W + tail * J_W;
  g.dX = tail * J_X;
  g.dY = tail * J_Y;
  return g;
}

GradientCheck check_grad_K(std::size_t n, unsigned seed, double h) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto comp = [&] { return 0.1 * cplx(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0); };
  GradientCheck out;
  while (out.points < n) {
    const cplx U = std::polar(2.0 * std::pow(100.0, unit(rng)), -1.5 * pi + 0.1 + (2.0 * pi - 0.2) * unit(rng));
    const InnerState z{comp(), comp(), comp()};
    if (std::abs(1.0 + inner_J(U, z)) < 0.3) continue;
    ++out.points;
    const InnerGradient g = grad_K(U, z);
    auto central = [&](InnerState a, InnerState b, cplx Ua, cplx Ub) {
      return (inner_K(Ua, a) - inner_K(Ub, b)) / (2.0 * h);
    };
    auto shifted = [&](int k, double s) {
      InnerState w = z;
      if (k == 1) w.W += s;
      if (k == 2) w.X += s;
      if (k == 3) w.Y += s;
      return w;
    };
    const cplx fd[4] = {central(z, z, U + h, U - h), central(shifted(1, h), shifted(1, -h), U, U),
                        central(shifted(2, h), shifted(2, -h), U, U),
                        central(shifted(3, h), shifted(3, -h), U, U)};
    const cplx an[4] = {g.dU, g.dW, g.dX, g.dY};
    for (int k = 0; k < 4; ++k) {
      out.worst_rel = std::max(out.worst_rel, std::abs(an[k] - fd[k]) / std::abs(fd[k]));
    }
  }
  return out;
}

InnerState graph_rhs(cplx U, const InnerState& z) {
  const InnerGradient d = grad_K(U, z);
  const cplx g = d.dW;
  const cplx den = 1.0 + g;
  if (std::abs(den) < 0.5) {
    std::ostringstream os;
    os << "|1 + g| = " << std::abs(den) << " below 0.5 at U = " << U;
    throw Error(ErrorCode::TimeReparamSingular, os.str());
  }
  const cplx AX = I * z.X;
  const cplx AY = -I * z.Y;
  const cplx fW = -d.dU;
  const cplx fX = I * d.dY;
  const cplx fY = -I * d.dX;
  return {fW / den, AX + (fX - g * AX) / den, AY + (fY - g * AY) / den};
}

InnerState series_Z(cplx U) {
  if (std::abs(U) < 30.0) throw Error(ErrorCode::TooClose, "series used below |U| = 30");
  return {sum_terms(U, kSeriesW), sum_terms(U, kSeriesX), sum_terms(U, kSeriesY)};
}

InnerState series_dZ(cplx U) {
  if (std::abs(U) < 30.0) throw Error(ErrorCode::TooClose, "series used below |U| = 30");
  return {sum_terms_derivative(U, kSeriesW), sum_terms_derivative(U, kSeriesX),
          sum_terms_derivative(U, kSeriesY)};
}

const char* to_string(InnerBranch b) {
  return b == InnerBranch::Unstable ? "unstable" : "stable";
}

ShotResult shoot_to(InnerBranch branch, cplx target, const ShootOptions& opt) {
  if (!(target.imag() < 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "shooting target must satisfy Im U < 0");
  }
  if (!(opt.re_start >= 30.0)) throw Error(ErrorCode::InvalidArgument, "re_start below 30");
  const double side = branch == InnerBranch::Unstable ? -1.0 : 1.0;
  const cplx start(side * opt.re_start, target.imag());
  if (side * (target.real() - start.real()) >= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "target lies beyond the seeding point");
  }
  const InnerState z0 = series_Z(start);
  OdeOptions ode;
  ode.rtol = opt.rtol;
  ode.atol = opt.atol;
  ode.max_step = opt.max_step;
  ShotResult out;
  auto field = [](cplx U, std::span<const cplx> y, std::span<cplx> dy) {
    const InnerState d = graph_rhs(U, {y[0], y[1], y[2]});
    dy[0] = d.W;
    dy[1] = d.X;
    dy[2] = d.Y;
  };
  auto observer = [&out](std::size_t, double, cplx U, std::span<const cplx> y) {
    const double a = std::abs(U);
    const double a43 = std::pow(a, 4.0 / 3.0);
    out.max_scaled_xy = std::max({out.max_scaled_xy, a43 * std::abs(y[1]), a43 * std::abs(y[2])});
    out.max_scaled_w = std::max(out.max_scaled_w, a43 * a43 * std::abs(y[0]));
  };
  const auto r = integrate_ode(field, ComplexPath::line(start, target), {z0.W, z0.X, z0.Y}, ode,
                               observer);
  out.z = {r.y_end[0], r.y_end[1], r.y_end[2]};
  out.steps = r.steps;
  return out;
}

ShotResult shoot(InnerBranch branch, double rho, const ShootOptions& opt) {
  if (!(rho >= 8.0 && rho <= 30.0)) throw Error(ErrorCode::InvalidArgument, "rho outside [8, 30]");
  return shoot_to(branch, cplx(0.0, -rho), opt);
}

StokesRecord stokes_record(double rho, const ShootOptions& opt) {
  StokesRecord rec;
  rec.rho = rho;
  rec.Yu = shoot(InnerBranch::Unstable, rho, opt).z.Y;
  rec.Ys = shoot(InnerBranch::Stable, rho, opt).z.Y;
  rec.deltaY = rec.Yu - rec.Ys;
  rec.digits_lost = std::log10(std::abs(rec.Yu) / std::abs(rec.deltaY));
  rec.digits_kept = -std::log10(opt.rtol) - rec.digits_lost;
  rec.theta = std::abs(rec.deltaY) * std::exp(rho);
  return rec;
}

StokesRecord theta(double rho, const ShootOptions& opt) {
  StokesRecord rec = stokes_record(rho, opt);
  if (!(rec.digits_kept >= 3.0)) {
    std::ostringstream os;
    os << "only " << rec.digits_kept << " significant digits of deltaY remain at rho = " << rho;
    throw Error(ErrorCode::PrecisionLoss, os.str());
  }
  return rec;
}

std::vector<StokesRecord> theta_table(const std::vector<double>& rhos, const ShootOptions& opt,
                                      unsigned threads) {
  std::vector<StokesRecord> out(rhos.size());
  parallel_for(rhos.size(), threads, [&](std::size_t i) { out[i] = theta(rhos[i], opt); });
  return out;
}

DiffReport diff_structure(double rho, const std::vector<double>& x_samples,
                          const ShootOptions& opt) {
  if (x_samples.empty()) throw Error(ErrorCode::InvalidArgument, "no samples");
  if (!(rho >= 8.0 && rho <= 30.0)) throw Error(ErrorCode::InvalidArgument, "rho outside [8, 30]");
  DiffReport rep;
  rep.rho = rho;
  cplx mean = 0.0;
  for (double x : x_samples) {
    if (!(x >= -5.0 && x <= 5.0)) throw Error(ErrorCode::InvalidArgument, "sample outside [-5, 5]");
    const cplx U(x, -rho);
    const InnerState d =
        shoot_to(InnerBranch::Unstable, U, opt).z - shoot_to(InnerBranch::Stable, U, opt).z;
    const cplx rot = std::exp(I * U);
    DiffSample s{U, d.W, d.X, d.Y, rot * d.Y};
    rep.samples.push_back(s);
    mean += s.rotated_dY;
    rep.x_over_y = std::max(rep.x_over_y, std::abs(d.X) / std::abs(d.Y));
    rep.max_scaled_dX = std::max(rep.max_scaled_dX, std::abs(U * U * rot * d.X));
    rep.max_scaled_dW =
        std::max(rep.max_scaled_dW, std::pow(std::abs(U), 7.0 / 3.0) * std::abs(rot * d.W));
  }
  mean /= static_cast<double>(rep.samples.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const DiffSample& s : rep.samples) {
    rep.relative_spread = std::max(rep.relative_spread, std::abs(s.rotated_dY - mean) / std::abs(mean));
    const double a = std::arg(s.rotated_dY / mean);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  rep.arg_spread = hi - lo;
  return rep;
}

InnerFrame inner_frame() {
  InnerFrame f;
  f.A = compute_A().value.real();
  f.alpha = fit_branch(default_branch_offsets(), f.A).alpha;
  return f;
}

cplx inner_hamiltonian(const InnerSample& s, double delta, const InnerFrame& frame) {
  if (!(delta > 0.0 && delta < 0.45)) throw Error(ErrorCode::InvalidArgument, "delta out of range");
  const double d2 = delta * delta;
  const double d13 = std::cbrt(delta);
  const double d43 = delta * d13;
  const cplx a = frame.alpha;
  const cplx u = cplx(0.0, frame.A) + d2 * s.U;
  const cplx w = 2.0 * a * a * s.z.W / d43;
  const cplx x = d13 * std::sqrt(2.0) * a * s.z.X;
  const cplx y = d13 * std::sqrt(2.0) * a * s.z.Y;
  const PendulumState h = sigma_at(u);
  const ScaledL3 l3 = L3_scaled(delta);
  const double d3 = d2 * delta;
  const cplx H = h_scaled(h.lambda, h.Lambda - w / (3.0 * h.Lambda) + d2 * l3.Lambda_hat,
                          x + d3 * l3.x_hat, y + d3 * l3.y_hat, delta);
  return H * d43 / (2.0 * a * a);
}

double inner_limit_residual(const std::vector<InnerSample>& samples, double delta,
                            const InnerFrame& frame, bool reversed) {
  if (samples.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two samples");
  auto model = [&](const InnerSample& s) {
    if (!reversed) return inner_K(s.U, s.z);
    const InnerPowers p = inner_powers(s.U);
    const cplx S = inv_sqrt_1pJ(inner_J(s.U, s.z));
    return -0.75 * p.u23 * s.z.W * s.z.W + (S - 1.0) / (3.0 * p.u23);
  };
  auto diff = [&](const InnerSample& s) {
    return inner_hamiltonian(s, delta, frame) - (s.z.W + s.z.X * s.z.Y + model(s));
  };
  const cplx ref = diff(samples.front());
  double r = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) r = std::max(r, std::abs(diff(samples[i]) - ref));
  return r;
}

std::vector<InnerSample> inner_samples(std::size_t n, double kappa, double z_max, unsigned seed) {
  if (!(kappa > 1.0) || !(z_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample domain");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<InnerSample> out;
  const double comp = z_max / std::sqrt(3.0);
  auto disc = [&] { return std::polar(comp * std::sqrt(unit(rng)), 2.0 * pi * unit(rng)); };
  while (out.size() < n) {
    InnerSample s;
    const double r = std::exp(std::log(kappa) * (2.0 * unit(rng) - 1.0));
    const double phi = -1.5 * pi + 0.2 + (2.0 * pi - 0.4) * unit(rng);
    s.U = std::polar(r, phi);
    s.z = {disc(), disc(), disc()};
    if (std::abs(1.0 + inner_J(s.U, s.z)) < 0.3) continue;
    out.push_back(s);
  }
  return out;
}

InnerLimitFit verify_inner_limit(const std::vector<double>& deltas,
                                 const std::vector<InnerSample>& samples, const InnerFrame& frame) {
  if (deltas.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two deltas");
  InnerLimitFit fit;
  std::vector<double> lx, ly, lr;
  for (double d : deltas) {
    const double r = inner_limit_residual(samples, d, frame);
    const double rr = inner_limit_residual(samples, d, frame, true);
    fit.deltas.push_back(d);
    fit.residuals.push_back(r);
    fit.residuals_reversed.push_back(rr);
    lx.push_back(std::log(d));
    ly.push_back(std::log(r));
    lr.push_back(std::log(rr));
  }
  const LineFit lf = fit_line(lx, ly);
  fit.exponent = lf.slope;
  fit.constant = std::exp(lf.intercept);
  fit.exponent_reversed = fit_line(lx, lr).slope;
  return fit;
}

}  // namespace l3lab
