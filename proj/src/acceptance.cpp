#include "l3lab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include "l3lab/inner.hpp"
#include "l3lab/numerics/fit.hpp"
#include "l3lab/rpc3bp.hpp"
#include "l3lab/separatrix.hpp"
#include "l3lab/splitting.hpp"

namespace l3lab {

namespace {

using std::numbers::pi;
const cplx I(0.0, 1.0);

constexpr double kA = 0.177744;
constexpr const char* kNames[] = {"A-constant",
                                  "A two forms",
                                  "pole residue",
                                  "visible singularities",
                                  "branch structure",
                                  "L3 expansion",
                                  "D-expansion",
                                  "gradient gate",
                                  "series residual",
                                  "Stokes table",
                                  "difference structure",
                                  "inner-limit order",
                                  "splitting cross-validation"};
constexpr double kTheta[] = {1.6373, 1.6361, 1.6351, 1.6341, 1.6333, 1.6326, 1.6320, 1.6315};

CriterionResult start(int id) {
  CriterionResult r;
  r.id = id;
  r.name = kNames[id - 1];
  return r;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(a * std::pow(b / a, k / double(n - 1)));
  return out;
}

CriterionResult a_constant() {
  CriterionResult r = start(1);
  const auto t0 = std::chrono::steady_clock::now();
  const QuadResult q = compute_A();
  const double secs = elapsed(t0);
  const double A = q.value.real();
  r.values = {{"A", A}, {"dev", A - kA}, {"err", q.err}};
  r.pass = std::abs(A - kA) <= 1e-5 && A >= 3.0 / 50 && A <= 3.0 / 10 && secs < 1.0;
  r.values.emplace_back("under_1s", secs < 1.0 ? 1.0 : 0.0);
  return r;
}

CriterionResult a_two_forms() {
  CriterionResult r = start(2);
  const double a = compute_A().value.real();
  const double b = compute_A_rescaled().value.real();
  r.values = {{"diff", std::abs(a - b)}};
  r.pass = std::abs(a - b) <= 1e-9;
  return r;
}

CriterionResult pole_residue() {
  CriterionResult r = start(3);
  const double exact = std::sqrt(2.0 / 21.0);
  double worst = 0.0;
  cplx n;
  for (double radius : {1e-3, 1e-2, 0.1}) {
    n = residue_pole_numeric(radius);
    worst = std::max(worst, std::abs(n - exact));
  }
  const double im_t = std::abs(t_star(SingularityPath::ToInfinityUpper).value.imag());
  r.values = {{"residue", n.real()},
              {"dev", worst},
              {"pi_residue", pi * n.real()},
              {"abs_im_t_star", im_t}};
  r.pass = worst <= 1e-8 && std::abs(pi * n.real() - 0.969516) <= 1e-6 &&
           std::abs(pi * n.real() - im_t) <= 1e-6;
  return r;
}

CriterionResult visible_singularities() {
  CriterionResult r = start(4);
  const double A = compute_A().value.real();
  const cplx z = t_star(SingularityPath::ToZeroUpper).value;
  const cplx w = t_star(SingularityPath::ToInfinityUpper).value;
  r.values = {{"zero_re", z.real()}, {"zero_im", z.imag()}, {"inf_re", w.real()}, {"inf_im", w.imag()}};
  r.pass = std::abs(z.real()) <= 1e-6 && std::abs(z.imag() + A) <= 1e-6 &&
           std::abs(w.real() + 0.086697) <= 1e-4 && std::abs(w.imag() + 0.969516) <= 1e-4;
  return r;
}

CriterionResult branch_structure() {
  CriterionResult r = start(5);
  const SingularityReport s = fit_branch(default_branch_offsets());
  const double c = std::abs(s.fitted_coefficient);
  const double c_ref = 3.0 * std::pow(2.0, -1.0 / 3.0);
  r.values = {{"exponent", s.fitted_exponent}, {"abs_coefficient", c}, {"Lambda_exponent", s.lambda_exponent}};
  r.pass = std::abs(s.fitted_exponent - 2.0 / 3.0) <= 0.02 && std::abs(c / c_ref - 1.0) <= 0.02 &&
           std::abs(s.lambda_exponent + 1.0 / 3.0) <= 0.02;
  return r;
}

CriterionResult l3_expansion() {
  CriterionResult r = start(6);
  const double d = (locate_L3(1e-6).d_mu - 1.0) / 1e-6;
  const double mu = 1e-4;
  const Equilibrium e = locate_L3(mu);
  const double hyp = std::abs(e.eigenvalues[0].real()) / std::sqrt(mu);
  const double ell = std::abs(e.eigenvalues[2].imag());
  r.values = {{"d_ratio", d}, {"hyperbolic_over_sqrt_mu", hyp}, {"elliptic", ell}};
  r.pass = std::abs(d - 5.0 / 12.0) <= 1e-3 && std::abs(hyp - std::sqrt(21.0 / 8.0)) <= 2e-3 &&
           std::abs(ell - (1.0 + 7.0 * mu / 8.0)) <= 2e-3;
  return r;
}

CriterionResult d_expansion() {
  CriterionResult r = start(7);
  double worst = 1e300;
  for (double zeta : {-1.0, 0.0, 0.003, 0.7}) {
    auto rem = [zeta](double eps) {
      const ComplexPoincareState s{1.0, 1.0, eps, eps};
      const DSeries ds = D_series(zeta, s);
      return std::abs(D_exact(zeta, s) - (ds.d0 + ds.d1 + ds.d2));
    };
    worst = std::min(worst, rem(1e-2) / rem(5e-3));
  }
  r.values = {{"min_ratio", worst}};
  r.pass = worst >= 7.0;
  return r;
}

CriterionResult gradient_gate() {
  CriterionResult r = start(8);
  const GradientCheck g = check_grad_K(50);
  r.values = {{"worst_rel", g.worst_rel}, {"points", double(g.points)}};
  r.pass = g.points == 50 && g.worst_rel <= 1e-6;
  return r;
}

CriterionResult series_residual() {
  CriterionResult r = start(9);
  std::vector<double> lr, le;
  for (double m = 100.0; m <= 1000.0 * (1 + 1e-12); m *= std::pow(10.0, 0.1)) {
    const cplx U = std::polar(m, -2.5);
    const InnerState d = series_dZ(U) - graph_rhs(U, series_Z(U));
    lr.push_back(std::log(m));
    le.push_back(std::log(std::sqrt(std::norm(d.W) + std::norm(d.X) + std::norm(d.Y))));
  }
  const double order = -fit_line(lr, le).slope;
  r.values = {{"order", order}};
  r.pass = std::abs(order - 16.0 / 3.0) <= 0.25;
  return r;
}

CriterionResult stokes_table(unsigned threads) {
  CriterionResult r = start(10);
  std::vector<double> rhos;
  for (int k = 13; k <= 20; ++k) rhos.push_back(k);
  const auto t0 = std::chrono::steady_clock::now();
  const auto table = theta_table(rhos, {}, threads);
  const double secs = elapsed(t0);
  double worst = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    r.values.emplace_back("theta_" + std::to_string(int(rhos[i])), table[i].theta);
    worst = std::max(worst, std::abs(table[i].theta - kTheta[i]));
  }
  r.values.emplace_back("worst_dev", worst);
  r.values.emplace_back("under_5min", secs < 300.0 ? 1.0 : 0.0);
  r.pass = worst <= 5e-3 && secs < 300.0;
  return r;
}

CriterionResult difference_structure() {
  CriterionResult r = start(11);
  std::vector<double> xs;
  for (int k = -5; k <= 5; ++k) xs.push_back(k);
  const DiffReport d = diff_structure(15.0, xs);
  r.values = {{"relative_spread", d.relative_spread},
              {"x_over_y", d.x_over_y},
              {"arg_spread", d.arg_spread}};
  r.pass = d.relative_spread <= 0.2 && d.x_over_y <= 0.1 && d.arg_spread <= 0.3;
  return r;
}

CriterionResult inner_limit() {
  CriterionResult r = start(12);
  const InnerLimitFit f = verify_inner_limit({0.05, 0.08, 0.12, 0.2}, inner_samples(20));
  r.values = {{"exponent", f.exponent}};
  for (std::size_t i = 0; i < f.deltas.size(); ++i) {
    r.values.emplace_back("residual_" + std::to_string(i), f.residuals[i]);
  }
  r.diagnostics = {{"exponent_collision_sign_reversed", f.exponent_reversed}};
  r.pass = f.exponent >= 1.2;
  return r;
}

CriterionResult splitting(unsigned threads) {
  CriterionResult r = start(13);
  const double A = compute_A().value.real();
  const double theta20 = theta(20.0).theta;
  const SplittingFit f = fit_splitting_exponent(log_grid(1e-3, 1e-2, 6), A, theta20, {}, threads);
  double min_dist = 1e300;
  for (const SplittingSample& s : f.samples) min_dist = std::min(min_dist, s.dist_measured);
  r.values = {{"slope", f.slope}, {"slope_over_minus_A", -f.slope / A}, {"min_dist", min_dist}};
  SectionOptions far;
  far.t_max = 2000.0;
  const SplittingFit small = fit_splitting_exponent(log_grid(1e-4, 1e-3, 6), A, theta20, far, threads);
  r.diagnostics = {{"slope_mu_1e-4_to_1e-3", small.slope}, {"over_minus_A", -small.slope / A}};
  r.pass = std::abs(-f.slope / A - 1.0) <= 0.1 && min_dist > 0.0;
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  const std::vector<std::function<CriterionResult()>> all = {
      a_constant,
      a_two_forms,
      pole_residue,
      visible_singularities,
      branch_structure,
      l3_expansion,
      d_expansion,
      gradient_gate,
      series_residual,
      [&] { return stokes_table(opt.threads); },
      difference_structure,
      inner_limit,
      [&] { return splitting(opt.threads); },
  };
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = int(i) + 1;
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = all[i]();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = kNames[i];
      r.pass = false;
      r.error = e.what();
    }
    r.seconds = elapsed(t0);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char buf[64];
  std::string line = r.pass ? "PASS " : "FAIL ";
  std::snprintf(buf, sizeof buf, "%2d ", r.id);
  line += buf + r.name + ":";
  auto append = [&](const auto& kv) {
    std::snprintf(buf, sizeof buf, "%.10g", kv.second);
    line += " " + kv.first + "=" + buf;
  };
  for (const auto& kv : r.values) append(kv);
  if (!r.error.empty()) line += " error: " + r.error;
  if (!r.diagnostics.empty()) {
    line += " | diag:";
    for (const auto& kv : r.diagnostics) append(kv);
  }
  return line;
}

}  // namespace l3lab
