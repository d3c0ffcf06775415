#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "l3lab/error.hpp"
#include "l3lab/separatrix.hpp"

using namespace l3lab;
using std::numbers::pi;

namespace {

const cplx I(0.0, 1.0);

// Strip half-width with x = a+ sin^2(theta), which removes both endpoint
// singularities, then composite Simpson.
double A_oracle() {
  const double ap = (std::sqrt(2.0) - 1.0) / 2.0;
  const double am = -(std::sqrt(2.0) + 1.0) / 2.0;
  auto g = [&](double th) {
    const double s = std::sin(th);
    const double x = ap * s * s;
    return 2.0 * ap * s * s / ((1.0 - x) * std::sqrt(3.0 * (x + 1.0) * (x - am)));
  };
  const int n = 20000;
  const double h = 0.5 * pi / n;
  double sum = g(0.0) + g(0.5 * pi);
  for (int k = 1; k < n; ++k) sum += (k % 2 ? 4.0 : 2.0) * g(k * h);
  return sum * h / 3.0;
}

double bisect(double (*f)(double), double lo, double hi) {
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if ((f(lo) < 0) == (f(mid) < 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("pendulum potential and field") {
  CHECK(std::abs(pend_V(0.0) + 0.5) < 1e-15);
  CHECK(std::abs(pend_V(2.0 * pi / 3.0) - 0.5) < 1e-14);
  CHECK(std::abs(pend_energy({2.0 * pi / 3.0, 0.0}) - 0.5) < 1e-14);
  const auto f = pend_rhs(0.0, 0.0);
  CHECK(std::abs(f[0]) == 0.0);
  CHECK(std::abs(f[1]) < 1e-15);
  CHECK_THROWS_AS((void)pend_rhs(pi, 0.0), Error);
}

TEST_CASE("turning point of the separatrix") {
  const double l0 = lambda0();
  const double oracle = bisect([](double l) { return pend_V(l).real() + 0.5; }, 2.0 * pi / 3.0,
                               pi - 1e-9);
  CHECK(std::abs(l0 - oracle) < 1e-12);
  CHECK(std::abs(l0 - 2.724359272971496) < 1e-12);
  CHECK(l0 > 2.0 * pi / 3.0);
  CHECK(l0 < pi);
  CHECK(std::abs(std::cos(0.5 * l0) - a_plus()) < 1e-14);
  CHECK(std::abs(pend_energy({l0, 0.0}) + 0.5) < 1e-14);
}

TEST_CASE("strip half-width") {
  const double A = compute_A().value.real();
  CHECK(std::abs(A - A_oracle()) < 1e-10);
  CHECK(std::abs(A - 0.177744) < 1e-5);
  CHECK(A >= 3.0 / 50.0);
  CHECK(A <= 3.0 / 10.0);
  CHECK(std::abs(compute_A_rescaled().value.real() - A) < 1e-9);
}

TEST_CASE("pole residue") {
  const double r = residue_pole();
  CHECK(std::abs(r - std::sqrt(2.0 / 21.0)) < 1e-15);
  for (double radius : {1e-3, 1e-2, 0.1}) {
    const cplx n = residue_pole_numeric(radius);
    CHECK(std::abs(n.real() - r) < 1e-8);
    CHECK(std::abs(n.imag()) < 1e-8);
  }
  CHECK(std::abs(pi * r - 0.969516) < 1e-6);
  CHECK_THROWS_AS((void)residue_pole_numeric(0.5), Error);
}

TEST_CASE("sheet change flips the sign of f_hat") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    BranchedPoint p;
    p.q = cplx(U(rng), U(rng));
    for (int f = 0; f < 4; ++f) p.args[f] = std::arg(p.q - std::array<double, 4>{0.0, -1.0, a_plus(), a_minus()}[f]);
    const cplx v = f_hat(p);
    for (int f = 0; f < 4; ++f) {
      BranchedPoint w = p;
      w.args[f] += 2.0 * pi;
      CHECK(std::abs(f_hat(w) + v) <= 1e-14 * std::abs(v));
    }
    // Squared value is sheet independent.
    const cplx q = p.q;
    const cplx sq = q / (3.0 * (q + 1.0) * (q - a_plus()) * (q - a_minus())) / ((q - 1.0) * (q - 1.0));
    CHECK(std::abs(v * v - sq) <= 1e-12 * std::abs(sq));
  }
}

TEST_CASE("visible singularities") {
  const double A = A_oracle();
  const TStar up = t_star(SingularityPath::ToZeroUpper);
  CHECK(std::abs(up.value.real()) < 1e-6);
  CHECK(std::abs(up.value.imag() + A) < 1e-6);
  CHECK(up.tail == cplx(0.0));
  const TStar lo = t_star(SingularityPath::ToZeroLower);
  CHECK(std::abs(std::conj(up.value) - lo.value) < 1e-10);

  const TStar inf_up = t_star(SingularityPath::ToInfinityUpper);
  CHECK(std::abs(inf_up.value.real() + 0.086697) < 1e-4);
  CHECK(std::abs(inf_up.value.imag() + 0.969516) < 1e-4);
  CHECK(std::abs(std::abs(inf_up.value.imag()) - pi * residue_pole()) < 1e-6);
  const TStar inf_lo = t_star(SingularityPath::ToInfinityLower);
  CHECK(std::abs(std::conj(inf_up.value) - inf_lo.value) < 1e-10);
}

TEST_CASE("homotopy invariance of the path to 0") {
  const double tol = 1e-12;
  const double ap = a_plus();
  const cplx ref = t_star(SingularityPath::ToZeroUpper).value;
  SingularityPathOptions wide;
  wide.detour = 0.05;
  CHECK(std::abs(t_star(SingularityPath::ToZeroUpper, wide).value - ref) < 10.0 * tol);
  const auto box =
      ComplexPath::polyline({ap, ap + 0.1, ap + 0.1 + 0.3 * I, -0.2 + 0.3 * I, -0.2 + 0.05 * I, 0.0});
  CHECK(std::abs(integrate_f_hat(box, tol).value - ref) < 10.0 * tol);
  // Passing below 0 lands on the conjugate.
  const auto below = ComplexPath::polyline({ap, ap + 0.1, ap + 0.1 - 0.3 * I, -0.2 - 0.3 * I, 0.0});
  CHECK(std::abs(integrate_f_hat(below, tol).value - std::conj(ref)) < 10.0 * tol);
}

TEST_CASE("separatrix on the real line") {
  PendulumState st{lambda0(), 0.0};
  CHECK(std::abs(st.Lambda) < 1e-10);
  double t = 0.0;
  const double ap = a_plus();
  const double am = a_minus();
  for (int k = 1; k <= 100; ++k) {
    const double next = 0.1 * k;
    st = continue_separatrix(st, ComplexPath::line(t, next));
    t = next;
    const PendulumState back = sigma(ComplexPath::line(0.0, -t));
    const double q = std::cos(0.5 * st.lambda.real());
    CHECK(q >= ap - 1e-12);
    CHECK(q < 1.0);
    CHECK(std::abs(st.lambda.imag()) < 1e-12);
    CHECK(std::abs(pend_energy(st) + 0.5) < 1e-9);
    // Rounding grows like e^{1.62 t} along the unstable direction.
    if (t <= 5.0) {
      CHECK(std::abs(st.Lambda + back.Lambda) < 1e-9);
      CHECK(std::abs(std::cos(0.5 * back.lambda.real()) - q) < 1e-9);
    }
    const double L = st.Lambda.real();
    CHECK(std::abs(L * L - 4.0 / (3.0 * q) * (1.0 - q) * (q - ap) * (q - am)) < 1e-9);
    const double qdot = 1.5 * std::sin(0.5 * st.lambda.real()) * L;
    const double rhs = 3.0 / q * (q - 1.0) * (q - 1.0) * (q + 1.0) * (q - am) * (q - ap);
    CHECK(std::abs(qdot * qdot - rhs) < 1e-8);
  }
}

TEST_CASE("separatrix in complex time") {
  const double A = A_oracle();
  // 0.5i lies beyond iA; reach it passing to the right of the branch point.
  const PendulumState p = sigma(ComplexPath::polyline({0.0, 0.3, 0.3 + 0.5 * I, 0.5 * I}));
  CHECK(std::abs(p.lambda.imag()) > 1e-3);
  CHECK(std::abs(pend_energy(p) + 0.5) < 1e-9);
  const PendulumState p2 = sigma(ComplexPath::polyline({0.0, 1.0, 1.0 + 0.5 * I, 0.5 * I}));
  CHECK(std::abs(p.lambda - p2.lambda) < 1e-9);
  CHECK(std::abs(p.Lambda - p2.Lambda) < 1e-9);
  const PendulumState half = sigma_at(0.5 * I * A);
  // Even in t and real on the real line: real lambda, imaginary Lambda on iR.
  CHECK(std::abs(half.lambda.imag()) < 1e-12);
  CHECK(std::abs(half.Lambda.real()) < 1e-12);
  CHECK(std::abs(pend_energy(half) + 0.5) < 1e-9);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(-2.0, 2.0);
  std::uniform_real_distribution<double> im(-0.95, 0.95);
  for (int k = 0; k < 30; ++k) {
    const cplx t(re(rng), im(rng) * A);
    if (std::abs(t - I * A) < 1e-2 || std::abs(t + I * A) < 1e-2) continue;
    const PendulumState a = sigma_at(t);
    const PendulumState b = sigma_at(std::conj(t));
    CHECK(std::abs(pend_energy(a) + 0.5) < 1e-9);
    CHECK(std::abs(a.lambda - std::conj(b.lambda)) < 1e-9);
    CHECK(std::abs(a.Lambda - std::conj(b.Lambda)) < 1e-9);
    // Two routes to the same point agree.
    const PendulumState c = sigma(ComplexPath::polyline({0.0, I * t.imag(), t}));
    CHECK(std::abs(a.lambda - c.lambda) < 1e-9);
    CHECK(std::abs(a.Lambda - c.Lambda) < 1e-9);
  }
}

TEST_CASE("branch structure at iA") {
  const SingularityReport r = fit_branch(default_branch_offsets());
  CHECK(std::abs(r.t_star - I * A_oracle()) < 1e-10);
  CHECK(r.kind == SingularityKind::Branch23);
  CHECK(std::abs(r.fitted_exponent - 2.0 / 3.0) < 0.02);
  CHECK(std::abs(std::abs(r.fitted_coefficient) - 3.0 * std::cbrt(0.5)) < 0.02 * 2.3811);
  CHECK(std::abs(r.lambda_exponent + 1.0 / 3.0) < 0.02);
  CHECK(std::abs(r.alpha * r.alpha * r.alpha - 0.5) < 1e-14);
  CHECK(std::abs(r.alpha_fitted - r.alpha) < 0.01);
  CHECK(std::abs(r.Lambda_coefficient + 2.0 * r.alpha / 3.0) < 0.01);
  CHECK(r.residual <= 1e-2);
  for (double s : default_branch_offsets()) {
    CHECK(s >= 1e-4);
    CHECK(s <= 1e-2);
  }
}

TEST_CASE("wide branch window is rejected") {
  std::vector<double> wide;
  for (int k = 0; k <= 16; ++k) wide.push_back(std::pow(10.0, -4.0 + k / 8.0));
  try {
    (void)fit_branch(wide);
    FAIL("expected FitRejected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FitRejected);
  }
  CHECK_THROWS_AS((void)fit_branch({1e-3, 2e-3}), Error);
}

TEST_CASE("Lambda has no zero in the punctured strip") {
  const LambdaScan s = check_zero_of_Lambda();
  CHECK(s.min_abs_Lambda > 0.05);
  CHECK(s.points > 100);
  CHECK(std::abs(sigma_at(0.0).Lambda) < 1e-10);
  LambdaScanOptions coarse;
  coarse.spacing = 0.05;
  CHECK_THROWS_AS((void)check_zero_of_Lambda(coarse), Error);
}
