#include <cmath>
#include <numbers>

#include "doctest.h"
#include "l3lab/error.hpp"
#include "l3lab/numerics/ode.hpp"
#include "l3lab/splitting.hpp"

using namespace l3lab;

namespace {

constexpr double kA = 0.177743885863504;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an l3lab::Error");
  return ErrorCode::InvalidArgument;
}

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(a * std::pow(b / a, k / double(n - 1)));
  return out;
}

}  // namespace

TEST_CASE("asymptotic distance formula") {
  CHECK(std::abs(asymptotic_distance(1e-3, kA, 1.63) - 9.36e-4) < 0.01 * 9.36e-4);
  const double mu = 2.5e-3;
  CHECK(asymptotic_distance(mu, kA, 1.63) ==
        doctest::Approx(std::pow(4.0, 1.0 / 3.0) * std::pow(mu, 1.0 / 3.0) * std::exp(-kA / 0.05) * 1.63)
            .epsilon(1e-14));
  CHECK(asymptotic_distance(1e-3, kA, 0.0) == 0.0);
  double prev = 0.0;
  for (double m = 1e-4; m <= 0.05; m *= 1.1) {
    const double d = asymptotic_distance(m, kA, 1.63);
    CHECK(d > prev);
    prev = d;
  }
  CHECK(code_of([] { (void)asymptotic_distance(0.06, kA, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { (void)asymptotic_distance(0.0, kA, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("hyperbolic directions") {
  const Equilibrium eq = locate_L3(3e-3);
  const Eigen::Vector4d vu = hyperbolic_direction(eq, ManifoldBranch::UnstablePlus);
  const Eigen::Vector4d vs = hyperbolic_direction(eq, ManifoldBranch::StablePlus);
  const double nu = eq.eigenvalues[0].real();
  CHECK((eq.jacobian * vu - nu * vu).norm() < 1e-12);
  CHECK((eq.jacobian * vs + nu * vs).norm() < 1e-12);
  CHECK(vu(1) > 0.0);
  CHECK(vs(1) > 0.0);
  // The reversing involution swaps the two directions up to orientation.
  const Eigen::Vector4d rv(vu(0), -vu(1), -vu(2), vu(3));
  CHECK(std::min((rv - vs).norm(), (rv + vs).norm()) < 1e-12);
}

TEST_CASE("section crossings") {
  const double mu = 3e-3;
  for (ManifoldBranch b : {ManifoldBranch::UnstablePlus, ManifoldBranch::StablePlus}) {
    const SectionPoint p = manifold_section_point(mu, b);
    CHECK(p.r > 1.0);
    CHECK(p.r < 1.3);
    CHECK(std::abs(p.theta - std::numbers::pi / 2) <= 1e-10);
    CHECK((b == ManifoldBranch::UnstablePlus ? p.t_hit > 0.0 : p.t_hit < 0.0));

    // Energy of the seed is carried to the section.
    const Equilibrium eq = locate_L3(mu);
    const Eigen::Vector4d v = hyperbolic_direction(eq, b);
    const CartesianState seed{eq.cart.q1 + 1e-7 * v(0), eq.cart.q2 + 1e-7 * v(1),
                              eq.cart.p1 + 1e-7 * v(2), eq.cart.p2 + 1e-7 * v(3)};
    CHECK(std::abs(h_cart(p.cart, mu) - h_cart(seed, mu)) <= 1e-11);

    SectionOptions half;
    half.seed_eps = 5e-8;
    const SectionPoint q = manifold_section_point(mu, b, half);
    CHECK(std::abs(q.r - p.r) <= 1e-6);
    CHECK(std::abs(q.R - p.R) <= 1e-6);
    CHECK(std::abs(q.G - p.G) <= 1e-6);
  }
  SectionOptions shortrun;
  shortrun.t_max = 50.0;
  CHECK(code_of([&] { (void)manifold_section_point(mu, ManifoldBranch::UnstablePlus, shortrun); }) ==
        ErrorCode::NoCrossing);
  CHECK(code_of([] { (void)manifold_section_point(2e-2, ManifoldBranch::UnstablePlus); }) ==
        ErrorCode::InvalidArgument);
  SectionOptions bad;
  bad.seed_eps = 0.0;
  CHECK(code_of([&] { (void)manifold_section_point(mu, ManifoldBranch::StablePlus, bad); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("reversibility of the unstable branch") {
  // Phi(y(t)) solves the flow backwards from Phi(y(0)).
  const double mu = 3e-3;
  const auto orbit = manifold_orbit(mu, ManifoldBranch::UnstablePlus, 150.0, 10.0);
  REQUIRE(orbit.size() == 16);
  const auto rhs = [mu](double, std::span<const double> y, std::span<double> dy) {
    const auto f = cart_rhs({y[0], y[1], y[2], y[3]}, mu);
    std::copy(f.begin(), f.end(), dy.begin());
  };
  OdeOptions o;
  o.rtol = 1e-13;
  o.atol = 1e-16;
  const CartesianState m0 = reflect(orbit[0].second);
  std::vector<double> y{m0.q1, m0.q2, m0.p1, m0.p2};
  for (std::size_t k = 1; k < orbit.size(); ++k) {
    y = integrate_real<double>(rhs, -orbit[k - 1].first, -orbit[k].first, y, o).y_end;
    const CartesianState m = reflect(orbit[k].second);
    const PolarState a = polar_from_cart(m);
    const PolarState b = polar_from_cart({y[0], y[1], y[2], y[3]});
    CHECK(std::abs(a.r - b.r) <= 1e-8);
    CHECK(std::abs(std::abs(a.R) - std::abs(b.R)) <= 1e-8);
    CHECK(std::abs(a.theta - b.theta) <= 1e-8);
  }
}

TEST_CASE("splitting distance") {
  const auto grid = log_grid(1e-3, 1e-2, 5);
  for (double mu : grid) {
    const SplittingSample s = splitting_sample(mu, kA, 1.63);
    CHECK(s.dist_measured > 0.0);
    CHECK(s.dist_asymptotic > 0.0);
    CHECK(s.dist_measured == doctest::Approx(std::hypot(s.gap_r, s.gap_R, s.gap_G)).epsilon(1e-14));
  }

  SectionOptions o;
  o.t_max = 2000.0;
  const auto small = log_grid(1e-4, 1e-3, 6);
  const SplittingFit fit = fit_splitting_exponent(small, kA, 1.63, o, 0);
  CHECK(std::abs(fit.slope / -kA - 1.0) <= 0.05);
  CHECK(fit.theta_eff > 0.0);
  const SplittingFit trimmed =
      fit_splitting_exponent({small.begin(), small.end() - 1}, kA, 1.63, o, 0);
  CHECK(std::abs(trimmed.slope / fit.slope - 1.0) <= 0.03);

  CHECK(code_of([] { (void)fit_splitting_exponent({1e-3, 2e-3, 3e-3}, kA, 1.63); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { (void)fit_splitting_exponent({5e-5, 1e-3, 2e-3, 3e-3}, kA, 1.63); }) ==
        ErrorCode::InvalidArgument);
}
