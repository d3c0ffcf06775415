#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "l3lab/error.hpp"
#include "l3lab/numerics/complex_path.hpp"
#include "l3lab/numerics/ode.hpp"
#include "l3lab/numerics/quadrature.hpp"
#include "l3lab/numerics/roots.hpp"

using namespace l3lab;
using std::numbers::pi;

namespace {

const cplx I(0.0, 1.0);

ComplexField scalar_field(std::function<cplx(cplx, cplx)> f) {
  return [f](cplx z, std::span<const cplx> y, std::span<cplx> dy) { dy[0] = f(z, y[0]); };
}

}  // namespace

TEST_CASE("complex path rejects broken joins and empty paths") {
  CHECK_THROWS_AS(ComplexPath(std::vector<PathSegment>{}), Error);
  CHECK_THROWS_AS(ComplexPath({LineSegment{0.0, 1.0}, LineSegment{1.1, 2.0}}), Error);
  CHECK_THROWS_AS(ComplexPath::line(1.0, 1.0), Error);
  auto p = ComplexPath::line(0.0, 1.0);
  p.arc_about(0.0, pi).line_to(-2.0);
  CHECK(std::abs(p.end() - cplx(-2.0)) < 1e-15);
  CHECK(p.length() == doctest::Approx(1.0 + pi + 1.0));
  auto r = p.reversed();
  CHECK(std::abs(r.start() - p.end()) < 1e-15);
  CHECK(std::abs(r.end() - p.start()) < 1e-15);
}

TEST_CASE("segment offsets match point differences") {
  const ArcSegment arc{cplx(1.0, 2.0), 0.5, 0.3, 2.9};
  for (double ds : {0.5, 1e-3, 1e-9}) {
    const cplx direct = segment_point(arc, ds) - segment_point(arc, 0.0);
    CHECK(std::abs(segment_offset(arc, 0.0, ds) - direct) < 1e-15);
  }
  const cplx tiny = segment_offset(arc, 1.0, -1e-200);
  CHECK(std::abs(tiny) == doctest::Approx(0.5 * 2.6 * 1e-200).epsilon(1e-10));
}

TEST_CASE("integrate_ode reproduces exact solutions") {
  const auto r1 = integrate_ode(scalar_field([](cplx, cplx y) { return y; }),
                                ComplexPath::line(0.0, 1.0), {1.0}, 1e-13, 1e-13);
  CHECK(std::abs(r1.y_end[0] - std::exp(1.0)) < 1e-12);
  CHECK(r1.max_err_est <= 10.0);

  const auto r2 = integrate_ode(scalar_field([](cplx, cplx y) { return I * y; }),
                                ComplexPath::line(0.0, pi), {1.0}, 1e-13, 1e-13);
  CHECK(std::abs(r2.y_end[0] + 1.0) < 1e-12);

  // Lower semicircle from -1 to 1 continues log(t) from 0 to i*pi.
  const auto r3 = integrate_ode(scalar_field([](cplx t, cplx) { return 1.0 / t; }),
                                ComplexPath::arc(0.0, 1.0, pi, 2.0 * pi), {0.0}, 1e-13, 1e-13);
  CHECK(std::abs(r3.y_end[0] - I * pi) < 1e-10);
  const auto r4 = integrate_ode(scalar_field([](cplx t, cplx) { return 1.0 / t; }),
                                ComplexPath::arc(0.0, 1.0, pi, 0.0), {0.0}, 1e-13, 1e-13);
  CHECK(std::abs(r4.y_end[0] + I * pi) < 1e-10);
}

TEST_CASE("integrate_ode reports a singularity on the path") {
  auto field = scalar_field([](cplx t, cplx) { return 1.0 / (t * t); });
  try {
    (void)integrate_ode(field, ComplexPath::line(-1.0, 1.0), {0.0}, 1e-10, 1e-10);
    FAIL("expected an error");
  } catch (const Error& e) {
    const bool expected = e.code() == ErrorCode::StepUnderflow || e.code() == ErrorCode::NonFinite;
    CHECK(expected);
  }
  CHECK_THROWS_AS(integrate_ode(field, ComplexPath::line(1.0, 2.0), {0.0}, 1e-20, 1e-10), Error);
}

TEST_CASE("property: subdividing a path does not change the ODE endpoint") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto field = [](cplx z, std::span<const cplx> y, std::span<cplx> dy) {
    dy[0] = y[1];
    dy[1] = -y[0] + 0.3 * std::sin(z) * y[1];
  };
  const double rtol = 1e-11, atol = 1e-11;
  for (int trial = 0; trial < 20; ++trial) {
    const cplx a(U(rng), U(rng)), b(2.0 + U(rng), U(rng));
    const auto whole = integrate_ode(field, ComplexPath::line(a, b), {1.0, 0.5}, rtol, atol);
    std::vector<cplx> verts{a};
    const int cuts = 1 + trial % 4;
    for (int c = 1; c <= cuts; ++c) {
      const double s = (c + 0.4 * U(rng)) / (cuts + 1);
      verts.push_back(a + s * (b - a));
    }
    verts.push_back(b);
    const auto split = integrate_ode(field, ComplexPath::polyline(verts), {1.0, 0.5}, rtol, atol);
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(whole.y_end[i] - split.y_end[i]) <=
            10.0 * (rtol * std::abs(whole.y_end[i]) + atol));
    }
  }
}

TEST_CASE("real DOP853 driver integrates a harmonic oscillator backwards") {
  auto rhs = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  OdeOptions opt;
  opt.rtol = 1e-13;
  opt.atol = 1e-13;
  const auto r = integrate_real<double>(rhs, 0.0, -10.0, {1.0, 0.0}, opt);
  CHECK(std::abs(r.y_end[0] - std::cos(10.0)) < 1e-11);
  CHECK(std::abs(r.y_end[1] - std::sin(10.0)) < 1e-11);
}

TEST_CASE("quad_path examples") {
  const auto r1 = quad_path([](cplx t) { return 1.0 / (1.0 + t * t); },
                            ComplexPath::line(0.0, 1.0), 1e-13);
  CHECK(std::abs(r1.value - pi / 4) < 1e-12);
  CHECK(r1.err >= 0.0);
  CHECK(r1.evals > 0);

  const auto r2 =
      quad_path([](cplx t) { return 1.0 / std::sqrt(t); }, ComplexPath::line(0.0, 1.0), 1e-12);
  CHECK(std::abs(r2.value - 2.0) < 1e-10);

  const auto r3 =
      quad_path([](cplx t) { return 1.0 / t; }, ComplexPath::arc(0.0, 1.0, -pi, pi), 1e-12);
  CHECK(std::abs(r3.value - 2.0 * pi * I) < 1e-10);
}

TEST_CASE("quad_path anchors nodes on singular endpoints") {
  // (1-s)^{-1/2} needs the offset form near s=1; the naive 1-z loses it.
  QuadOptions opt;
  opt.tol = 1e-12;
  const auto r = quad_path(
      [](const PathPoint& p) {
        const cplx dist = p.anchor == cplx(1.0) ? -p.offset : 1.0 - p.z;
        return 1.0 / std::sqrt(dist);
      },
      ComplexPath::line(0.0, 1.0), opt);
  CHECK(std::abs(r.value - 2.0) < 1e-10);
}

TEST_CASE("property: reversing a path negates the integral") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  const double tol = 1e-11;
  auto f = [](cplx t) { return std::exp(t) / (t * t + 9.0); };
  for (int trial = 0; trial < 20; ++trial) {
    auto p = ComplexPath::line(cplx(U(rng), U(rng)), cplx(U(rng), U(rng)));
    p.arc_about(cplx(U(rng) * 0.1, U(rng) * 0.1), U(rng));
    const auto fwd = quad_path(f, p, tol);
    const auto bwd = quad_path(f, p.reversed(), tol);
    CHECK(std::abs(fwd.value + bwd.value) <= 10.0 * tol);
  }
}

TEST_CASE("property: closed contours around analytic regions integrate to zero") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double tol = 1e-11;
  for (int trial = 0; trial < 20; ++trial) {
    // Poles at +-3i stay outside circles of radius <= 1 centered within 1 of 0.
    const cplx c(U(rng), U(rng));
    const double rad = 0.2 + 0.8 * std::abs(U(rng));
    const auto v = quad_path([](cplx t) { return std::cos(t) / (t * t + 9.0); },
                             ComplexPath::arc(c, rad, 0.0, 2.0 * pi), tol);
    CHECK(std::abs(v.value) <= 10.0 * tol);
  }
}

TEST_CASE("find_root examples") {
  CHECK(std::abs(find_root([](double x) { return x * x - 2.0; }, 1.0, 2.0, 1e-14) -
                 std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(find_root([](double x) { return x - std::sin(x) - pi; }, pi - 1.0, pi + 1.0,
                           1e-14) -
                 pi) < 1e-12);
  CHECK(std::abs(find_root([](double x) { return std::cos(x); }, 1.0, 2.0, 1e-14) - pi / 2) <
        1e-12);
  try {
    (void)find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12);
    FAIL("expected NoBracket");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoBracket);
  }
}

TEST_CASE("find_root with analytic derivative") {
  auto g = [](double x) { return std::exp(x) - 3.0; };
  auto dg = [](double x) { return std::exp(x); };
  RootOptions opt;
  opt.tol = 1e-15;
  CHECK(std::abs(find_root(g, dg, 0.0, 2.0, opt) - std::log(3.0)) < 1e-14);
}
