#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "l3lab/numerics/complex_path.hpp"

namespace l3lab {

/// Rotating-frame position and momenta. The primaries sit at (mu, 0) (mass
/// 1 - mu) and (mu - 1, 0) (mass mu).
struct CartesianState {
  double q1 = 0.0;
  double q2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

struct PolarState {
  double r = 1.0;
  double theta = 0.0;
  double R = 0.0;
  double G = 0.0;
};

/// Real-slice Poincaré state: mean longitude, Delaunay action, and the
/// eccentricity pair with xi == conj(eta).
struct PoincareState {
  double lambda = 0.0;
  double L = 1.0;
  cplx eta;
  cplx xi;
};

/// Poincaré state with every component complexified.
struct ComplexPoincareState {
  cplx lambda;
  cplx L{1.0, 0.0};
  cplx eta;
  cplx xi;
};

struct MassRatio {
  double mu = 0.0;
  double delta = 0.0;

  static MassRatio from_mu(double mu);
  static MassRatio from_delta(double delta);
};

// Cartesian model -----------------------------------------------------------

[[nodiscard]] double h_cart(const CartesianState& s, double mu);
[[nodiscard]] std::array<double, 4> cart_rhs(const CartesianState& s, double mu);
/// Analytic Jacobian of cart_rhs in the (q1, q2, p1, p2) ordering.
[[nodiscard]] Eigen::Matrix4d cart_jacobian(const CartesianState& s, double mu);
/// Reversing involution (q1, -q2, -p1, p2).
[[nodiscard]] CartesianState reflect(const CartesianState& s);

// Polar and Delaunay/Poincaré transforms -------------------------------------

[[nodiscard]] PolarState polar_from_cart(const CartesianState& s);
[[nodiscard]] CartesianState cart_from_polar(const PolarState& s);

/// Split polar Hamiltonian; the total energy is h0 + mu * h1.
struct PolarEnergy {
  double h0 = 0.0;
  double h1 = 0.0;
};
[[nodiscard]] PolarEnergy h_polar(const PolarState& s, double mu);

/// Eccentric anomaly solving u - e sin u = ell.
[[nodiscard]] double kepler_u(double ell, double e);
/// Eccentricity from (L, eta, xi); real on the real slice.
[[nodiscard]] cplx eccentricity(cplx L, cplx eta, cplx xi);

[[nodiscard]] PolarState polar_from_poincare(const PoincareState& s);
[[nodiscard]] PoincareState poincare_from_polar(const PolarState& s);

/// Position (X, Y) of the osculating Kepler orbit for complex Poincaré
/// arguments, obtained by Newton on the eccentric-longitude equation.
struct PlanarPosition {
  cplx X;
  cplx Y;
};
[[nodiscard]] PlanarPosition position_from_poincare(const ComplexPoincareState& s);

/// Squared distance from the body to the point (zeta, 0).
[[nodiscard]] cplx D_exact(double zeta, const ComplexPoincareState& s);
[[nodiscard]] cplx D_exact(double zeta, const PoincareState& s);

/// Homogeneous terms of orders 0, 1, 2 in (eta, xi) of D_exact.
struct DSeries {
  cplx d0;
  cplx d1;
  cplx d2;
};
[[nodiscard]] DSeries D_series(double zeta, const ComplexPoincareState& s);

/// Unperturbed part -1/(2L^2) - L + eta xi.
[[nodiscard]] cplx h0_poincare(cplx L, cplx eta, cplx xi);
/// Perturbation H1 (total energy is h0 + mu * h1). Real slice version.
[[nodiscard]] double h1_poincare(const PoincareState& s, double mu);
/// Complex continuation of H1. The square root of the distance to the small
/// primary follows the branch that equals 2 cos(lambda/2) on the circular
/// orbit, which is the continuation relevant near lambda = pi.
[[nodiscard]] cplx h1_poincare(const ComplexPoincareState& s, double mu);
[[nodiscard]] double h_poincare(const PoincareState& s, double mu);

// Scaled coordinates ----------------------------------------------------------

[[nodiscard]] double potential_V(double lambda);
[[nodiscard]] cplx potential_V(cplx lambda);
/// Cubic remainder of the Kepler part after the scaling; equals
/// z^3 (4 + 3z) / (2 (1 + z)^2).
[[nodiscard]] cplx F_pend(cplx z);

/// Scaled Hamiltonian in (lambda, Lambda, x, y) with the additive constant
/// chosen so that H = H_pend + xy/delta^2 + O(delta).
[[nodiscard]] cplx h_scaled(cplx lambda, cplx Lambda, cplx x, cplx y, double delta);
[[nodiscard]] double h_scaled(double lambda, double Lambda, cplx x, cplx y, double delta);

// Equilibrium -----------------------------------------------------------------

struct Equilibrium {
  double d_mu = 0.0;
  PolarState polar;
  CartesianState cart;
  /// Ordered as {+hyperbolic, -hyperbolic, +i elliptic, -i elliptic}.
  std::array<cplx, 4> eigenvalues;
  Eigen::Matrix4d jacobian;
};

/// Residual of the collinear balance on the ray beyond the large primary.
[[nodiscard]] double l3_balance(double d, double mu);
[[nodiscard]] Equilibrium locate_L3(double mu);

/// L3 in scaled coordinates: lambda = 0, Lambda = delta^2 * Lambda_hat,
/// x = delta^3 * x_hat, y = delta^3 * y_hat.
struct ScaledL3 {
  double Lambda_hat = 0.0;
  cplx x_hat;
  cplx y_hat;
};
[[nodiscard]] ScaledL3 L3_scaled(double delta);

}  // namespace l3lab
