#pragma once

#include <array>
#include <vector>

#include "l3lab/numerics/complex_path.hpp"
#include "l3lab/numerics/ode.hpp"
#include "l3lab/numerics/quadrature.hpp"

namespace l3lab {

/// State of the reduced one-degree-of-freedom system
/// H_pend = -(3/2) Lambda^2 + V(lambda).
struct PendulumState {
  cplx lambda;
  cplx Lambda;
};

/// Roots of 4x^2 + 4x - 1: a_plus = (sqrt2 - 1)/2, a_minus = -(sqrt2 + 1)/2.
[[nodiscard]] double a_plus();
[[nodiscard]] double a_minus();

/// V(lambda) continued with 2 cos(lambda/2) in place of sqrt(2 + 2 cos lambda).
[[nodiscard]] cplx pend_V(cplx lambda);
[[nodiscard]] cplx pend_energy(const PendulumState& s);
/// (d lambda/dt, d Lambda/dt). Throws Collision near cos(lambda/2) = 0.
[[nodiscard]] std::array<cplx, 2> pend_rhs(cplx lambda, cplx Lambda);

/// Turning point of the separatrix: 2 arccos(a_plus).
[[nodiscard]] double lambda0();

/// Half-width of the analyticity strip of the separatrix, by quadrature.
[[nodiscard]] QuadResult compute_A(double tol = 1e-12);
/// The same constant from the rescaled integrand with 1 - 4x - 4x^2.
[[nodiscard]] QuadResult compute_A_rescaled(double tol = 1e-12);

// Branch-tracked integrand -----------------------------------------------------

/// Point on the Riemann surface of f_hat(q) = sqrt(q / (3 (q+1)(q-a+)(q-a-))) / (q-1):
/// the value q plus the continuous arguments of q, q+1, q-a+, q-a-.
struct BranchedPoint {
  cplx q;
  std::array<double, 4> args{};
};

/// f_hat on the sheet selected by the accumulated arguments.
[[nodiscard]] cplx f_hat(const BranchedPoint& p);
/// Same, with the four linear factors supplied directly (for precision at endpoints).
[[nodiscard]] cplx f_hat(cplx q, const std::array<cplx, 4>& factors,
                         const std::array<double, 4>& args);

/// Continues the four arguments along a path. The arguments at the path's
/// first interior sample are principal, so paths should start on the real
/// segment (a_plus, +inf) heading right or along it.
class BranchTracker {
 public:
  static constexpr int kLadder = 16;

  explicit BranchTracker(const ComplexPath& path);

  /// Branched point at a quadrature node of the tracked path.
  [[nodiscard]] BranchedPoint at(const PathPoint& p) const;
  /// f_hat at a quadrature node, with factors taken from the node offset.
  [[nodiscard]] cplx eval(const PathPoint& p) const;
  /// Arguments at the end of the path.
  [[nodiscard]] std::array<double, 4> end_args() const;

 private:
  struct Rung {
    double s;
    cplx z;
    std::array<double, 4> args;
  };
  ComplexPath path_;
  std::vector<std::vector<Rung>> ladder_;
};

/// Integral of f_hat along a path with branch tracking.
[[nodiscard]] QuadResult integrate_f_hat(const ComplexPath& path, double tol);

// Singularities ------------------------------------------------------------------

/// Analytic residue of f_hat at q = 1 on the first sheet: sqrt(2/21).
[[nodiscard]] double residue_pole();
/// (1/(2 pi i)) times the contour integral of f_hat around q = 1.
[[nodiscard]] cplx residue_pole_numeric(double radius, double tol = 1e-13);

enum class SingularityPath { ToZeroUpper, ToZeroLower, ToInfinityUpper, ToInfinityLower };

[[nodiscard]] const char* to_string(SingularityPath kind);

struct SingularityPathOptions {
  double detour = 1e-3;
  double r_max = 1e4;
  double tol = 1e-12;
};

/// Path in the q-plane from a_plus to 0 or towards infinity.
[[nodiscard]] ComplexPath singularity_path(SingularityPath kind,
                                           const SingularityPathOptions& opt = {});

struct TStar {
  cplx value;
  double err = 0.0;
  /// Analytic contribution beyond r_max (zero for paths to 0).
  cplx tail;
  std::size_t evals = 0;
};

[[nodiscard]] TStar t_star(SingularityPath kind, const SingularityPathOptions& opt = {});

// Separatrix in complex time ------------------------------------------------------

/// Default integration settings for the separatrix.
[[nodiscard]] OdeOptions separatrix_ode_options();

/// Separatrix at the end of a time path that starts at t = 0, where it
/// equals (lambda0, 0).
[[nodiscard]] PendulumState sigma(const ComplexPath& t_path,
                                  const OdeOptions& opt = separatrix_ode_options());
/// Continues an already known point along a path.
[[nodiscard]] PendulumState continue_separatrix(const PendulumState& start, const ComplexPath& path,
                                                const OdeOptions& opt = separatrix_ode_options());

/// Separatrix at complex time t via 0 -> Re t -> t.
[[nodiscard]] PendulumState sigma_at(cplx t, const OdeOptions& opt = separatrix_ode_options());

enum class SingularityKind { Branch23, Pole };

struct SingularityReport {
  cplx t_star;
  SingularityKind kind = SingularityKind::Branch23;
  /// Exponent of |lambda - pi| against the distance to t_star.
  double fitted_exponent = 0.0;
  /// Coefficient c in lambda - pi ~ c (t - t_star)^{2/3}, extrapolated to s = 0.
  cplx fitted_coefficient;
  /// Exponent of |Lambda| against the distance (expected -1/3).
  double lambda_exponent = 0.0;
  /// Coefficient of Lambda ~ c (t - t_star)^{-1/3}.
  cplx Lambda_coefficient;
  /// fitted_coefficient / 3, and its nearest cube root of 1/2.
  cplx alpha_fitted;
  cplx alpha;
  /// Root-mean-square residual of the two log-log regressions.
  double residual = 0.0;
};

/// Default sample offsets: log-spaced in [1e-4, 1e-3].
[[nodiscard]] std::vector<double> default_branch_offsets();

/// Fits the local behavior at t = iA from samples t = i(A - s).
/// Throws FitRejected if either regression residual exceeds 1e-2.
[[nodiscard]] SingularityReport fit_branch(const std::vector<double>& offsets,
                                           double A = compute_A().value.real());

struct LambdaScan {
  double min_abs_Lambda = 0.0;
  cplx argmin;
  std::size_t points = 0;
};

struct LambdaScanOptions {
  double re_max = 1.0;
  double spacing = 0.02;
  double hole_radius = 0.05;
};

/// Minimum of |Lambda_h| over a grid in the strip |Im t| < A with
/// |Re t| <= re_max, excluding disks around 0 and +-iA.
[[nodiscard]] LambdaScan check_zero_of_Lambda(const LambdaScanOptions& opt = {},
                                              double A = compute_A().value.real());

}  // namespace l3lab
