#pragma once

#include <array>
#include <vector>

#include "l3lab/numerics/ode.hpp"

namespace l3lab {

/// (W, X, Y) coordinates of a graph over the inner time U.
struct InnerState {
  cplx W;
  cplx X;
  cplx Y;
};

[[nodiscard]] InnerState operator-(const InnerState& a, const InnerState& b);

/// Fractional powers of U on the sheet arg U in [-3pi/2, pi/2), i.e. with the
/// cut along the positive imaginary axis. u23 and u43 are formed by squaring.
struct InnerPowers {
  cplx u13;
  cplx u23;
  cplx u43;
};

/// Throws OriginSingular at U = 0 and NearBranchCut within 1e-6 of the cut.
[[nodiscard]] InnerPowers inner_powers(cplx U);
/// U^{k/3} on the same sheet.
[[nodiscard]] cplx inner_pow(cplx U, int k);

[[nodiscard]] cplx inner_J(cplx U, const InnerState& z);
/// Throws SqrtDomain if |1 + J| <= 0.1.
[[nodiscard]] cplx inner_K(cplx U, const InnerState& z);

struct InnerGradient {
  cplx dU;
  cplx dW;
  cplx dX;
  cplx dY;
};

[[nodiscard]] InnerGradient grad_K(cplx U, const InnerState& z);

struct GradientCheck {
  /// Largest relative error of the four partials against central differences.
  double worst_rel = 0.0;
  std::size_t points = 0;
};

/// Compares grad_K with central differences of step h at n random points with
/// 2 <= |U| <= 200 off the cut, |Z| components below 0.1 and |1 + J| >= 0.3.
[[nodiscard]] GradientCheck check_grad_K(std::size_t n = 50, unsigned seed = 7, double h = 1e-6);

/// dZ/dU for graphs of the inner flow. Throws TimeReparamSingular when
/// |1 + dK/dW| < 0.5.
[[nodiscard]] InnerState graph_rhs(cplx U, const InnerState& z);

/// Shared asymptotic expansion of both inner solutions, through U^{-13/3}.
/// Throws TooClose for |U| < 30.
[[nodiscard]] InnerState series_Z(cplx U);
/// Term-by-term U-derivative of series_Z.
[[nodiscard]] InnerState series_dZ(cplx U);

enum class InnerBranch { Unstable, Stable };

[[nodiscard]] const char* to_string(InnerBranch b);

struct ShootOptions {
  double re_start = 1000.0;
  double rtol = 1e-12;
  double atol = 1e-20;
  /// Largest step in units of U; 0 means unlimited.
  double max_step = 0.0;
};

struct ShotResult {
  InnerState z;
  /// max of |U^{4/3} X| and |U^{4/3} Y| over accepted steps.
  double max_scaled_xy = 0.0;
  /// max of |U^{8/3} W| over accepted steps.
  double max_scaled_w = 0.0;
  std::size_t steps = 0;
};

/// Integrates from the series value at -+re_start + i Im(target) along the
/// horizontal line to target (Unstable from the left, Stable from the right).
[[nodiscard]] ShotResult shoot_to(InnerBranch branch, cplx target, const ShootOptions& opt = {});
/// shoot_to with target -i rho, rho in [8, 30].
[[nodiscard]] ShotResult shoot(InnerBranch branch, double rho, const ShootOptions& opt = {});

struct StokesRecord {
  double rho = 0.0;
  cplx Yu;
  cplx Ys;
  cplx deltaY;
  double theta = 0.0;
  /// log10(|Y^u| / |deltaY|).
  double digits_lost = 0.0;
  /// -log10(rtol) - digits_lost.
  double digits_kept = 0.0;
};

/// Theta record without the precision check.
[[nodiscard]] StokesRecord stokes_record(double rho, const ShootOptions& opt = {});

/// Theta_rho = |Y^u(-i rho) - Y^s(-i rho)| e^rho. Throws PrecisionLoss when
/// fewer than 3 significant digits of deltaY survive at the requested rtol.
[[nodiscard]] StokesRecord theta(double rho, const ShootOptions& opt = {});
/// Independent rho values are computed on up to `threads` threads (0: hardware).
[[nodiscard]] std::vector<StokesRecord> theta_table(const std::vector<double>& rhos,
                                                    const ShootOptions& opt = {},
                                                    unsigned threads = 1);

struct DiffSample {
  cplx U;
  cplx dW;
  cplx dX;
  cplx dY;
  /// e^{iU} dY.
  cplx rotated_dY;
};

struct DiffReport {
  double rho = 0.0;
  std::vector<DiffSample> samples;
  /// max |v - mean| / |mean| over v = e^{iU} dY.
  double relative_spread = 0.0;
  /// max minus min of arg(v / mean).
  double arg_spread = 0.0;
  /// max |dX| / |dY|.
  double x_over_y = 0.0;
  /// max |U^2 e^{iU} dX| and |U^{7/3} e^{iU} dW|.
  double max_scaled_dX = 0.0;
  double max_scaled_dW = 0.0;
};

[[nodiscard]] DiffReport diff_structure(double rho, const std::vector<double>& x_samples,
                                        const ShootOptions& opt = {});

struct InnerSample {
  cplx U;
  InnerState z;
};

struct InnerLimitFit {
  std::vector<double> deltas;
  std::vector<double> residuals;
  double exponent = 0.0;
  /// r(delta) ~ constant * delta^exponent.
  double constant = 0.0;
  /// Same fit with the sign of the collision term (1/sqrt(1+J) - 1)/(3 U^{2/3})
  /// of K reversed.
  std::vector<double> residuals_reversed;
  double exponent_reversed = 0.0;
};

/// Separatrix data fixing the inner blow-up: u = iA + delta^2 U, and the
/// coefficient alpha of lambda_h - pi ~ 3 alpha (u - iA)^{2/3}.
struct InnerFrame {
  double A = 0.0;
  cplx alpha;
};

[[nodiscard]] InnerFrame inner_frame();

/// Full scaled Hamiltonian in inner coordinates around u = iA for one delta,
/// normalised so that its delta -> 0 limit is W + XY + K.
[[nodiscard]] cplx inner_hamiltonian(const InnerSample& s, double delta, const InnerFrame& frame);

/// max over samples of |H_inner - (W + XY + K)| after removing the value at
/// samples[0]. With `reversed`, the collision term of K enters with the
/// opposite sign.
[[nodiscard]] double inner_limit_residual(const std::vector<InnerSample>& samples, double delta,
                                          const InnerFrame& frame, bool reversed = false);

/// Random samples with 1/kappa <= |U| <= kappa, |Z| <= z_max, away from the cut.
[[nodiscard]] std::vector<InnerSample> inner_samples(std::size_t n, double kappa = 3.0,
                                                     double z_max = 0.3, unsigned seed = 1);

[[nodiscard]] InnerLimitFit verify_inner_limit(const std::vector<double>& deltas,
                                               const std::vector<InnerSample>& samples,
                                               const InnerFrame& frame = inner_frame());

}  // namespace l3lab
