#pragma once

#include <vector>

#include "l3lab/rpc3bp.hpp"

namespace l3lab {

/// Leading-order distance 4^{1/3} mu^{1/3} e^{-A/sqrt(mu)} |Theta| between the
/// invariant manifolds of L3 at the section. mu in (0, 0.05].
[[nodiscard]] double asymptotic_distance(double mu, double A, double theta_abs);

/// The pair of one-dimensional manifold branches of L3 that go around L5.
enum class ManifoldBranch { UnstablePlus, StablePlus };

[[nodiscard]] const char* to_string(ManifoldBranch b);

/// Crossing of the section {theta = pi/2, r > 1}.
struct SectionPoint {
  double r = 0.0;
  double R = 0.0;
  double G = 0.0;
  double theta = 0.0;
  /// Crossing time; negative for the stable branch.
  double t_hit = 0.0;
  CartesianState cart;
};

struct SectionOptions {
  double seed_eps = 1e-7;
  double t_max = 500.0;
  double rtol = 1e-13;
  double atol = 1e-16;
};

/// Unit eigenvector of the hyperbolic eigenvalue of L3 with the given sign,
/// oriented so that q2 grows along the integration direction of the branch.
[[nodiscard]] Eigen::Vector4d hyperbolic_direction(const Equilibrium& eq, ManifoldBranch b);

/// Integrates the branch from L3 + seed_eps v (forward for UnstablePlus,
/// backward for StablePlus) to its first crossing of the section, refined to
/// |theta - pi/2| <= 1e-10. Throws NoCrossing past t_max and EventDegenerate
/// when theta' nearly vanishes there. mu in [1e-4, 1e-2]; below about 5e-4 the
/// crossing lies beyond the default t_max.
[[nodiscard]] SectionPoint manifold_section_point(double mu, ManifoldBranch b,
                                                  const SectionOptions& opt = {});

/// Trajectory samples (t, state) of a branch up to |t| = t_end, every dt.
[[nodiscard]] std::vector<std::pair<double, CartesianState>> manifold_orbit(
    double mu, ManifoldBranch b, double t_end, double dt, const SectionOptions& opt = {});

struct SplittingSample {
  double mu = 0.0;
  SectionPoint unstable;
  SectionPoint stable;
  /// Euclidean distance in (r, R, G).
  double dist_measured = 0.0;
  double dist_asymptotic = 0.0;
  double gap_r = 0.0;
  double gap_R = 0.0;
  double gap_G = 0.0;
};

[[nodiscard]] SplittingSample splitting_sample(double mu, double A, double theta_abs,
                                               const SectionOptions& opt = {});

struct SplittingFit {
  std::vector<SplittingSample> samples;
  /// log(dist mu^{-1/3}) = intercept + slope / sqrt(mu).
  double slope = 0.0;
  double intercept = 0.0;
  /// exp(intercept) / 4^{1/3}.
  double theta_eff = 0.0;
  double rms = 0.0;
};

/// mus within [1e-4, 1e-2], at least four of them. Samples are computed on up
/// to `threads` threads (0: hardware).
[[nodiscard]] SplittingFit fit_splitting_exponent(const std::vector<double>& mus, double A,
                                                  double theta_abs,
                                                  const SectionOptions& opt = {},
                                                  unsigned threads = 1);

}  // namespace l3lab
