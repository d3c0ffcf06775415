#pragma once

#include <string>
#include <vector>

#include "l3lab/report.hpp"

namespace l3lab::cli {

/// Everything a command produces. `table` is the CSV view; the JSON view is
/// `record`, whose outputs are built from the same table.
struct CommandResult {
  ResultRecord record;
  Table table;
  std::vector<std::string> text;
  int exit_code = 0;
};

/// min(requested or hardware, L3LAB_THREADS when set).
[[nodiscard]] unsigned resolve_threads(unsigned requested);

[[nodiscard]] CommandResult cmd_a(double tol);

struct StokesArgs {
  double rho_min = 13.0;
  double rho_max = 20.0;
  double rho_step = 1.0;
  double tol = 1e-12;
  double re_start = 1000.0;
  unsigned threads = 0;
};
[[nodiscard]] CommandResult cmd_stokes(const StokesArgs& a);

[[nodiscard]] CommandResult cmd_singularities();

struct SeparatrixArgs {
  double t_max = 5.0;
  double dt = 0.05;
  /// Imaginary part of the sampled line t = s + i im.
  double im = 0.0;
};
[[nodiscard]] CommandResult cmd_separatrix(const SeparatrixArgs& a);

[[nodiscard]] CommandResult cmd_l3(double mu);

struct ManifoldArgs {
  double mu = 0.003;
  double dt = 0.5;
  double t_max = 500.0;
};
[[nodiscard]] CommandResult cmd_manifolds(const ManifoldArgs& a);

struct DistanceArgs {
  double mu = 1e-3;
  /// |Theta| for the asymptotic formula; 0 computes it at rho = 20.
  double theta_abs = 0.0;
  double t_max = 500.0;
  bool fit = false;
  double mu_min = 1e-3;
  double mu_max = 1e-2;
  int n = 6;
  unsigned threads = 0;
};
[[nodiscard]] CommandResult cmd_distance(const DistanceArgs& a);

[[nodiscard]] CommandResult cmd_verify(unsigned threads, const std::vector<int>& only);

/// Text, CSV or JSON rendering of a result (format is "text", "csv" or "json").
[[nodiscard]] std::string render(const CommandResult& r, const std::string& format);

}  // namespace l3lab::cli
