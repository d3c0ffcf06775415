#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "l3lab/error.hpp"

using namespace l3lab;
using namespace l3lab::cli;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Flat key=value file; '#' starts a comment.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CLI::ConversionError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    args.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  return args;
}

// Inserts the config entries right after the subcommand so that flags given
// on the command line, which come later, take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> in(argv + 1, argv + argc);
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == "--config" && i + 1 < in.size()) {
      path = in[++i];
    } else if (in[i].rfind("--config=", 0) == 0) {
      path = in[i].substr(9);
    } else {
      rest.push_back(in[i]);
    }
  }
  if (path.empty()) return rest;
  const auto extra = read_config(path);
  static const std::vector<std::string> kCommands = {"a", "stokes", "singularities", "separatrix",
                                                      "l3", "manifolds", "distance", "verify"};
  auto sub = std::find_first_of(rest.begin(), rest.end(), kCommands.begin(), kCommands.end());
  if (sub != rest.end()) ++sub;
  rest.insert(sub, extra.begin(), extra.end());
  return rest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerics for the L3 point of the restricted planar circular three-body problem"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "text";
  std::string out_path;
  unsigned threads = 0;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
  app.add_option("--out", out_path, "Write the output to this file instead of stdout");
  app.add_option("--threads", threads, "Worker threads (0: hardware; capped by L3LAB_THREADS)");
  app.add_option("--config", "Flat key=value file; command-line flags take precedence");

  double a_tol = 1e-10;
  auto* a = app.add_subcommand("a", "Strip half-width A of the separatrix");
  a->add_option("--tol", a_tol, "Quadrature tolerance")->capture_default_str();

  StokesArgs st;
  auto* stokes = app.add_subcommand(
      "stokes", "Theta_rho = |Y^u - Y^s| e^rho at U = -i rho.\n"
                "CSV columns: rho, abs_deltaY, exp_rho, theta, digits_lost, precision_ok");
  stokes->add_option("--rho-min", st.rho_min)->capture_default_str();
  stokes->add_option("--rho-max", st.rho_max)->capture_default_str();
  stokes->add_option("--rho-step", st.rho_step)->capture_default_str();
  stokes->add_option("--tol", st.tol, "Integrator rtol")->capture_default_str();
  stokes->add_option("--re-start", st.re_start, "Seeding distance of the series")->capture_default_str();

  auto* sing = app.add_subcommand("singularities", "Visible singularities of the separatrix with references");

  SeparatrixArgs sep;
  auto* separatrix = app.add_subcommand(
      "separatrix", "Separatrix along t = s + i im, |s| <= t-max.\n"
                    "CSV columns: t_re, t_im, lambda_re, lambda_im, Lambda_re, Lambda_im");
  separatrix->add_option("--t-max", sep.t_max)->capture_default_str();
  separatrix->add_option("--dt", sep.dt)->capture_default_str();
  separatrix->add_option("--im", sep.im)->capture_default_str();

  double l3_mu = 0.003;
  auto* l3 = app.add_subcommand("l3", "Location and spectrum of L3");
  l3->add_option("--mu", l3_mu)->capture_default_str();

  ManifoldArgs man;
  auto* manifolds = app.add_subcommand(
      "manifolds", "Unstable and stable branches around L5 up to the section theta = pi/2, r > 1.\n"
                   "CSV columns: branch, t, q1, q2, p1, p2, r, theta");
  manifolds->add_option("--mu", man.mu)->capture_default_str();
  manifolds->add_option("--dt", man.dt, "Sampling step")->capture_default_str();
  manifolds->add_option("--t-max", man.t_max)->capture_default_str();

  DistanceArgs dist;
  auto* distance = app.add_subcommand(
      "distance", "Measured and asymptotic manifold distance at the section.\n"
                  "CSV columns: mu, dist_measured, dist_asymptotic, ratio, gap_r, gap_R, gap_G");
  distance->add_option("--mu", dist.mu)->capture_default_str();
  distance->add_option("--theta-abs", dist.theta_abs, "|Theta|; 0 computes it at rho = 20")->capture_default_str();
  distance->add_option("--t-max", dist.t_max)->capture_default_str();
  distance->add_flag("--fit", dist.fit, "Fit the exponent over a log grid of mu");
  distance->add_option("--mu-min", dist.mu_min)->capture_default_str();
  distance->add_option("--mu-max", dist.mu_max)->capture_default_str();
  distance->add_option("--n", dist.n, "Grid size for --fit")->capture_default_str();

  std::vector<int> only;
  auto* verify = app.add_subcommand("verify", "Run the acceptance checks; exit 1 if any fails");
  verify->add_option("--only", only, "Criterion ids to run")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  CommandResult res;
  try {
    if (*a) res = cmd_a(a_tol);
    if (*stokes) {
      st.threads = threads;
      res = cmd_stokes(st);
    }
    if (*sing) res = cmd_singularities();
    if (*separatrix) res = cmd_separatrix(sep);
    if (*l3) res = cmd_l3(l3_mu);
    if (*manifolds) res = cmd_manifolds(man);
    if (*distance) {
      dist.threads = threads;
      res = cmd_distance(dist);
    }
    if (*verify) res = cmd_verify(threads, only);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::InvalidArgument) {
      std::cerr << app.help();
      return kExitUsage;
    }
    return kExitNumerical;
  }
  res.record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string payload = render(res, format);
  if (out_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return kExitNumerical;
    }
    f << payload;
  }
  if (format == "text") std::cerr << "wall time " << res.record.wall_time << " s, l3lab " << res.record.version << "\n";
  return res.exit_code;
}
