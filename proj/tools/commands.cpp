#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "l3lab/acceptance.hpp"
#include "l3lab/error.hpp"
#include "l3lab/inner.hpp"
#include "l3lab/numerics/parallel.hpp"
#include "l3lab/rpc3bp.hpp"
#include "l3lab/separatrix.hpp"
#include "l3lab/splitting.hpp"

namespace l3lab::cli {

namespace {

using nlohmann::json;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string g15(double x) { return fmt("%.15g", x); }

void check_tol(double tol) {
  if (!(tol >= 1e-14 && tol <= 1e-2)) throw Error(ErrorCode::InvalidArgument, "tolerance outside [1e-14, 1e-2]");
}

void set_outputs(CommandResult& r, bool single_row) {
  const json rows = to_json(r.table);
  if (single_row && rows.size() == 1) {
    r.record.outputs = rows[0];
  } else {
    r.record.outputs["rows"] = rows;
  }
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("L3LAB_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

CommandResult cmd_a(double tol) {
  check_tol(tol);
  CommandResult r;
  r.record.command = "a";
  r.record.inputs = {{"tol", tol}};
  const QuadResult q = compute_A(tol);
  r.table.columns = {"value", "err", "evals"};
  r.table.add_row({q.value.real(), q.err, double(q.evals)});
  set_outputs(r, true);
  r.text = {"A = " + g15(q.value.real()), "err = " + fmt("%.3g", q.err),
            "evals = " + std::to_string(q.evals)};
  return r;
}

CommandResult cmd_stokes(const StokesArgs& a) {
  check_tol(a.tol);
  if (!(a.rho_step > 0.0) || !(a.rho_min <= a.rho_max)) {
    throw Error(ErrorCode::InvalidArgument, "empty rho range");
  }
  if (!(a.rho_min >= 8.0 && a.rho_max <= 30.0)) throw Error(ErrorCode::InvalidArgument, "rho range outside [8, 30]");
  if (!(a.re_start >= 100.0)) throw Error(ErrorCode::InvalidArgument, "re_start below 100");
  std::vector<double> rhos;
  const auto n = static_cast<std::size_t>(std::floor((a.rho_max - a.rho_min) / a.rho_step + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) rhos.push_back(a.rho_min + double(k) * a.rho_step);

  ShootOptions opt;
  opt.rtol = a.tol;
  opt.re_start = a.re_start;
  std::vector<StokesRecord> recs(rhos.size());
  parallel_for(rhos.size(), resolve_threads(a.threads),
               [&](std::size_t i) { recs[i] = stokes_record(rhos[i], opt); });

  CommandResult r;
  r.record.command = "stokes";
  r.record.inputs = {{"rho_min", a.rho_min}, {"rho_max", a.rho_max}, {"rho_step", a.rho_step},
                     {"tol", a.tol},         {"re_start", a.re_start}};
  r.table.columns = {"rho", "abs_deltaY", "exp_rho", "theta", "digits_lost", "precision_ok"};
  r.text.push_back("    rho         |deltaY|           theta   digits_lost");
  for (const StokesRecord& s : recs) {
    const bool ok = s.digits_kept >= 3.0;
    r.table.add_row({s.rho, std::abs(s.deltaY), std::exp(s.rho), s.theta, s.digits_lost, ok ? 1.0 : 0.0});
    char buf[160];
    std::snprintf(buf, sizeof buf, "%7.3f  %15.9e  %14.10f  %12.4f%s", s.rho, std::abs(s.deltaY), s.theta,
                  s.digits_lost, ok ? "" : "  precision_loss");
    r.text.emplace_back(buf);
    if (!ok) r.exit_code = 1;
  }
  set_outputs(r, false);
  return r;
}

CommandResult cmd_singularities() {
  CommandResult r;
  r.record.command = "singularities";
  const double A = compute_A().value.real();
  const cplx ref_inf(-0.086697, -0.969516);
  struct Row {
    SingularityPath kind;
    cplx ref;
  };
  const Row rows[] = {{SingularityPath::ToZeroUpper, cplx(0.0, -A)},
                      {SingularityPath::ToZeroLower, cplx(0.0, A)},
                      {SingularityPath::ToInfinityUpper, ref_inf},
                      {SingularityPath::ToInfinityLower, std::conj(ref_inf)}};
  r.table.columns = {"path", "re", "im", "ref_re", "ref_im", "abs_diff", "err"};
  for (const Row& row : rows) {
    const TStar t = t_star(row.kind);
    const double diff = std::abs(t.value - row.ref);
    r.table.add_row({std::string(to_string(row.kind)), t.value.real(), t.value.imag(), row.ref.real(),
                     row.ref.imag(), diff, t.err});
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-18s t* = %+.12f %+.12fi   reference %+.6f %+.6fi   |diff| = %.2e",
                  to_string(row.kind), t.value.real(), t.value.imag(), row.ref.real(), row.ref.imag(), diff);
    r.text.emplace_back(buf);
  }
  set_outputs(r, false);
  return r;
}

CommandResult cmd_separatrix(const SeparatrixArgs& a) {
  if (!(a.dt > 0.0 && a.t_max > 0.0 && a.t_max / a.dt <= 1e5)) {
    throw Error(ErrorCode::InvalidArgument, "need t_max > 0 and 0 < dt with at most 1e5 samples");
  }
  CommandResult r;
  r.record.command = "separatrix";
  r.record.inputs = {{"t_max", a.t_max}, {"dt", a.dt}, {"im", a.im}};
  r.table.columns = {"t_re", "t_im", "lambda_re", "lambda_im", "Lambda_re", "Lambda_im"};
  const auto n = static_cast<std::size_t>(std::floor(a.t_max / a.dt + 1e-9));
  const PendulumState mid = sigma_at(cplx(0.0, a.im));
  std::vector<std::pair<cplx, PendulumState>> pts{{cplx(0.0, a.im), mid}};
  for (double dir : {-1.0, 1.0}) {
    PendulumState s = mid;
    cplx t(0.0, a.im);
    for (std::size_t k = 1; k <= n; ++k) {
      const cplx next(dir * double(k) * a.dt, a.im);
      s = continue_separatrix(s, ComplexPath::line(t, next));
      t = next;
      pts.emplace_back(t, s);
    }
  }
  std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.first.real() < y.first.real(); });
  for (const auto& [t, s] : pts) {
    r.table.add_row({t.real(), t.imag(), s.lambda.real(), s.lambda.imag(), s.Lambda.real(), s.Lambda.imag()});
  }
  set_outputs(r, false);
  r.text.push_back(std::to_string(pts.size()) + " separatrix samples on Im t = " + g15(a.im) +
                   "; use --format csv for the data");
  return r;
}

CommandResult cmd_l3(double mu) {
  CommandResult r;
  r.record.command = "l3";
  r.record.inputs = {{"mu", mu}};
  const Equilibrium e = locate_L3(mu);
  const double hyp = e.eigenvalues[0].real();
  const double ell = e.eigenvalues[2].imag();
  const double ratio = hyp / std::sqrt(mu);
  r.table.columns = {"mu", "d_mu", "d_ratio", "hyperbolic", "elliptic", "hyperbolic_over_sqrt_mu"};
  r.table.add_row({mu, e.d_mu, (e.d_mu - 1.0) / mu, hyp, ell, ratio});
  set_outputs(r, true);
  r.text = {"d_mu = " + g15(e.d_mu),
            "(d_mu - 1)/mu = " + g15((e.d_mu - 1.0) / mu) + "   (5/12 = 0.416666666666667)",
            "eigenvalues = +-" + g15(hyp) + ", +-" + g15(ell) + "i",
            "hyperbolic/sqrt(mu) = " + g15(ratio) + "   (sqrt(21/8) = " + g15(std::sqrt(21.0 / 8.0)) + ")"};
  return r;
}

CommandResult cmd_manifolds(const ManifoldArgs& a) {
  if (!(a.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  CommandResult r;
  r.record.command = "manifolds";
  r.record.inputs = {{"mu", a.mu}, {"dt", a.dt}, {"t_max", a.t_max}};
  r.table.columns = {"branch", "t", "q1", "q2", "p1", "p2", "r", "theta"};
  SectionOptions opt;
  opt.t_max = a.t_max;
  for (ManifoldBranch b : {ManifoldBranch::UnstablePlus, ManifoldBranch::StablePlus}) {
    const SectionPoint hit = manifold_section_point(a.mu, b, opt);
    auto orbit = manifold_orbit(a.mu, b, std::abs(hit.t_hit), a.dt, opt);
    orbit.back() = {hit.t_hit, hit.cart};
    for (const auto& [t, s] : orbit) {
      const PolarState p = polar_from_cart(s);
      r.table.add_row({std::string(to_string(b)), t, s.q1, s.q2, s.p1, s.p2, p.r, p.theta});
    }
    r.text.push_back(std::string(to_string(b)) + ": section hit at t = " + g15(hit.t_hit) + ", r = " +
                     g15(hit.r) + ", R = " + g15(hit.R) + ", G = " + g15(hit.G));
  }
  set_outputs(r, false);
  return r;
}

CommandResult cmd_distance(const DistanceArgs& a) {
  CommandResult r;
  r.record.command = "distance";
  const double A = compute_A().value.real();
  const double theta_abs = a.theta_abs > 0.0 ? a.theta_abs : theta(20.0).theta;
  r.record.inputs = {{"mu", a.mu},   {"theta_abs", a.theta_abs}, {"t_max", a.t_max}, {"fit", a.fit},
                     {"mu_min", a.mu_min}, {"mu_max", a.mu_max}, {"n", a.n}};
  r.record.diagnostics = {{"A", A}, {"theta_abs_used", theta_abs}};
  SectionOptions opt;
  opt.t_max = a.t_max;
  r.table.columns = {"mu", "dist_measured", "dist_asymptotic", "ratio", "gap_r", "gap_R", "gap_G"};
  auto add = [&](const SplittingSample& s) {
    r.table.add_row({s.mu, s.dist_measured, s.dist_asymptotic, s.dist_measured / s.dist_asymptotic, s.gap_r,
                     s.gap_R, s.gap_G});
  };
  if (!a.fit) {
    const SplittingSample s = splitting_sample(a.mu, A, theta_abs, opt);
    add(s);
    set_outputs(r, true);
    r.text = {"asymptotic = " + g15(s.dist_asymptotic), "measured = " + g15(s.dist_measured),
              "ratio = " + g15(s.dist_measured / s.dist_asymptotic)};
    return r;
  }
  if (a.n < 4 || !(a.mu_min > 0.0 && a.mu_min < a.mu_max)) {
    throw Error(ErrorCode::InvalidArgument, "fit needs n >= 4 and 0 < mu_min < mu_max");
  }
  std::vector<double> mus;
  for (int k = 0; k < a.n; ++k) mus.push_back(a.mu_min * std::pow(a.mu_max / a.mu_min, k / double(a.n - 1)));
  const SplittingFit f = fit_splitting_exponent(mus, A, theta_abs, opt, resolve_threads(a.threads));
  for (const SplittingSample& s : f.samples) add(s);
  set_outputs(r, false);
  r.record.outputs["fit"] = {{"slope", f.slope}, {"intercept", f.intercept}, {"theta_eff", f.theta_eff},
                             {"slope_over_minus_A", -f.slope / A}};
  for (const SplittingSample& s : f.samples) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "mu = %.4e  measured = %.6e  asymptotic = %.6e  ratio = %.4f", s.mu,
                  s.dist_measured, s.dist_asymptotic, s.dist_measured / s.dist_asymptotic);
    r.text.emplace_back(buf);
  }
  r.text.push_back("slope = " + g15(f.slope) + "   (-A = " + g15(-A) + ", ratio " + g15(-f.slope / A) + ")");
  r.text.push_back("theta_eff = " + g15(f.theta_eff));
  return r;
}

CommandResult cmd_verify(unsigned threads, const std::vector<int>& only) {
  CommandResult r;
  r.record.command = "verify";
  r.record.inputs = {{"only", only}};
  AcceptanceOptions opt;
  opt.threads = resolve_threads(threads);
  opt.only = only;
  const auto results = run_acceptance(opt);
  r.table.columns = {"id", "name", "pass", "kind", "key", "value"};
  int passed = 0;
  for (const CriterionResult& c : results) {
    r.text.push_back(format_line(c));
    passed += c.pass;
    if (!c.pass) r.exit_code = 1;
    for (const auto& [k, v] : c.values) {
      r.table.add_row({double(c.id), c.name, c.pass ? 1.0 : 0.0, std::string("value"), k, v});
    }
    for (const auto& [k, v] : c.diagnostics) {
      r.table.add_row({double(c.id), c.name, c.pass ? 1.0 : 0.0, std::string("diagnostic"), k, v});
    }
    if (!c.error.empty()) r.record.diagnostics["error_" + std::to_string(c.id)] = c.error;
  }
  set_outputs(r, false);
  r.text.push_back(std::to_string(passed) + "/" + std::to_string(results.size()) + " criteria passed");
  return r;
}

std::string render(const CommandResult& r, const std::string& format) {
  if (format == "csv") return to_csv(r.table);
  if (format == "json") return to_json(r.record).dump(2) + "\n";
  std::string out;
  for (const auto& line : r.text) out += line + "\n";
  return out;
}

}  // namespace l3lab::cli
