#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>

#include "commands.hpp"
#include "doctest.h"
#include "l3lab/error.hpp"

using namespace l3lab;
using namespace l3lab::cli;

namespace {

struct Run {
  std::string out;
  int exit_code = -1;
};

Run run(const std::string& args) {
  Run r;
  const std::string cmd = std::string(L3LAB_TOOL) + " " + args + " 2>&1";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  REQUIRE(pipe);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe.release());
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

double num(const Cell& c) { return std::get<double>(c); }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("l3lab_test_" + name);
}

const double kTable[] = {1.6373, 1.6361, 1.6351, 1.6341, 1.6333, 1.6326, 1.6320, 1.6315};

}  // namespace

TEST_CASE("a command") {
  const CommandResult tight = cmd_a(1e-10);
  REQUIRE(tight.text.at(0).rfind("A = ", 0) == 0);
  CHECK(std::abs(std::stod(tight.text[0].substr(4)) - 0.177744) < 5e-7);
  CHECK(std::abs(cmd_a(1e-6).record.outputs["value"].get<double>() -
                 tight.record.outputs["value"].get<double>()) <= 1e-5);
  for (const char* key : {"value", "err", "evals"}) CHECK(tight.record.outputs.contains(key));
  CHECK_THROWS_AS((void)cmd_a(1.0), Error);
}

TEST_CASE("stokes command") {
  const CommandResult r = cmd_stokes({});
  REQUIRE(r.table.rows.size() == 8);
  CHECK(r.table.columns ==
        std::vector<std::string>{"rho", "abs_deltaY", "exp_rho", "theta", "digits_lost", "precision_ok"});
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(num(r.table.rows[i][0]) == 13.0 + double(i));
    CHECK(std::abs(num(r.table.rows[i][3]) - kTable[i]) <= 5e-3);
  }
  CHECK(r.exit_code == 0);

  // CSV and JSON agree field by field.
  const Table from_csv = parse_csv(render(r, "csv"));
  const auto j = nlohmann::json::parse(render(r, "json"));
  CHECK(from_csv.rows == table_from_json(j["outputs"]["rows"], r.table.columns).rows);
  CHECK(from_csv.rows == r.table.rows);

  StokesArgs half;
  half.rho_min = 14.0;
  half.rho_step = 0.5;
  const CommandResult p = cmd_stokes(half);
  CHECK(p.table.rows.size() == 13);
  double lo = 1e9, hi = -1e9;
  for (const auto& row : p.table.rows) {
    lo = std::min(lo, num(row[3]));
    hi = std::max(hi, num(row[3]));
  }
  CHECK(hi - lo <= 1e-2);

  StokesArgs deep;
  deep.rho_min = 26.0;
  deep.rho_max = 28.0;
  const CommandResult d = cmd_stokes(deep);
  REQUIRE(d.table.rows.size() == 3);
  CHECK(num(d.table.rows[0][5]) == 1.0);
  CHECK(num(d.table.rows[2][5]) == 0.0);
  CHECK(d.exit_code == 1);

  StokesArgs empty;
  empty.rho_min = 20.0;
  empty.rho_max = 13.0;
  CHECK_THROWS_AS((void)cmd_stokes(empty), Error);
}

TEST_CASE("delegating commands") {
  const CommandResult s = cmd_singularities();
  REQUIRE(s.table.rows.size() == 4);
  REQUIRE(s.text.size() == 4);
  CHECK(num(s.table.rows[0][5]) <= 1e-6);
  CHECK(num(s.table.rows[1][5]) <= 1e-6);
  CHECK(num(s.table.rows[2][5]) <= 1e-4);
  CHECK(num(s.table.rows[3][5]) <= 1e-4);

  const CommandResult l = cmd_l3(0.003);
  CHECK(std::abs(l.record.outputs["hyperbolic_over_sqrt_mu"].get<double>() - std::sqrt(21.0 / 8.0)) < 0.01);
  CHECK(l.text.at(3).rfind("hyperbolic/sqrt(mu)", 0) == 0);

  DistanceArgs da;
  da.theta_abs = 1.63;
  const CommandResult dist = cmd_distance(da);
  CHECK(dist.record.outputs["dist_measured"].get<double>() > 0.0);
  CHECK(std::abs(dist.record.outputs["dist_asymptotic"].get<double>() - 9.36e-4) < 0.01 * 9.36e-4);
  CHECK(dist.text.size() == 3);

  SeparatrixArgs sa;
  sa.t_max = 1.0;
  sa.dt = 0.25;
  const CommandResult sep = cmd_separatrix(sa);
  REQUIRE(sep.table.rows.size() == 9);
  CHECK(num(sep.table.rows[4][0]) == 0.0);
  CHECK(std::abs(num(sep.table.rows[4][2]) - 2.724359272971496) < 1e-12);
  // lambda is even and Lambda odd in t.
  CHECK(std::abs(num(sep.table.rows[0][2]) - num(sep.table.rows[8][2])) < 1e-10);
  CHECK(std::abs(num(sep.table.rows[0][4]) + num(sep.table.rows[8][4])) < 1e-10);

  ManifoldArgs ma;
  ma.dt = 5.0;
  const CommandResult m = cmd_manifolds(ma);
  int unstable = 0;
  for (const auto& row : m.table.rows) unstable += std::get<std::string>(row[0]) == "unstable_plus";
  CHECK(unstable > 10);
  CHECK(std::abs(num(m.table.rows.back()[7]) - std::numbers::pi / 2) <= 1e-10);
}

TEST_CASE("threads follow L3LAB_THREADS") {
  setenv("L3LAB_THREADS", "2", 1);
  CHECK(resolve_threads(8) == 2);
  CHECK(resolve_threads(0) <= 2);
  CHECK(resolve_threads(1) == 1);
  unsetenv("L3LAB_THREADS");
  CHECK(resolve_threads(3) == 3);
}

TEST_CASE("executable: exit codes, config files and determinism") {
  const Run a = run("a");
  CHECK(a.exit_code == 0);
  REQUIRE(a.out.rfind("A = ", 0) == 0);
  CHECK(std::abs(std::stod(a.out.substr(4)) - 0.177744) < 5e-7);

  const Run empty = run("stokes --rho-min 20 --rho-max 13");
  CHECK(empty.exit_code == 2);
  CHECK(empty.out.find("Usage") != std::string::npos);
  CHECK(run("stokes --no-such-flag").exit_code == 2);
  CHECK(run("").exit_code == 2);
  CHECK(run("manifolds --t-max 50").exit_code == 1);

  const auto cfg = temp_file("config.txt");
  {
    std::ofstream f(cfg);
    f << "# range\nrho_min = 14\nrho_max=15\n";
  }
  const Run c = run("stokes --config " + cfg.string() + " --format csv --rho-max 16");
  CHECK(c.exit_code == 0);
  const Table t = parse_csv(c.out);
  REQUIRE(t.rows.size() == 3);
  CHECK(num(t.rows[0][0]) == 14.0);
  CHECK(num(t.rows[2][0]) == 16.0);
  const Run g = run("--format csv --config " + cfg.string() + " stokes");
  CHECK(g.exit_code == 0);
  CHECK(parse_csv(g.out).rows.size() == 2);
  {
    std::ofstream f(cfg);
    f << "bogus=1\n";
  }
  CHECK(run("stokes --config " + cfg.string()).exit_code == 2);
  std::filesystem::remove(cfg);

  const auto out = temp_file("out.csv");
  CHECK(run("singularities --format csv --out " + out.string()).exit_code == 0);
  std::ifstream in(out);
  const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(parse_csv(body).rows.size() == 4);
  std::filesystem::remove(out);

  const Run s1 = run("stokes --rho-min 13 --rho-max 15 --format csv --threads 3");
  const Run s2 = run("stokes --rho-min 13 --rho-max 15 --format csv --threads 1");
  CHECK(s1.out == s2.out);

  // JSON payloads differ only in the metadata.
  auto strip = [](const std::string& s) {
    auto j = nlohmann::json::parse(s);
    j.erase("meta");
    return j.dump();
  };
  CHECK(strip(run("l3 --mu 0.003 --format json").out) == strip(run("l3 --mu 0.003 --format json").out));
}
