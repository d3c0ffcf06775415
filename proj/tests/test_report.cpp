#include <cstdlib>
#include <random>

#include "doctest.h"
#include "l3lab/error.hpp"
#include "l3lab/report.hpp"

using namespace l3lab;

TEST_CASE("17 significant digits round-trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = std::ldexp(u(rng), int(u(rng)) / 2);
    CHECK(std::strtod(format_g17(x).c_str(), nullptr) == x);
  }
  CHECK(format_g17(0.1) == "0.10000000000000001");
}

TEST_CASE("CSV and JSON encodings of a table") {
  Table t;
  t.columns = {"name", "x", "y"};
  t.add_row({std::string("plain"), 1.0 / 3.0, -2e-300});
  t.add_row({std::string("with, comma \"quoted\""), 6.02214076e23, 0.0});
  CHECK_THROWS_AS(t.add_row({1.0}), Error);

  const std::string csv = to_csv(t);
  CHECK(csv.substr(0, csv.find('\n')) == "name,x,y");
  const Table back = parse_csv(csv);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);

  const auto j = to_json(t);
  CHECK(j.size() == 2);
  CHECK(j[0]["x"].get<double>() == 1.0 / 3.0);
  CHECK(table_from_json(nlohmann::json::parse(j.dump()), t.columns).rows == t.rows);
}

TEST_CASE("result records serialize losslessly") {
  ResultRecord r;
  r.command = "demo";
  r.inputs = {{"tol", 1e-12}};
  r.outputs = {{"value", 0.17774388586350394}, {"rows", {{{"a", 1.0 / 7.0}}}}};
  r.diagnostics = {{"evals", 97}};
  r.wall_time = 0.123456789;
  const ResultRecord back = record_from_json(nlohmann::json::parse(to_json(r).dump()));
  CHECK(back.command == r.command);
  CHECK(back.inputs == r.inputs);
  CHECK(back.outputs == r.outputs);
  CHECK(back.outputs["value"].get<double>() == 0.17774388586350394);
  CHECK(back.diagnostics == r.diagnostics);
  CHECK(back.wall_time == r.wall_time);
  CHECK(back.version == kVersion);
}
