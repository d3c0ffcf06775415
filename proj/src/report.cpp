#include "l3lab/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "l3lab/error.hpp"

namespace l3lab {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Cell parse_cell(const std::string& s) {
  if (s.empty()) return s;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() + s.size()) return v;
  return s;
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error(ErrorCode::InvalidArgument, "row width mismatch");
  rows.push_back(std::move(row));
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + quote(t.columns[i]);
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const double* d = std::get_if<double>(&row[i])) {
        out += format_g17(*d);
      } else {
        out += quote(std::get<std::string>(row[i]));
      }
    }
    out += '\n';
  }
  return out;
}

Table parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Table t;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidArgument, "empty CSV");
  t.columns = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Cell> row;
    for (const auto& s : split_line(line)) row.push_back(parse_cell(s));
    t.add_row(std::move(row));
  }
  return t;
}

nlohmann::json to_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit([&](const auto& v) { obj[t.columns[i]] = v; }, row[i]);
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

Table table_from_json(const nlohmann::json& rows, const std::vector<std::string>& columns) {
  Table t;
  t.columns = columns;
  for (const auto& obj : rows) {
    std::vector<Cell> row;
    for (const auto& c : columns) {
      const auto& v = obj.at(c);
      if (v.is_number()) {
        row.emplace_back(v.get<double>());
      } else {
        row.emplace_back(v.get<std::string>());
      }
    }
    t.add_row(std::move(row));
  }
  return t;
}

nlohmann::json to_json(const ResultRecord& r) {
  return {{"command", r.command},
          {"inputs", r.inputs},
          {"outputs", r.outputs},
          {"diagnostics", r.diagnostics},
          {"meta", {{"wall_time_s", r.wall_time}, {"version", r.version}}}};
}

ResultRecord record_from_json(const nlohmann::json& j) {
  ResultRecord r;
  r.command = j.at("command").get<std::string>();
  r.inputs = j.at("inputs");
  r.outputs = j.at("outputs");
  r.diagnostics = j.at("diagnostics");
  r.wall_time = j.at("meta").at("wall_time_s").get<double>();
  r.version = j.at("meta").at("version").get<std::string>();
  return r;
}

}  // namespace l3lab
