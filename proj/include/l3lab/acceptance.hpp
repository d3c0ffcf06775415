#pragma once

#include <string>
#include <utility>
#include <vector>

namespace l3lab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// Named measurements, printed with 10 significant digits.
  std::vector<std::pair<std::string, double>> values;
  /// Extra diagnostics that do not decide the outcome.
  std::vector<std::pair<std::string, double>> diagnostics;
  /// Set when the check threw.
  std::string error;
  /// Wall time; kept out of the printed line.
  double seconds = 0.0;
};

struct AcceptanceOptions {
  unsigned threads = 0;
  /// Criteria to run; empty means all.
  std::vector<int> only;
};

[[nodiscard]] std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {});

/// "PASS  1 name: k=v ..." with a trailing "| diag: ..." when diagnostics exist.
[[nodiscard]] std::string format_line(const CriterionResult& r);

}  // namespace l3lab
