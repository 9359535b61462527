#pragma once

// The acceptance suite: one check per criterion, each at its stated tolerance.

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qdnls::verification {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  nlohmann::json measured;
};

std::vector<int> criterion_ids();

CriterionResult run_criterion(int id);

/// Runs the listed criteria (all when empty); `progress` sees each result as it lands.
std::vector<CriterionResult> run_all(const std::vector<int>& ids = {},
                                     const std::function<void(const CriterionResult&)>& progress = {});

nlohmann::json to_json(const std::vector<CriterionResult>& results);

/// "[PASS] 3 name: detail"
std::string format_line(const CriterionResult& r);

}  // namespace qdnls::verification
