// Acceptance suite: one [PASS]/[FAIL] line per criterion at its stated tolerance.
// Usage: acceptance [id ...] [--json path]

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "verification.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  std::string json_path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--json" && i + 1 < argc) {
      json_path = argv[++i];
    } else {
      try {
        ids.push_back(std::stoi(a));
      } catch (const std::exception&) {
        std::cerr << "usage: acceptance [id ...] [--json path]\n";
        return 2;
      }
    }
  }

  int failed = 0;
  std::vector<qdnls::verification::CriterionResult> results;
  try {
    results = qdnls::verification::run_all(ids, [&](const auto& r) {
      std::cout << qdnls::verification::format_line(r) << "  (" << r.seconds << " s)" << std::endl;
      if (!r.passed) ++failed;
    });
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;

  if (!json_path.empty()) {
    std::ofstream out(json_path);
    out << qdnls::verification::to_json(results).dump(2) << "\n";
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
