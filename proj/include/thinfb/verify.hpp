#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace thinfb {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  // seconds
};

/// The built-in acceptance suite. Expensive solves are shared between
/// criteria and computed on first use.
class AcceptanceSuite {
 public:
  AcceptanceSuite();
  ~AcceptanceSuite();

  static constexpr int count = 12;
  static std::string name(int id);

  /// Runs one criterion (1..12); exceptions are reported as failures.
  CriterionResult run(int id);
  /// Runs the given criteria (all when empty); `on_result` sees each result
  /// as soon as it is available.
  std::vector<CriterionResult> run_all(const std::vector<int>& ids = {},
                                       const std::function<void(const CriterionResult&)>& on_result = {});

  struct Cache;

 private:
  std::unique_ptr<Cache> cache_;
};

/// "PASS [ 3] name (1.2 s / 300 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace thinfb
