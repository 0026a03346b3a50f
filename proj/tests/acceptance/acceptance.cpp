#include <cstdio>
#include <cstdlib>
#include <vector>

#include "thinfb/verify.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  thinfb::AcceptanceSuite suite;
  int failed = 0;
  suite.run_all(ids, [&](const thinfb::CriterionResult& r) {
    std::printf("%s\n", thinfb::format_result(r).c_str());
    std::fflush(stdout);
    failed += !r.passed;
  });
  std::printf("%d failed\n", failed);
  return failed == 0 ? 0 : 1;
}
