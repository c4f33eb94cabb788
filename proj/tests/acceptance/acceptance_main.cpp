// Acceptance suite: one pass/fail line per criterion. Run all criteria with
// no arguments, or a subset with --criterion <n> (repeatable).

#include <cstdio>
#include <cstring>
#include <vector>

#include "acceptance_util.hpp"

namespace acceptance {

std::map<int, std::pair<std::string, CriterionFn>>& registry() {
  static std::map<int, std::pair<std::string, CriterionFn>> reg = {
      {1, {"smooth-solution spatial rates", criterion1}},
      {2, {"peakon cubic-spline reference errors", criterion2}},
      {3, {"peakon errors across spline orders at N=5120", criterion3}},
      {4, {"ibvp quasiuniform manufactured-solution rates", criterion4}},
      {5, {"invariant preservation", criterion5}},
      {6, {"stability thresholds", criterion6}},
      {7, {"smooth travelling-wave indicators", criterion7}},
      {8, {"peakon indicators", criterion8}},
      {9, {"qualitative peakon artifacts", criterion9}},
      {10, {"property suites", criterion10}},
  };
  return reg;
}

}  // namespace acceptance

int main(int argc, char** argv) {
  using namespace acceptance;
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      wanted.push_back(std::atoi(argv[++i]));
    } else if (std::strcmp(argv[i], "--list") == 0) {
      for (const auto& [num, entry] : registry())
        std::printf("%2d  %s\n", num, entry.first.c_str());
      return 0;
    } else {
      std::fprintf(stderr, "usage: %s [--list] [--criterion n]...\n", argv[0]);
      return 2;
    }
  }
  if (wanted.empty())
    for (const auto& [num, entry] : registry()) wanted.push_back(num);

  int failures = 0;
  for (int num : wanted) {
    auto it = registry().find(num);
    if (it == registry().end()) {
      std::fprintf(stderr, "unknown criterion %d\n", num);
      return 2;
    }
    CriterionResult res;
    try {
      res = it->second.second();
    } catch (const std::exception& e) {
      res.pass = false;
      res.summary = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s — %s\n", res.pass ? "PASS" : "FAIL", num,
                it->second.first.c_str(), res.summary.c_str());
    if (!res.detail.empty()) std::fputs(res.detail.c_str(), stdout);
    std::fflush(stdout);
    if (!res.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
