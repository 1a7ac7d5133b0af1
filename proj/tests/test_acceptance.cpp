// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <cstdlib>

#include "adleg_tools/acceptance.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: test_acceptance <criterion>\n");
    return 2;
  }
  const auto result = adleg::acceptance::run_criterion(std::atoi(argv[1]));
  std::printf("%s\n", adleg::acceptance::format(result).c_str());
  return result.passed ? 0 : 1;
}
