// Copyright 2026 The fprg Authors
// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "fprg/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return fprg::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
