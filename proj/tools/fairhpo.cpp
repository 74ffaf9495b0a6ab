// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "fairhpo/cli.hpp"

int main(int argc, char** argv) { return fairhpo::run_cli(argc, argv, std::cout, std::cerr); }
