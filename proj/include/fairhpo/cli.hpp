// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

namespace fairhpo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Entry point of the `fairhpo` tool. Returns 0 on success, 1 on usage
// errors (bad flags, invalid config or weights) and 2 on runtime failures.
// With --json, errors are written to `err` as
// {"error": {"kind", "message", "exit_code", "missing"?}}.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fairhpo
