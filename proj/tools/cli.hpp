// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

namespace semiprop {

/// Exit codes: 0 success, 1 verification budget exceeded, 2 bad arguments or
/// configuration, 3 solver or quadrature failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace semiprop
