// acceptance.hpp -- the verification suite behind `verify`: one check per
// stated criterion, each pinned to its tolerance, returning a machine-
// readable result list.
#pragma once

#include "mcflab/io.hpp"

namespace mcflab {

// Runs the primary acceptance checks (all 14 when `only` is empty, otherwise
// the listed criterion numbers). Deterministic; seeds are fixed inside.
std::vector<CheckResult> run_primary_suite(const std::vector<int>& only = {});

}  // namespace mcflab
