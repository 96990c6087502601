// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lcon/transform.hpp"

namespace lcon {

// Result of a grammar check: either canonical, or the rule whose pattern
// matched and where.
struct Canonicity {
  bool canonical = true;
  std::string rule;
  Path path;
};

std::optional<TransformStep> baseline_step(ConstraintStore &store, TermPtr &t,
                                           const ImplicationEnv &env);

NormalizeResult baseline_normalize(ConstraintStore store, TermPtr t,
                                   const ImplicationEnv &env,
                                   const TransformConfig &cfg = {},
                                   bool keep_trace = false);

// Membership in the canonical-term grammar of the baseline level, checked
// directly on the syntax rather than by searching for a rule.
Canonicity is_canonical_baseline(const TermPtr &t,
                                 std::uint64_t verify_fuel = TransformConfig{}.verify_fuel);

} // namespace lcon
