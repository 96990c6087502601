// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lcon/baseline.hpp"

namespace lcon {

std::optional<TransformStep> subset_step(ConstraintStore &store, TermPtr &t,
                                         const ImplicationEnv &env,
                                         const TransformConfig &cfg = {});

// Drives the subset level to canonical form. The result may contain forks.
NormalizeResult subset_normalize(ConstraintStore store, TermPtr t, const ImplicationEnv &env,
                                 const TransformConfig &cfg = {}, bool keep_trace = false);

// Grammar check of the subset level, applied to every fork leaf. The store
// decides whether a residual false contract can still produce blame.
Canonicity is_canonical_subset(const TermPtr &t, const ConstraintStore &store,
                               const ImplicationEnv &env,
                               std::uint64_t verify_fuel = TransformConfig{}.verify_fuel);

} // namespace lcon
