// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lcon/ast.hpp"
#include "lcon/constraints.hpp"

#include <cstdint>
#include <optional>

namespace lcon {

inline constexpr std::uint64_t kDefaultFuel = 1'000'000;

struct Configuration {
  ConstraintStore store;
  TermPtr term;
  std::uint64_t predicate_checks = 0;
  std::uint64_t fuel = kDefaultFuel;
};

struct Outcome {
  enum class Kind { Value, Blame, Stuck, OutOfFuel };
  Kind kind = Kind::Stuck;
  TermPtr term; // the value, or the term that could not make progress
  BlameVerdict blame{};
  ConstraintStore store;
  std::uint64_t predicate_checks = 0;
  std::uint64_t steps = 0;
};

const char *outcome_name(Outcome::Kind k);

enum class StepStatus { Stepped, Value, Blame, Stuck };

struct StepResult {
  StepStatus status;
  BlameVerdict blame{}; // set when a blame term reached evaluation position
};

// Performs one reduction step in place. Does not consult the blame state.
StepResult step(Configuration &cfg);

// Reduces to a value, a blame state, a stuck term or fuel exhaustion.
Outcome run(const TermPtr &program, std::uint64_t fuel = kDefaultFuel,
            ConstraintStore store = {});

std::optional<Constant> delta(OpKind op, const std::vector<Constant> &args);
bool builtin_holds(NamedPred p, const TermPtr &value);

// Value equality for comparing runs: constants by value, lambdas up to
// alpha-equivalence modulo contracts and blame terms.
bool same_value(const TermPtr &a, const TermPtr &b);

} // namespace lcon
