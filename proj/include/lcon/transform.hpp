// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lcon/ast.hpp"
#include "lcon/constraints.hpp"
#include "lcon/subcontract.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcon {

enum class Level { Baseline, Subset };

const char *level_name(Level l);

// Child indices from the root to the rewritten node.
using Path = std::vector<std::size_t>;

std::string print_path(const Path &p);

struct TransformStep {
  std::string rule;
  TermPtr before; // the redex
  TermPtr after;  // its replacement (a fork for the fork rules)
  std::vector<Constraint> store_delta;
  Path path;
};

struct TransformConfig {
  std::uint64_t verify_fuel = 10'000;
  std::size_t step_cap = 200'000;
  std::size_t max_branches = 64;
};

class StepBudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ForkLimitExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Rewrites terms one rule at a time. Holds the subcontract memo so that
// repeated steps on one program share it.
class Rewriter {
public:
  Rewriter(Level level, const ImplicationEnv &env, TransformConfig cfg = {});
  ~Rewriter();
  Rewriter(const Rewriter &) = delete;
  Rewriter &operator=(const Rewriter &) = delete;

  // Applies one step in place; nullopt when the term is canonical.
  std::optional<TransformStep> step(ConstraintStore &store, TermPtr &t);

  // Name and position of the rule that would fire, without applying it.
  std::optional<std::pair<std::string, Path>> peek(const ConstraintStore &store,
                                                   const TermPtr &t);

  // Predicate checks skipped because compile-time evaluation did not
  // finish within the verify fuel.
  const std::vector<std::string> &warnings() const { return warnings_; }

  Level level() const { return level_; }
  const TransformConfig &config() const { return cfg_; }
  Subcontract &subcontract() { return *sub_; }

private:
  friend class Search;
  struct Caches;

  Level level_;
  const ImplicationEnv &env_;
  TransformConfig cfg_;
  std::unique_ptr<Subcontract> sub_;
  std::unique_ptr<Caches> caches_;
  std::vector<std::string> warnings_;
};

struct NormalizeResult {
  ConstraintStore store;
  TermPtr term;
  std::vector<TransformStep> trace;
  std::size_t steps = 0;
  std::size_t branches_max = 1;
  std::vector<std::string> warnings;
};

NormalizeResult normalize(Level level, ConstraintStore store, TermPtr t,
                          const ImplicationEnv &env, const TransformConfig &cfg = {},
                          bool keep_trace = false);

// Outcome of evaluating a flat contract on a value at compile time.
enum class VerifyResult { True, False, Unknown };
VerifyResult verify_predicate(const ContractPtr &c, const TermPtr &value,
                              std::uint64_t fuel);

// Number of fork leaves in an observation tree.
std::size_t count_branches(const TermPtr &t);

// Counts flat and named-flat contract occurrences in asserted contracts.
std::size_t count_predicates(const TermPtr &t);

// Helpers shared with the join stage and the canonicity checkers.
struct Frame {
  std::optional<std::string> label;
  std::optional<VarId> var;
  ContractPtr contract;
  bool same(const Frame &o) const;
};

// Splits the assertion stack off the top of t, outermost frame first.
std::pair<std::vector<Frame>, TermPtr> split_frames(const TermPtr &t);
TermPtr wrap_frames(const std::vector<Frame> &frames, TermPtr core);

TermPtr replace_at(const TermPtr &root, const Path &path, std::size_t depth,
                   const TermPtr &repl);
TermPtr subterm_at(const TermPtr &root, const Path &path);

bool is_blame_term(const TermPtr &t);

// A function contract with a trivial range.
bool domain_only(const ContractPtr &c);

// Flat and named-flat contracts inside c.
std::size_t contract_checks(const ContractPtr &c);

// Whether two stacked assertions collapse into one: true keeps the outer
// contract at the inner position, false drops the outer assertion.
std::optional<bool> subset_keeps_outer(Subcontract &sub, const ContractPtr &outer,
                                       const ContractPtr &inner);

} // namespace lcon
