// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lcon/subset.hpp"

#include <functional>
#include <map>

namespace lcon {

class JoinStuck : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Structural equivalence: terms agree once assertions are ignored, and a
// blame term matches anything. Returns the aligned positions where the two
// sides differ by frames or blame.
struct EquivWitness {
  std::vector<std::pair<Path, Path>> positions;
};
std::optional<EquivWitness> struct_equiv(const TermPtr &m, const TermPtr &n);

// Frames that stand for the same check although they differ.
using FrameTwin = std::function<bool(const Frame &, const Frame &)>;

// Union of two assertion stacks, each frame once. Frames shared by both
// keep their relative depth, and twins sit next to each other there; the
// others are interleaved level by level with b's frame inside a's at each
// level unless b_inside is false. Frames are listed outermost first.
std::vector<Frame> ctx_join(const std::vector<Frame> &a, const std::vector<Frame> &b,
                            bool b_inside = true, const FrameTwin &twin = {});

using RuleCounts = std::map<std::string, std::size_t>;

// Joins the leftmost innermost fork; nullopt when the tree is fork-free.
// With a store, differing frames are stacked in the order run time would
// check them.
std::optional<TermPtr> join_step(const TermPtr &t, RuleCounts *counts = nullptr,
                                 const ConstraintStore *store = nullptr);
TermPtr join_all(TermPtr t, RuleCounts *counts = nullptr,
                 const ConstraintStore *store = nullptr);

// Collapses one duplicated assertion of an alpha-equal contract.
std::optional<TermPtr> condense_step(ConstraintStore &store, const TermPtr &t);
TermPtr condense_all(ConstraintStore &store, TermPtr t, RuleCounts *counts = nullptr);

struct OptimizeReport {
  RuleCounts rule_counts;
  std::size_t branches_max = 1;
  std::size_t predicates_before = 0;
  std::size_t predicates_after = 0;
  std::vector<std::string> warnings;
};

struct OptimizeResult {
  ConstraintStore store;
  TermPtr term;
  OptimizeReport report;
  std::vector<TransformStep> trace;
};

// Subset normalization, then join, then condense.
OptimizeResult optimize(const TermPtr &program, const ImplicationEnv &env,
                        const TransformConfig &cfg = {}, bool keep_trace = false);

} // namespace lcon
