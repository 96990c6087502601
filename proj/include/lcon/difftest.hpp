// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lcon/eval.hpp"
#include "lcon/join.hpp"

#include <cstdint>
#include <functional>
#include <random>

namespace lcon {

enum class Verdict { StrongOk, WeakOk, Violation, Inconclusive };
const char *verdict_name(Verdict v);

struct DiffReport {
  std::string program;
  Level level = Level::Baseline;
  Outcome original;
  Outcome transformed;
  std::uint64_t checks_original = 0;
  std::uint64_t checks_transformed = 0;
  Verdict verdict = Verdict::Inconclusive;
  std::string violation; // kind of the first divergence, empty when none
  std::string detail;
  TermPtr output;           // transformed program
  std::size_t steps = 0;    // normalization steps
  bool canonical = true;    // normalizer output passed the grammar check
  std::vector<std::string> warnings;
};

struct DiffOptions {
  std::uint64_t fuel = kDefaultFuel;
  TransformConfig transform;
  bool join = true; // subset level: join and condense after normalization
};

// Runs a program and its transformation, then classifies the pair. The
// baseline level demands identical outcomes; the subset level demands
// matching outcome classes and equal values. Both demand that the
// transformed program performs no more predicate checks.
DiffReport diff(const TermPtr &program, Level level, const ImplicationEnv &env,
                const DiffOptions &opt = {}, const std::string &id = "");

// Checks performed by one call: the program is transformed on its own,
// then applied to `arg` and run. Without `arg` the whole program is
// transformed and run.
struct CallCounts {
  Outcome original, baseline, subset;
};
CallCounts call_counts(const TermPtr &program, const TermPtr &arg, const ImplicationEnv &env,
                       std::uint64_t fuel = kDefaultFuel);

std::string describe(const Outcome &o);
std::string report_line(const DiffReport &r);

struct FuzzConfig {
  std::uint64_t seed = 42;
  int term_depth = 4;
  int contract_depth = 2;
  int label_budget = 4;
  std::size_t cases = 1000;
  Level level = Level::Baseline;
};

// Random closed programs over numbers, strings and functions. Predicates
// are comparisons over their argument, so every check terminates.
class ProgramGenerator {
public:
  ProgramGenerator(std::uint64_t seed, int term_depth, int contract_depth, int label_budget);
  TermPtr next();

private:
  struct Type;
  using TypeP = std::shared_ptr<const Type>;
  struct Binding {
    std::string name;
    TypeP type;
  };

  TypeP random_arg_type(int depth);
  TermPtr term(const TypeP &t, std::vector<Binding> &env, int depth);
  TermPtr leaf(const TypeP &t, std::vector<Binding> &env);
  ContractPtr contract(const TypeP &t, int depth, const std::string &dep_var);
  ContractPtr immediate(const TypeP &t, const std::string &dep_var);
  std::optional<TermPtr> pick_var(const TypeP &t, const std::vector<Binding> &env);
  bool chance(double p);
  int pick(int n);
  std::string fresh(const char *base);

  std::mt19937_64 rng_;
  int term_depth_, contract_depth_, label_budget_;
  int labels_left_ = 0;
  int names_ = 0;
  int label_seq_ = 0;
};

// Greedy shrinking: keeps any one-step simplification on which `fails`
// still holds, until none does.
TermPtr shrink(const TermPtr &t, const std::function<bool(const TermPtr &)> &fails,
               std::size_t max_rounds = 200);

struct FuzzFailure {
  std::size_t index;
  DiffReport report;
  TermPtr shrunk;
};

struct FuzzSummary {
  std::size_t cases = 0;
  std::size_t strong_ok = 0, weak_ok = 0, violations = 0, inconclusive = 0;
  std::size_t non_canonical = 0;
  std::size_t values = 0, blames = 0, stuck = 0;
  std::uint64_t checks_original = 0, checks_transformed = 0;
  std::size_t max_steps = 0;
  std::vector<FuzzFailure> failures;
};

FuzzSummary fuzz(const FuzzConfig &cfg, const ImplicationEnv &env, const DiffOptions &opt = {},
                 bool shrink_failures = true);

std::string summary_text(const FuzzSummary &s, const FuzzConfig &cfg);

} // namespace lcon
