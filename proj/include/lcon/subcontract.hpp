// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lcon/ast.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>

namespace lcon {

// Predicate-implication facts. Keys are named predicates or the printed
// alpha-normal form of a raw predicate term.
class ImplicationEnv {
public:
  static ImplicationEnv defaults();
  static ImplicationEnv empty() { return {}; }
  // One fact per line, "LHS <= RHS"; each side is a named predicate or a
  // quoted predicate term. Blank lines and ';' comments are skipped.
  static ImplicationEnv parse(const std::string &text);
  static ImplicationEnv load(const std::string &path);

  void add(std::string lhs, std::string rhs);
  bool contains(const std::string &lhs, const std::string &rhs) const;
  const std::set<std::pair<std::string, std::string>> &facts() const {
    return facts_;
  }

private:
  std::set<std::pair<std::string, std::string>> facts_;
};

// Key of a flat or named-flat contract; empty for other contracts.
std::string predicate_key(const ContractPtr &c);

bool pred_implies(const ImplicationEnv &env, const std::string &m,
                  const std::string &n);

// The two subcontracting judgments with a memo table that lives as long
// as the object.
class Subcontract {
public:
  explicit Subcontract(const ImplicationEnv &env, bool memoize = true)
      : env_(env), memoize_(memoize) {}

  bool subject(const ContractPtr &c, const ContractPtr &d);
  bool context(const ContractPtr &c, const ContractPtr &d);
  bool naive(const ContractPtr &c, const ContractPtr &d) {
    return context(c, d) && subject(c, d);
  }
  bool ordinary(const ContractPtr &c, const ContractPtr &d) {
    return context(d, c) && subject(c, d);
  }

private:
  bool subject_rules(const ContractPtr &c, const ContractPtr &d);
  bool context_rules(const ContractPtr &c, const ContractPtr &d);

  const ImplicationEnv &env_;
  bool memoize_;
  std::map<std::pair<const Contract *, const Contract *>, bool> subject_memo_,
      context_memo_;
  // Keeps memo keys alive so their addresses are never reused.
  std::set<ContractPtr> pinned_;
};

bool subject_sub(const ImplicationEnv &env, const ContractPtr &c, const ContractPtr &d);
bool context_sub(const ImplicationEnv &env, const ContractPtr &c, const ContractPtr &d);
bool naive_sub(const ImplicationEnv &env, const ContractPtr &c, const ContractPtr &d);
bool ordinary_sub(const ImplicationEnv &env, const ContractPtr &c, const ContractPtr &d);

} // namespace lcon
