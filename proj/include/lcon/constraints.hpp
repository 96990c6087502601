// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lcon/ast.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcon {

struct Constraint {
  enum class Kind : std::uint8_t {
    Indirection,  // id <- a
    Outcome,      // id <- W
    Function,     // id <- a -> b
    Intersection, // id <- a cap b
    Union,        // id <- a cup b
    Inversion     // id <- not a
  };
  Kind kind;
  BlameId id;
  VarId a = 0, b = 0;
  TermPtr value; // Outcome only

  static Constraint indirection(BlameId id, VarId to);
  static Constraint outcome(BlameId id, TermPtr value);
  static Constraint truth(BlameId id, bool t);
  static Constraint function(BlameId id, VarId dom, VarId rng);
  static Constraint intersection(BlameId id, VarId l, VarId r);
  static Constraint union_(BlameId id, VarId l, VarId r);
  static Constraint inversion(BlameId id, VarId a);
};

bool make_truth(const TermPtr &v);

class ConstraintStore {
public:
  VarId fresh_var() { return next_++; }
  VarId next_var() const { return next_; }
  void reserve_vars(VarId upto) {
    if (upto >= next_)
      next_ = upto + 1;
  }

  void add(Constraint c);
  const std::vector<Constraint> &constraints() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

private:
  std::vector<Constraint> items_;
  VarId next_ = 1;
};

struct Facets {
  bool subject = true;
  bool context = true;
  bool operator==(const Facets &o) const {
    return subject == o.subject && context == o.context;
  }
};

using Interpretation = std::map<BlameId, Facets>;

class DanglingVariable : public std::runtime_error {
public:
  explicit DanglingVariable(const BlameId &id);
};

class OrphanVariable : public std::runtime_error {
public:
  explicit OrphanVariable(const BlameId &id);
};

// Truth facets of one constraint's right-hand side given the children's
// facets. Shared by the solver and by independent checkers.
Facets constraint_rhs(const Constraint &c, const Facets &a, const Facets &b);

// Each identifier's facets are the conjunction of the right-hand sides of
// all constraints defining it, evaluated children first. Identifiers that
// are referenced but never defined are true (or rejected when strict).
Interpretation solve(const ConstraintStore &store, bool strict = false);

struct BlameVerdict {
  std::string label;
  Polarity polarity;
  bool operator==(const BlameVerdict &o) const {
    return label == o.label && polarity == o.polarity;
  }
};

std::optional<BlameVerdict> blame_state(const ConstraintStore &store);

BlameId root_of(const BlameId &b, const ConstraintStore &store);
Polarity sign_of(const BlameId &b, const ConstraintStore &store);
TermPtr blame_of(const BlameId &b, const ConstraintStore &store);
BlameVerdict blame_verdict_of(const BlameId &b, const ConstraintStore &store);

std::string print_constraint(const Constraint &c);
std::string dump(const ConstraintStore &store);

} // namespace lcon
