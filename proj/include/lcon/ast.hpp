// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace lcon {

struct Term;
struct Contract;
using TermPtr = std::shared_ptr<const Term>;
using ContractPtr = std::shared_ptr<const Contract>;

enum class Polarity : std::uint8_t { Positive, Negative };

inline Polarity invert(Polarity p) {
  return p == Polarity::Positive ? Polarity::Negative : Polarity::Positive;
}

using VarId = std::uint32_t;

// A source label (#name) or a generated blame variable (@n).
struct BlameId {
  enum class Kind : std::uint8_t { Label, Var };
  Kind kind = Kind::Var;
  std::string label;
  VarId var = 0;

  static BlameId of_label(std::string name) {
    return BlameId{Kind::Label, std::move(name), 0};
  }
  static BlameId of_var(VarId v) { return BlameId{Kind::Var, {}, v}; }

  bool is_label() const { return kind == Kind::Label; }
  bool operator==(const BlameId &o) const {
    return kind == o.kind && label == o.label && var == o.var;
  }
  bool operator<(const BlameId &o) const {
    if (kind != o.kind)
      return kind < o.kind;
    return is_label() ? label < o.label : var < o.var;
  }
};

std::string to_string(const BlameId &b);

using Constant = std::variant<bool, std::int64_t, std::string>;

enum class OpKind : std::uint8_t { Add, Sub, Mul, Eq, Lt, Gt, Le, Ge };
enum class NamedPred : std::uint8_t { Number, String, Positive, Natural, Negative };

const char *op_name(OpKind op);
const char *pred_name(NamedPred p);
std::optional<OpKind> op_from_name(const std::string &s);
std::optional<NamedPred> pred_from_name(const std::string &s);

namespace node {
struct Const {
  Constant value;
};
struct Var {
  std::string name;
};
struct Lam {
  std::string param;
  TermPtr body;
};
struct App {
  TermPtr fn, arg;
};
struct Prim {
  OpKind op;
  std::vector<TermPtr> args;
};
struct If {
  TermPtr test, then_branch, else_branch;
};
// Exactly one of label / var is set.
struct Assert {
  TermPtr subject;
  std::optional<std::string> label;
  std::optional<VarId> var;
  ContractPtr contract;
};
// A flat predicate under evaluation: (check V @n M).
struct Check {
  TermPtr value;
  VarId var;
  TermPtr pred;
};
struct Blame {
  std::string label;
  Polarity polarity;
  // Term this blame replaced during simplification, if any. Not part of
  // the term's identity; the join uses it to put false contracts back in
  // place.
  TermPtr origin = nullptr;
};
struct Fork {
  TermPtr left, right;
};
} // namespace node

struct Term {
  std::variant<node::Const, node::Var, node::Lam, node::App, node::Prim,
               node::If, node::Assert, node::Check, node::Blame, node::Fork>
      v;
};

namespace cnode {
struct Flat {
  TermPtr pred;
};
struct Named {
  NamedPred pred;
};
struct Fun {
  ContractPtr dom, rng;
};
struct Dep {
  std::string param;
  ContractPtr body;
};
struct Cap {
  ContractPtr left, right;
};
struct Cup {
  ContractPtr left, right;
};
struct Top {};
struct Bot {};
} // namespace cnode

struct Contract {
  std::variant<cnode::Flat, cnode::Named, cnode::Fun, cnode::Dep, cnode::Cap,
               cnode::Cup, cnode::Top, cnode::Bot>
      v;
};

template <class N> const N *as(const TermPtr &t) {
  return std::get_if<N>(&t->v);
}
template <class N> const N *as(const ContractPtr &c) {
  return std::get_if<N>(&c->v);
}

namespace mk {
TermPtr constant(Constant k);
TermPtr num(std::int64_t n);
TermPtr boolean(bool b);
TermPtr str(std::string s);
TermPtr var(std::string name);
TermPtr lam(std::string param, TermPtr body);
TermPtr app(TermPtr fn, TermPtr arg);
TermPtr prim(OpKind op, TermPtr a, TermPtr b);
TermPtr prim(OpKind op, std::vector<TermPtr> args);
TermPtr if_(TermPtr test, TermPtr then_branch, TermPtr else_branch);
TermPtr assert_label(TermPtr subject, std::string label, ContractPtr c);
TermPtr assert_var(TermPtr subject, VarId var, ContractPtr c);
TermPtr check(TermPtr value, VarId var, TermPtr pred);
TermPtr blame(std::string label, Polarity p, TermPtr origin = nullptr);
TermPtr fork(TermPtr left, TermPtr right);

ContractPtr flat(TermPtr pred);
ContractPtr named(NamedPred p);
ContractPtr fun(ContractPtr dom, ContractPtr rng);
ContractPtr dep(std::string param, ContractPtr body);
ContractPtr cap(ContractPtr l, ContractPtr r);
ContractPtr cup(ContractPtr l, ContractPtr r);
ContractPtr top();
ContractPtr bot();
} // namespace mk

// Classification.
bool is_immediate(const ContractPtr &c);
bool is_delayed(const ContractPtr &c);
bool is_value(const TermPtr &t);
// A value wrapped in at least one delayed assertion.
bool is_wrapped_value(const TermPtr &t);
TermPtr unwrap(const TermPtr &v);

// Variables and substitution.
std::set<std::string> free_vars(const TermPtr &t);
std::set<std::string> free_vars(const ContractPtr &c);
std::string fresh_name(const std::string &base, const std::set<std::string> &avoid);
TermPtr substitute(const TermPtr &body, const std::string &x, const TermPtr &repl);
ContractPtr substitute(const ContractPtr &c, const std::string &x,
                       const TermPtr &repl);

bool alpha_equal(const TermPtr &a, const TermPtr &b);
bool alpha_equal(const ContractPtr &a, const ContractPtr &b);

// Renames every binder to a canonical name (_0, _1, ... by depth).
TermPtr alpha_normalize(const TermPtr &t);
ContractPtr alpha_normalize(const ContractPtr &c);

// Drops every assertion and predicate check, keeping subjects.
TermPtr erase_contracts(const TermPtr &t);

// Distributes unions and immediates out of intersections, recursively.
ContractPtr normalize_intersections(const ContractPtr &c);

// Structural queries used by validators and tests.
bool contains_fork(const TermPtr &t);
bool is_source_term(const TermPtr &t);
bool is_source_contract(const ContractPtr &c);
void collect_labels(const TermPtr &t, std::vector<std::string> &out);
std::size_t term_size(const TermPtr &t);

} // namespace lcon
