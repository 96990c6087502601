// SPDX-License-Identifier: Apache-2.0
#include "lcon/constraints.hpp"

#include "lcon/syntax.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace lcon {

Constraint Constraint::indirection(BlameId id, VarId to) {
  return {Kind::Indirection, std::move(id), to, 0, nullptr};
}
Constraint Constraint::outcome(BlameId id, TermPtr value) {
  return {Kind::Outcome, std::move(id), 0, 0, std::move(value)};
}
Constraint Constraint::truth(BlameId id, bool t) {
  return outcome(std::move(id), mk::boolean(t));
}
Constraint Constraint::function(BlameId id, VarId dom, VarId rng) {
  return {Kind::Function, std::move(id), dom, rng, nullptr};
}
Constraint Constraint::intersection(BlameId id, VarId l, VarId r) {
  return {Kind::Intersection, std::move(id), l, r, nullptr};
}
Constraint Constraint::union_(BlameId id, VarId l, VarId r) {
  return {Kind::Union, std::move(id), l, r, nullptr};
}
Constraint Constraint::inversion(BlameId id, VarId a) {
  return {Kind::Inversion, std::move(id), a, 0, nullptr};
}

bool make_truth(const TermPtr &v) {
  auto k = as<node::Const>(unwrap(v));
  if (!k)
    return true;
  auto b = std::get_if<bool>(&k->value);
  return !(b && !*b);
}

void ConstraintStore::add(Constraint c) {
  if (!c.id.is_label())
    reserve_vars(c.id.var);
  reserve_vars(c.a);
  reserve_vars(c.b);
  items_.push_back(std::move(c));
}

DanglingVariable::DanglingVariable(const BlameId &id)
    : std::runtime_error("dangling blame identifier " + to_string(id)) {}

OrphanVariable::OrphanVariable(const BlameId &id)
    : std::runtime_error("blame identifier " + to_string(id) +
                         " has no parent chain to a label") {}

Facets constraint_rhs(const Constraint &c, const Facets &a, const Facets &b) {
  switch (c.kind) {
  case Constraint::Kind::Indirection:
    return a;
  case Constraint::Kind::Outcome:
    return {make_truth(c.value), true};
  case Constraint::Kind::Function:
    return {a.context && (!a.subject || b.subject), a.subject && b.context};
  case Constraint::Kind::Intersection:
    return {a.subject && b.subject, a.context || b.context};
  case Constraint::Kind::Union:
    return {a.subject || b.subject, a.context && b.context};
  case Constraint::Kind::Inversion:
    return {a.context, a.subject};
  }
  return {};
}

namespace {

bool has_rhs_b(Constraint::Kind k) {
  return k == Constraint::Kind::Function || k == Constraint::Kind::Intersection ||
         k == Constraint::Kind::Union;
}

bool has_rhs_a(Constraint::Kind k) { return k != Constraint::Kind::Outcome; }

class Solver {
public:
  Solver(const ConstraintStore &store, bool strict) : store_(store), strict_(strict) {
    const auto &cs = store.constraints();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (cs[i].id.is_label())
        label_defs_[cs[i].id.label].push_back(i);
      else
        var_defs_[cs[i].id.var].push_back(i);
    }
  }

  Facets of(const BlameId &id) {
    if (id.is_label()) {
      auto it = label_defs_.find(id.label);
      if (it == label_defs_.end())
        return {};
      return combine(it->second);
    }
    return var(id.var);
  }

  Facets var(VarId v) {
    auto memo = memo_.find(v);
    if (memo != memo_.end())
      return memo->second;
    auto it = var_defs_.find(v);
    if (it == var_defs_.end()) {
      if (strict_)
        throw DanglingVariable(BlameId::of_var(v));
      return {};
    }
    if (!active_.insert(v).second)
      return {};
    Facets f = combine(it->second);
    active_.erase(v);
    memo_[v] = f;
    return f;
  }

  const std::unordered_map<std::string, std::vector<std::size_t>> &labels() const {
    return label_defs_;
  }
  const std::unordered_map<VarId, std::vector<std::size_t>> &vars() const {
    return var_defs_;
  }

private:
  Facets combine(const std::vector<std::size_t> &defs) {
    Facets f;
    for (auto i : defs) {
      const Constraint &c = store_.constraints()[i];
      Facets a = has_rhs_a(c.kind) ? var(c.a) : Facets{};
      Facets b = has_rhs_b(c.kind) ? var(c.b) : Facets{};
      Facets r = constraint_rhs(c, a, b);
      f.subject = f.subject && r.subject;
      f.context = f.context && r.context;
    }
    return f;
  }

  const ConstraintStore &store_;
  bool strict_;
  std::unordered_map<std::string, std::vector<std::size_t>> label_defs_;
  std::unordered_map<VarId, std::vector<std::size_t>> var_defs_;
  std::unordered_map<VarId, Facets> memo_;
  std::set<VarId> active_;
};

} // namespace

Interpretation solve(const ConstraintStore &store, bool strict) {
  Solver s(store, strict);
  Interpretation out;
  for (const auto &c : store.constraints()) {
    out[c.id] = s.of(c.id);
    if (has_rhs_a(c.kind))
      out[BlameId::of_var(c.a)] = s.var(c.a);
    if (has_rhs_b(c.kind))
      out[BlameId::of_var(c.b)] = s.var(c.b);
  }
  return out;
}

std::optional<BlameVerdict> blame_state(const ConstraintStore &store) {
  Solver s(store, false);
  // Labels in the order of their oldest defining constraint.
  std::vector<std::pair<std::size_t, std::string>> order;
  for (auto &[label, defs] : s.labels())
    order.emplace_back(defs.front(), label);
  std::sort(order.begin(), order.end());
  for (auto &[idx, label] : order) {
    Facets f = s.of(BlameId::of_label(label));
    if (!f.subject)
      return BlameVerdict{label, Polarity::Positive};
    if (!f.context)
      return BlameVerdict{label, Polarity::Negative};
  }
  return std::nullopt;
}

namespace {

// The oldest constraint mentioning `v` on its right-hand side.
const Constraint *parent_of(VarId v, const ConstraintStore &store) {
  for (const auto &c : store.constraints()) {
    if ((has_rhs_a(c.kind) && c.a == v) || (has_rhs_b(c.kind) && c.b == v))
      return &c;
  }
  return nullptr;
}

std::pair<BlameId, Polarity> walk(const BlameId &start, const ConstraintStore &store) {
  BlameId cur = start;
  Polarity p = Polarity::Positive;
  std::set<VarId> seen;
  while (!cur.is_label()) {
    if (!seen.insert(cur.var).second)
      throw OrphanVariable(start);
    const Constraint *c = parent_of(cur.var, store);
    if (!c)
      throw OrphanVariable(start);
    if ((c->kind == Constraint::Kind::Function && c->a == cur.var) ||
        c->kind == Constraint::Kind::Inversion)
      p = invert(p);
    cur = c->id;
  }
  return {cur, p};
}

} // namespace

BlameId root_of(const BlameId &b, const ConstraintStore &store) {
  return walk(b, store).first;
}

Polarity sign_of(const BlameId &b, const ConstraintStore &store) {
  return walk(b, store).second;
}

BlameVerdict blame_verdict_of(const BlameId &b, const ConstraintStore &store) {
  auto [root, p] = walk(b, store);
  return {root.label, p};
}

TermPtr blame_of(const BlameId &b, const ConstraintStore &store) {
  auto v = blame_verdict_of(b, store);
  return mk::blame(v.label, v.polarity);
}

std::string print_constraint(const Constraint &c) {
  std::string lhs = to_string(c.id) + " <- ";
  auto v = [](VarId x) { return "@" + std::to_string(x); };
  switch (c.kind) {
  case Constraint::Kind::Indirection:
    return lhs + v(c.a);
  case Constraint::Kind::Outcome:
    return lhs + print(c.value);
  case Constraint::Kind::Function:
    return lhs + v(c.a) + " -> " + v(c.b);
  case Constraint::Kind::Intersection:
    return lhs + v(c.a) + " cap " + v(c.b);
  case Constraint::Kind::Union:
    return lhs + v(c.a) + " cup " + v(c.b);
  case Constraint::Kind::Inversion:
    return lhs + "not " + v(c.a);
  }
  return lhs;
}

std::string dump(const ConstraintStore &store) {
  std::string out;
  for (const auto &c : store.constraints())
    out += print_constraint(c) + "\n";
  return out;
}

} // namespace lcon
