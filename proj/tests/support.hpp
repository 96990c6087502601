// SPDX-License-Identifier: Apache-2.0
// Helpers shared by the unit tests and the acceptance driver.
#pragma once

#include "lcon/difftest.hpp"
#include "lcon/syntax.hpp"
#include "lcon/constraints.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

namespace lcon::testing {

inline std::string read_file(const std::string &path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_path(const std::string &name) {
  return std::string(LCON_CORPUS_DIR) + "/" + name + ".lcon";
}

inline TermPtr corpus(const std::string &name) {
  return parse(read_file(corpus_path(name)), name).term;
}

// Expected output of a corpus program at one level.
inline std::string golden(const std::string &name) {
  std::string s = read_file(std::string(LCON_GOLDEN_DIR) + "/" + name);
  while (!s.empty() && (s.back() == '\n' || s.back() == ' '))
    s.pop_back();
  return s;
}

// Printed form with binders renamed canonically and blame variables
// numbered by first appearance.
inline std::string canon(const TermPtr &t) {
  std::string s = print(alpha_normalize(t));
  static const std::regex var_re("@([0-9]+)");
  std::map<std::string, int> ids;
  std::string out;
  auto begin = std::sregex_iterator(s.begin(), s.end(), var_re);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    out += s.substr(last, it->position() - last);
    auto [pos, fresh] = ids.emplace(it->str(1), static_cast<int>(ids.size()) + 1);
    (void)fresh;
    out += "@" + std::to_string(pos->second);
    last = it->position() + it->length();
  }
  return out + s.substr(last);
}

inline std::string canon(const std::string &text) { return canon(parse_term(text)); }

// Solver oracle. Written from the satisfaction table directly, without
// the library's constraint_rhs.
struct Truth {
  bool s = true, c = true;
  bool operator==(const Truth &o) const { return s == o.s && c == o.c; }
};

inline Truth oracle_rhs(const Constraint &k, Truth a, Truth b) {
  using K = Constraint::Kind;
  switch (k.kind) {
  case K::Indirection:
    return a;
  case K::Outcome:
    return {make_truth(k.value), true};
  case K::Function:
    // subject: context of the domain, and domain subject implies range subject
    return {a.c && (!a.s || b.s), a.s && b.c};
  case K::Intersection:
    return {a.s && b.s, a.c || b.c};
  case K::Union:
    return {a.s || b.s, a.c && b.c};
  case K::Inversion:
    return {a.c, a.s};
  }
  return {};
}

struct OracleResult {
  bool found = false;
  std::map<BlameId, Truth> stratified; // leaves minimized first
  bool has_pointwise_least = false;
  std::map<BlameId, Truth> pointwise;
};

// Enumerates every map over the store's identifiers, keeps those that
// satisfy each constraint (lhs at least as false as the rhs), and picks
// the minimum. `order` lists identifiers children first; the stratified
// minimum compares them in that order, the pointwise one facet by facet.
inline OracleResult brute_force(const ConstraintStore &store, const std::vector<BlameId> &order) {
  const std::size_t n = order.size();
  std::map<BlameId, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i)
    index[order[i]] = i;
  auto facet = [](std::uint64_t m, std::size_t i) {
    // bit set = false
    return Truth{!((m >> (2 * i)) & 1), !((m >> (2 * i + 1)) & 1)};
  };
  auto sat = [&](std::uint64_t m) {
    for (const Constraint &k : store.constraints()) {
      Truth a = k.kind == Constraint::Kind::Outcome ? Truth{} : facet(m, index.at(BlameId::of_var(k.a)));
      bool two = k.kind == Constraint::Kind::Function || k.kind == Constraint::Kind::Intersection ||
                 k.kind == Constraint::Kind::Union;
      Truth b = two ? facet(m, index.at(BlameId::of_var(k.b))) : Truth{};
      Truth rhs = oracle_rhs(k, a, b);
      Truth lhs = facet(m, index.at(k.id));
      if ((!rhs.s && lhs.s) || (!rhs.c && lhs.c))
        return false;
    }
    return true;
  };
  std::vector<std::uint64_t> models;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << (2 * n)); ++m)
    if (sat(m))
      models.push_back(m);
  OracleResult r;
  if (models.empty())
    return r;
  r.found = true;
  // Children first means low index first: compare from bit 0 upwards.
  auto key = [&](std::uint64_t m) {
    std::uint64_t rev = 0;
    for (std::size_t i = 0; i < 2 * n; ++i)
      if ((m >> i) & 1)
        rev |= std::uint64_t{1} << (2 * n - 1 - i);
    return rev;
  };
  std::uint64_t best = *std::min_element(models.begin(), models.end(),
                                         [&](auto x, auto y) { return key(x) < key(y); });
  for (std::size_t i = 0; i < n; ++i)
    r.stratified[order[i]] = facet(best, i);
  for (std::uint64_t m : models) {
    if (std::all_of(models.begin(), models.end(), [&](std::uint64_t o) { return (m & ~o) == 0; })) {
      r.has_pointwise_least = true;
      for (std::size_t i = 0; i < n; ++i)
        r.pointwise[order[i]] = facet(m, i);
      break;
    }
  }
  return r;
}

// Exhaustive acyclic stores: identifier i is the label #r for i = 0 and
// @i otherwise, and children always have a larger index. Each identifier
// gets one defining shape or none.
struct StoreCase {
  ConstraintStore store;
  std::vector<BlameId> order; // children first
};

inline BlameId store_id(std::size_t i) {
  return i == 0 ? BlameId::of_label("r") : BlameId::of_var(static_cast<VarId>(i));
}

inline void enumerate_stores(std::size_t ids, const std::function<void(const StoreCase &)> &emit) {
  // Shapes per identifier: 0 none, 1 true, 2 false, then the linking kinds.
  struct Shape {
    int kind;
    std::size_t a = 0, b = 0;
  };
  std::vector<std::vector<Shape>> choices(ids);
  for (std::size_t i = 0; i < ids; ++i) {
    for (int k = 0; k < 3; ++k)
      choices[i].push_back({k});
    for (std::size_t a = i + 1; a < ids; ++a) {
      choices[i].push_back({3, a});
      choices[i].push_back({4, a});
      for (std::size_t b = i + 1; b < ids; ++b)
        if (b != a)
          for (int k = 5; k < 8; ++k)
            choices[i].push_back({k, a, b});
    }
  }
  std::vector<std::size_t> pick(ids, 0);
  for (;;) {
    StoreCase sc;
    for (std::size_t i = ids; i-- > 0;)
      sc.order.push_back(store_id(i));
    for (std::size_t i = ids; i-- > 0;) {
      const Shape &s = choices[i][pick[i]];
      BlameId id = store_id(i);
      VarId a = static_cast<VarId>(s.a), b = static_cast<VarId>(s.b);
      switch (s.kind) {
      case 1:
        sc.store.add(Constraint::truth(id, true));
        break;
      case 2:
        sc.store.add(Constraint::truth(id, false));
        break;
      case 3:
        sc.store.add(Constraint::indirection(id, a));
        break;
      case 4:
        sc.store.add(Constraint::inversion(id, a));
        break;
      case 5:
        sc.store.add(Constraint::function(id, a, b));
        break;
      case 6:
        sc.store.add(Constraint::intersection(id, a, b));
        break;
      case 7:
        sc.store.add(Constraint::union_(id, a, b));
        break;
      default:
        break;
      }
    }
    emit(sc);
    std::size_t i = 0;
    while (i < ids && ++pick[i] == choices[i].size())
      pick[i++] = 0;
    if (i == ids)
      return;
  }
}

// A random acyclic store over `ids` identifiers where each identifier has
// zero to two definitions.
inline StoreCase random_store(std::size_t ids, std::mt19937_64 &rng) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  StoreCase sc;
  for (std::size_t i = ids; i-- > 0;)
    sc.order.push_back(store_id(i));
  for (std::size_t i = ids; i-- > 0;) {
    std::size_t defs = pick(3);
    for (std::size_t d = 0; d < defs; ++d) {
      BlameId id = store_id(i);
      std::size_t above = ids - i - 1;
      int kind = above == 0 ? 1 + static_cast<int>(pick(2)) : 1 + static_cast<int>(pick(above >= 2 ? 7 : 4));
      auto child = [&] { return static_cast<VarId>(i + 1 + pick(above)); };
      switch (kind) {
      case 1:
        sc.store.add(Constraint::truth(id, true));
        break;
      case 2:
        sc.store.add(Constraint::truth(id, false));
        break;
      case 3:
        sc.store.add(Constraint::indirection(id, child()));
        break;
      case 4:
        sc.store.add(Constraint::inversion(id, child()));
        break;
      case 5:
        sc.store.add(Constraint::function(id, child(), child()));
        break;
      case 6:
        sc.store.add(Constraint::intersection(id, child(), child()));
        break;
      default:
        sc.store.add(Constraint::union_(id, child(), child()));
        break;
      }
    }
  }
  return sc;
}

// Compares solve with the oracle on every identifier. Identifiers the
// solver does not report count as true on both facets.
struct SolverCheck {
  bool agrees = true;
  bool pointwise_exists = false;
  bool pointwise_agrees = true;
};

inline SolverCheck check_solver(const StoreCase &sc) {
  SolverCheck out;
  Interpretation got = solve(sc.store);
  OracleResult want = brute_force(sc.store, sc.order);
  if (!want.found)
    return {false, false, false};
  auto value = [&](const BlameId &id) {
    auto it = got.find(id);
    return it == got.end() ? Truth{} : Truth{it->second.subject, it->second.context};
  };
  for (const BlameId &id : sc.order) {
    if (!(value(id) == want.stratified.at(id)))
      out.agrees = false;
    if (want.has_pointwise_least && !(value(id) == want.pointwise.at(id)))
      out.pointwise_agrees = false;
  }
  out.pointwise_exists = want.has_pointwise_least;
  return out;
}

// Random contracts over the named predicates, sized by depth.
class ContractGen {
public:
  explicit ContractGen(std::uint64_t seed) : rng_(seed) {}

  ContractPtr next(int depth) {
    int n = depth <= 0 ? 4 : 9;
    switch (pick(n)) {
    case 0:
    case 1:
      return named();
    case 2:
      return pick(2) ? mk::top() : named();
    case 3:
      return pick(4) ? named() : mk::bot();
    case 4:
    case 5:
      return mk::fun(next(depth - 1), next(depth - 1));
    case 6:
      return mk::cap(next(depth - 1), next(depth - 1));
    case 7:
      return mk::cup(next(depth - 1), next(depth - 1));
    default:
      return mk::fun(named(), next(depth - 1));
    }
  }

private:
  ContractPtr named() {
    static const NamedPred preds[] = {NamedPred::Number, NamedPred::String, NamedPred::Positive,
                                      NamedPred::Natural, NamedPred::Negative};
    return mk::named(preds[pick(5)]);
  }
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::mt19937_64 rng_;
};

// Check-count oracle: a big-step monitor that wraps functions in their
// contracts and counts every flat check. It never raises blame, so it is
// only meaningful for runs that end in a value. top and bot cost nothing.
class CheckCounter {
public:
  struct Val;
  using V = std::shared_ptr<const Val>;
  using Env = std::vector<std::pair<std::string, V>>;
  struct Val {
    std::optional<Constant> k;
    std::string param; // closures
    TermPtr body;
    Env env;
    V inner; // wrapped function
    ContractPtr contract;
    Env cenv; // environment of the contract, for dependent ranges
  };

  std::optional<std::uint64_t> count(const TermPtr &t) {
    checks_ = 0;
    fuel_ = 200000;
    try {
      eval(t, {});
    } catch (const Stop &) {
      return std::nullopt;
    }
    return checks_;
  }

private:
  struct Stop {};

  static V constant(Constant k) {
    auto v = std::make_shared<Val>();
    v->k = std::move(k);
    return v;
  }

  V lookup(const Env &env, const std::string &x) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == x)
        return it->second;
    throw Stop{};
  }

  V eval(const TermPtr &t, const Env &env) {
    if (--fuel_ == 0)
      throw Stop{};
    if (auto n = as<node::Const>(t))
      return constant(n->value);
    if (auto n = as<node::Var>(t))
      return lookup(env, n->name);
    if (auto n = as<node::Lam>(t)) {
      auto v = std::make_shared<Val>();
      v->param = n->param;
      v->body = n->body;
      v->env = env;
      return v;
    }
    if (auto n = as<node::App>(t)) {
      V f = eval(n->fn, env);
      return apply(f, eval(n->arg, env));
    }
    if (auto n = as<node::Prim>(t)) {
      std::vector<Constant> args;
      for (auto &a : n->args) {
        V v = eval(a, env);
        if (!v->k)
          throw Stop{};
        args.push_back(*v->k);
      }
      auto r = delta(n->op, args);
      if (!r)
        throw Stop{};
      return constant(*r);
    }
    if (auto n = as<node::If>(t)) {
      V c = eval(n->test, env);
      bool truth = !(c->k && std::holds_alternative<bool>(*c->k) && !std::get<bool>(*c->k));
      return eval(truth ? n->then_branch : n->else_branch, env);
    }
    if (auto n = as<node::Assert>(t))
      return monitor(n->contract, eval(n->subject, env), env);
    throw Stop{}; // blame, forks and checks do not occur in value runs
  }

  V apply(const V &f, const V &arg) {
    if (f->inner) {
      const ContractPtr &c = f->contract;
      if (auto fn = as<cnode::Fun>(c))
        return monitor(fn->rng, apply(f->inner, monitor(fn->dom, arg, f->cenv)), f->cenv);
      if (auto d = as<cnode::Dep>(c)) {
        Env e = f->cenv;
        e.emplace_back(d->param, arg);
        return monitor(d->body, apply(f->inner, arg), e);
      }
      throw Stop{};
    }
    if (f->k)
      throw Stop{};
    Env e = f->env;
    e.emplace_back(f->param, arg);
    return eval(f->body, e);
  }

  V wrap(const ContractPtr &c, const V &v, const Env &env) {
    auto w = std::make_shared<Val>();
    w->inner = v;
    w->contract = c;
    w->cenv = env;
    return w;
  }

  V monitor(const ContractPtr &c, const V &v, const Env &env) {
    if (as<cnode::Top>(c) || as<cnode::Bot>(c))
      return v;
    if (as<cnode::Named>(c) || as<cnode::Flat>(c)) {
      ++checks_;
      if (auto f = as<cnode::Flat>(c))
        apply(eval(f->pred, env), v);
      return v;
    }
    if (as<cnode::Fun>(c) || as<cnode::Dep>(c))
      return wrap(c, v, env);
    // Both operands of an intersection or union are monitored; the
    // context's choice only matters for blame.
    if (auto k = as<cnode::Cap>(c))
      return monitor(k->right, monitor(k->left, v, env), env);
    if (auto k = as<cnode::Cup>(c))
      return monitor(k->right, monitor(k->left, v, env), env);
    throw Stop{};
  }

  std::uint64_t checks_ = 0;
  std::uint64_t fuel_ = 0;
};

} // namespace lcon::testing
