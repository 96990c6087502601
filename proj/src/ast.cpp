// SPDX-License-Identifier: Apache-2.0
#include "lcon/ast.hpp"

#include <cassert>
#include <map>

namespace lcon {

std::string to_string(const BlameId &b) {
  return b.is_label() ? "#" + b.label : "@" + std::to_string(b.var);
}

namespace {
constexpr const char *kOpNames[] = {"+", "-", "*", "=", "<", ">", "<=", ">="};
constexpr const char *kPredNames[] = {"Number?", "String?", "Positive?",
                                      "Natural?", "Negative?"};
} // namespace

const char *op_name(OpKind op) { return kOpNames[static_cast<int>(op)]; }
const char *pred_name(NamedPred p) { return kPredNames[static_cast<int>(p)]; }

std::optional<OpKind> op_from_name(const std::string &s) {
  for (int i = 0; i < 8; ++i)
    if (s == kOpNames[i])
      return static_cast<OpKind>(i);
  return std::nullopt;
}

std::optional<NamedPred> pred_from_name(const std::string &s) {
  for (int i = 0; i < 5; ++i)
    if (s == kPredNames[i])
      return static_cast<NamedPred>(i);
  return std::nullopt;
}

namespace mk {
namespace {
template <class N> TermPtr term(N n) {
  return std::make_shared<const Term>(Term{std::move(n)});
}
template <class N> ContractPtr contract(N n) {
  return std::make_shared<const Contract>(Contract{std::move(n)});
}
} // namespace

TermPtr constant(Constant k) { return term(node::Const{std::move(k)}); }
TermPtr num(std::int64_t n) { return constant(n); }
TermPtr boolean(bool b) { return constant(b); }
TermPtr str(std::string s) { return constant(std::move(s)); }
TermPtr var(std::string name) { return term(node::Var{std::move(name)}); }
TermPtr lam(std::string param, TermPtr body) {
  return term(node::Lam{std::move(param), std::move(body)});
}
TermPtr app(TermPtr fn, TermPtr arg) {
  return term(node::App{std::move(fn), std::move(arg)});
}
TermPtr prim(OpKind op, TermPtr a, TermPtr b) {
  return term(node::Prim{op, {std::move(a), std::move(b)}});
}
TermPtr prim(OpKind op, std::vector<TermPtr> args) {
  return term(node::Prim{op, std::move(args)});
}
TermPtr if_(TermPtr test, TermPtr then_branch, TermPtr else_branch) {
  return term(node::If{std::move(test), std::move(then_branch),
                       std::move(else_branch)});
}
TermPtr assert_label(TermPtr subject, std::string label, ContractPtr c) {
  return term(node::Assert{std::move(subject), std::move(label), std::nullopt,
                           std::move(c)});
}
TermPtr assert_var(TermPtr subject, VarId var, ContractPtr c) {
  return term(
      node::Assert{std::move(subject), std::nullopt, var, std::move(c)});
}
TermPtr check(TermPtr value, VarId var, TermPtr pred) {
  return term(node::Check{std::move(value), var, std::move(pred)});
}
TermPtr blame(std::string label, Polarity p, TermPtr origin) {
  return term(node::Blame{std::move(label), p, std::move(origin)});
}
TermPtr fork(TermPtr left, TermPtr right) {
  return term(node::Fork{std::move(left), std::move(right)});
}

ContractPtr flat(TermPtr pred) { return contract(cnode::Flat{std::move(pred)}); }
ContractPtr named(NamedPred p) { return contract(cnode::Named{p}); }
ContractPtr fun(ContractPtr dom, ContractPtr rng) {
  return contract(cnode::Fun{std::move(dom), std::move(rng)});
}
ContractPtr dep(std::string param, ContractPtr body) {
  return contract(cnode::Dep{std::move(param), std::move(body)});
}
ContractPtr cap(ContractPtr l, ContractPtr r) {
  return contract(cnode::Cap{std::move(l), std::move(r)});
}
ContractPtr cup(ContractPtr l, ContractPtr r) {
  return contract(cnode::Cup{std::move(l), std::move(r)});
}
ContractPtr top() {
  static const ContractPtr t = contract(cnode::Top{});
  return t;
}
ContractPtr bot() {
  static const ContractPtr b = contract(cnode::Bot{});
  return b;
}
} // namespace mk

bool is_immediate(const ContractPtr &c) {
  return as<cnode::Flat>(c) || as<cnode::Named>(c) || as<cnode::Top>(c) ||
         as<cnode::Bot>(c);
}

bool is_delayed(const ContractPtr &c) {
  if (as<cnode::Fun>(c) || as<cnode::Dep>(c))
    return true;
  if (auto k = as<cnode::Cap>(c))
    return is_delayed(k->left) && is_delayed(k->right);
  return false;
}

bool is_value(const TermPtr &t) {
  const Term *cur = t.get();
  for (;;) {
    if (std::holds_alternative<node::Const>(cur->v) ||
        std::holds_alternative<node::Lam>(cur->v))
      return true;
    auto a = std::get_if<node::Assert>(&cur->v);
    if (!a || !a->var || !is_delayed(a->contract))
      return false;
    cur = a->subject.get();
  }
}

bool is_wrapped_value(const TermPtr &t) {
  return as<node::Assert>(t) && is_value(t);
}

TermPtr unwrap(const TermPtr &v) {
  TermPtr cur = v;
  while (auto a = as<node::Assert>(cur)) {
    assert(is_delayed(a->contract));
    cur = a->subject;
  }
  return cur;
}

namespace {

void fv(const TermPtr &t, std::set<std::string> &bound,
        std::set<std::string> &out);

void fv(const ContractPtr &c, std::set<std::string> &bound,
        std::set<std::string> &out) {
  std::visit(
      [&](const auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, cnode::Flat>) {
          fv(n.pred, bound, out);
        } else if constexpr (std::is_same_v<N, cnode::Fun>) {
          fv(n.dom, bound, out);
          fv(n.rng, bound, out);
        } else if constexpr (std::is_same_v<N, cnode::Dep>) {
          bool fresh = bound.insert(n.param).second;
          fv(n.body, bound, out);
          if (fresh)
            bound.erase(n.param);
        } else if constexpr (std::is_same_v<N, cnode::Cap> ||
                             std::is_same_v<N, cnode::Cup>) {
          fv(n.left, bound, out);
          fv(n.right, bound, out);
        }
      },
      c->v);
}

void fv(const TermPtr &t, std::set<std::string> &bound,
        std::set<std::string> &out) {
  std::visit(
      [&](const auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Var>) {
          if (!bound.count(n.name))
            out.insert(n.name);
        } else if constexpr (std::is_same_v<N, node::Lam>) {
          bool fresh = bound.insert(n.param).second;
          fv(n.body, bound, out);
          if (fresh)
            bound.erase(n.param);
        } else if constexpr (std::is_same_v<N, node::App>) {
          fv(n.fn, bound, out);
          fv(n.arg, bound, out);
        } else if constexpr (std::is_same_v<N, node::Prim>) {
          for (auto &a : n.args)
            fv(a, bound, out);
        } else if constexpr (std::is_same_v<N, node::If>) {
          fv(n.test, bound, out);
          fv(n.then_branch, bound, out);
          fv(n.else_branch, bound, out);
        } else if constexpr (std::is_same_v<N, node::Assert>) {
          fv(n.subject, bound, out);
          fv(n.contract, bound, out);
        } else if constexpr (std::is_same_v<N, node::Check>) {
          fv(n.value, bound, out);
          fv(n.pred, bound, out);
        } else if constexpr (std::is_same_v<N, node::Fork>) {
          fv(n.left, bound, out);
          fv(n.right, bound, out);
        }
      },
      t->v);
}

} // namespace

std::set<std::string> free_vars(const TermPtr &t) {
  std::set<std::string> bound, out;
  fv(t, bound, out);
  return out;
}

std::set<std::string> free_vars(const ContractPtr &c) {
  std::set<std::string> bound, out;
  fv(c, bound, out);
  return out;
}

std::string fresh_name(const std::string &base, const std::set<std::string> &avoid) {
  std::string stem = base;
  if (auto pos = stem.rfind('_'); pos != std::string::npos && pos + 1 < stem.size() &&
                                  stem.find_first_not_of("0123456789", pos + 1) ==
                                      std::string::npos)
    stem = stem.substr(0, pos);
  for (unsigned i = 1;; ++i) {
    std::string cand = stem + "_" + std::to_string(i);
    if (!avoid.count(cand))
      return cand;
  }
}

namespace {

struct Subst {
  const std::string &x;
  const TermPtr &repl;
  const std::set<std::string> &repl_fv;

  // Returns the binder to use and the body with the binder renamed if needed.
  template <class Body>
  std::pair<std::string, Body> open(const std::string &param, const Body &body) {
    if (!repl_fv.count(param))
      return {param, body};
    std::set<std::string> avoid = free_vars(body);
    avoid.insert(repl_fv.begin(), repl_fv.end());
    avoid.insert(x);
    std::string fresh = fresh_name(param, avoid);
    return {fresh, substitute(body, param, mk::var(fresh))};
  }

  ContractPtr go(const ContractPtr &c) {
    return std::visit(
        [&](const auto &n) -> ContractPtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, cnode::Flat>) {
            auto p = go(n.pred);
            return p == n.pred ? c : mk::flat(p);
          } else if constexpr (std::is_same_v<N, cnode::Fun>) {
            auto d = go(n.dom), r = go(n.rng);
            return d == n.dom && r == n.rng ? c : mk::fun(d, r);
          } else if constexpr (std::is_same_v<N, cnode::Dep>) {
            if (n.param == x)
              return c;
            auto [p, body] = open(n.param, n.body);
            auto b = go(body);
            return b == n.body && p == n.param ? c : mk::dep(p, b);
          } else if constexpr (std::is_same_v<N, cnode::Cap>) {
            auto l = go(n.left), r = go(n.right);
            return l == n.left && r == n.right ? c : mk::cap(l, r);
          } else if constexpr (std::is_same_v<N, cnode::Cup>) {
            auto l = go(n.left), r = go(n.right);
            return l == n.left && r == n.right ? c : mk::cup(l, r);
          } else {
            return c;
          }
        },
        c->v);
  }

  TermPtr go(const TermPtr &t) {
    return std::visit(
        [&](const auto &n) -> TermPtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, node::Var>) {
            return n.name == x ? repl : t;
          } else if constexpr (std::is_same_v<N, node::Lam>) {
            if (n.param == x)
              return t;
            auto [p, body] = open(n.param, n.body);
            auto b = go(body);
            return b == n.body && p == n.param ? t : mk::lam(p, b);
          } else if constexpr (std::is_same_v<N, node::App>) {
            auto f = go(n.fn), a = go(n.arg);
            return f == n.fn && a == n.arg ? t : mk::app(f, a);
          } else if constexpr (std::is_same_v<N, node::Prim>) {
            std::vector<TermPtr> args;
            bool same = true;
            for (auto &a : n.args) {
              args.push_back(go(a));
              same = same && args.back() == a;
            }
            return same ? t : mk::prim(n.op, std::move(args));
          } else if constexpr (std::is_same_v<N, node::If>) {
            auto c = go(n.test), a = go(n.then_branch), b = go(n.else_branch);
            return c == n.test && a == n.then_branch && b == n.else_branch
                       ? t
                       : mk::if_(c, a, b);
          } else if constexpr (std::is_same_v<N, node::Assert>) {
            auto s = go(n.subject);
            auto c = go(n.contract);
            if (s == n.subject && c == n.contract)
              return t;
            return n.label ? mk::assert_label(s, *n.label, c)
                           : mk::assert_var(s, *n.var, c);
          } else if constexpr (std::is_same_v<N, node::Check>) {
            auto v = go(n.value), p = go(n.pred);
            return v == n.value && p == n.pred ? t : mk::check(v, n.var, p);
          } else if constexpr (std::is_same_v<N, node::Fork>) {
            auto l = go(n.left), r = go(n.right);
            return l == n.left && r == n.right ? t : mk::fork(l, r);
          } else {
            return t;
          }
        },
        t->v);
  }
};

} // namespace

TermPtr substitute(const TermPtr &body, const std::string &x, const TermPtr &repl) {
  auto rfv = free_vars(repl);
  Subst s{x, repl, rfv};
  return s.go(body);
}

ContractPtr substitute(const ContractPtr &c, const std::string &x,
                       const TermPtr &repl) {
  auto rfv = free_vars(repl);
  Subst s{x, repl, rfv};
  return s.go(c);
}

namespace {

using Env = std::vector<std::pair<std::string, std::string>>;

bool same_var(const Env &env, const std::string &a, const std::string &b) {
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    bool ma = it->first == a, mb = it->second == b;
    if (ma || mb)
      return ma && mb;
  }
  return a == b;
}

bool aeq(const ContractPtr &a, const ContractPtr &b, Env &env);

bool aeq(const TermPtr &a, const TermPtr &b, Env &env) {
  if (a == b && env.empty())
    return true;
  if (a->v.index() != b->v.index())
    return false;
  return std::visit(
      [&](const auto &n) -> bool {
        using N = std::decay_t<decltype(n)>;
        const N &m = std::get<N>(b->v);
        if constexpr (std::is_same_v<N, node::Const>) {
          return n.value == m.value;
        } else if constexpr (std::is_same_v<N, node::Var>) {
          return same_var(env, n.name, m.name);
        } else if constexpr (std::is_same_v<N, node::Lam>) {
          env.emplace_back(n.param, m.param);
          bool r = aeq(n.body, m.body, env);
          env.pop_back();
          return r;
        } else if constexpr (std::is_same_v<N, node::App>) {
          return aeq(n.fn, m.fn, env) && aeq(n.arg, m.arg, env);
        } else if constexpr (std::is_same_v<N, node::Prim>) {
          if (n.op != m.op || n.args.size() != m.args.size())
            return false;
          for (std::size_t i = 0; i < n.args.size(); ++i)
            if (!aeq(n.args[i], m.args[i], env))
              return false;
          return true;
        } else if constexpr (std::is_same_v<N, node::If>) {
          return aeq(n.test, m.test, env) &&
                 aeq(n.then_branch, m.then_branch, env) &&
                 aeq(n.else_branch, m.else_branch, env);
        } else if constexpr (std::is_same_v<N, node::Assert>) {
          return n.label == m.label && n.var == m.var &&
                 aeq(n.subject, m.subject, env) &&
                 aeq(n.contract, m.contract, env);
        } else if constexpr (std::is_same_v<N, node::Check>) {
          return n.var == m.var && aeq(n.value, m.value, env) &&
                 aeq(n.pred, m.pred, env);
        } else if constexpr (std::is_same_v<N, node::Blame>) {
          return n.label == m.label && n.polarity == m.polarity;
        } else {
          return aeq(n.left, m.left, env) && aeq(n.right, m.right, env);
        }
      },
      a->v);
}

bool aeq(const ContractPtr &a, const ContractPtr &b, Env &env) {
  if (a == b && env.empty())
    return true;
  if (a->v.index() != b->v.index())
    return false;
  return std::visit(
      [&](const auto &n) -> bool {
        using N = std::decay_t<decltype(n)>;
        const N &m = std::get<N>(b->v);
        if constexpr (std::is_same_v<N, cnode::Flat>) {
          return aeq(n.pred, m.pred, env);
        } else if constexpr (std::is_same_v<N, cnode::Named>) {
          return n.pred == m.pred;
        } else if constexpr (std::is_same_v<N, cnode::Fun>) {
          return aeq(n.dom, m.dom, env) && aeq(n.rng, m.rng, env);
        } else if constexpr (std::is_same_v<N, cnode::Dep>) {
          env.emplace_back(n.param, m.param);
          bool r = aeq(n.body, m.body, env);
          env.pop_back();
          return r;
        } else if constexpr (std::is_same_v<N, cnode::Cap> ||
                             std::is_same_v<N, cnode::Cup>) {
          return aeq(n.left, m.left, env) && aeq(n.right, m.right, env);
        } else {
          return true;
        }
      },
      a->v);
}

struct Normalizer {
  std::map<std::string, std::string> rename;
  unsigned depth = 0;

  std::string bind(const std::string &param, std::string &saved, bool &had) {
    auto it = rename.find(param);
    had = it != rename.end();
    if (had)
      saved = it->second;
    std::string fresh = "_" + std::to_string(depth++);
    rename[param] = fresh;
    return fresh;
  }
  void unbind(const std::string &param, const std::string &saved, bool had) {
    --depth;
    if (had)
      rename[param] = saved;
    else
      rename.erase(param);
  }

  ContractPtr go(const ContractPtr &c) {
    return std::visit(
        [&](const auto &n) -> ContractPtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, cnode::Flat>) {
            return mk::flat(go(n.pred));
          } else if constexpr (std::is_same_v<N, cnode::Fun>) {
            return mk::fun(go(n.dom), go(n.rng));
          } else if constexpr (std::is_same_v<N, cnode::Dep>) {
            std::string saved;
            bool had;
            auto p = bind(n.param, saved, had);
            auto b = go(n.body);
            unbind(n.param, saved, had);
            return mk::dep(p, b);
          } else if constexpr (std::is_same_v<N, cnode::Cap>) {
            return mk::cap(go(n.left), go(n.right));
          } else if constexpr (std::is_same_v<N, cnode::Cup>) {
            return mk::cup(go(n.left), go(n.right));
          } else {
            return c;
          }
        },
        c->v);
  }

  TermPtr go(const TermPtr &t) {
    return std::visit(
        [&](const auto &n) -> TermPtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, node::Var>) {
            auto it = rename.find(n.name);
            return it == rename.end() ? t : mk::var(it->second);
          } else if constexpr (std::is_same_v<N, node::Lam>) {
            std::string saved;
            bool had;
            auto p = bind(n.param, saved, had);
            auto b = go(n.body);
            unbind(n.param, saved, had);
            return mk::lam(p, b);
          } else if constexpr (std::is_same_v<N, node::App>) {
            return mk::app(go(n.fn), go(n.arg));
          } else if constexpr (std::is_same_v<N, node::Prim>) {
            std::vector<TermPtr> args;
            for (auto &a : n.args)
              args.push_back(go(a));
            return mk::prim(n.op, std::move(args));
          } else if constexpr (std::is_same_v<N, node::If>) {
            return mk::if_(go(n.test), go(n.then_branch), go(n.else_branch));
          } else if constexpr (std::is_same_v<N, node::Assert>) {
            auto s = go(n.subject);
            auto c = go(n.contract);
            return n.label ? mk::assert_label(s, *n.label, c)
                           : mk::assert_var(s, *n.var, c);
          } else if constexpr (std::is_same_v<N, node::Check>) {
            return mk::check(go(n.value), n.var, go(n.pred));
          } else if constexpr (std::is_same_v<N, node::Fork>) {
            return mk::fork(go(n.left), go(n.right));
          } else {
            return t;
          }
        },
        t->v);
  }
};

} // namespace

bool alpha_equal(const TermPtr &a, const TermPtr &b) {
  Env env;
  return aeq(a, b, env);
}

bool alpha_equal(const ContractPtr &a, const ContractPtr &b) {
  Env env;
  return aeq(a, b, env);
}

TermPtr alpha_normalize(const TermPtr &t) { return Normalizer{}.go(t); }
ContractPtr alpha_normalize(const ContractPtr &c) { return Normalizer{}.go(c); }

TermPtr erase_contracts(const TermPtr &t) {
  return std::visit(
      [&](const auto &n) -> TermPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Lam>) {
          return mk::lam(n.param, erase_contracts(n.body));
        } else if constexpr (std::is_same_v<N, node::App>) {
          return mk::app(erase_contracts(n.fn), erase_contracts(n.arg));
        } else if constexpr (std::is_same_v<N, node::Prim>) {
          std::vector<TermPtr> args;
          for (auto &a : n.args)
            args.push_back(erase_contracts(a));
          return mk::prim(n.op, std::move(args));
        } else if constexpr (std::is_same_v<N, node::If>) {
          return mk::if_(erase_contracts(n.test), erase_contracts(n.then_branch),
                         erase_contracts(n.else_branch));
        } else if constexpr (std::is_same_v<N, node::Assert>) {
          return erase_contracts(n.subject);
        } else if constexpr (std::is_same_v<N, node::Check>) {
          return erase_contracts(n.value);
        } else if constexpr (std::is_same_v<N, node::Fork>) {
          return mk::fork(erase_contracts(n.left), erase_contracts(n.right));
        } else {
          return t;
        }
      },
      t->v);
}

namespace {

void conjuncts(const ContractPtr &c, std::vector<ContractPtr> &imm,
               std::vector<ContractPtr> &del) {
  if (auto k = as<cnode::Cap>(c); k && !is_delayed(c)) {
    conjuncts(k->left, imm, del);
    conjuncts(k->right, imm, del);
  } else if (is_immediate(c)) {
    imm.push_back(c);
  } else {
    del.push_back(c);
  }
}

ContractPtr build_cap(const ContractPtr &l, const ContractPtr &r) {
  if (auto u = as<cnode::Cup>(l))
    return mk::cup(build_cap(u->left, r), build_cap(u->right, r));
  if (auto u = as<cnode::Cup>(r))
    return mk::cup(build_cap(l, u->left), build_cap(l, u->right));
  if (is_delayed(l) && is_delayed(r))
    return mk::cap(l, r);
  std::vector<ContractPtr> imm, del;
  conjuncts(l, imm, del);
  conjuncts(r, imm, del);
  ContractPtr acc;
  for (auto it = del.rbegin(); it != del.rend(); ++it)
    acc = acc ? mk::cap(*it, acc) : *it;
  for (auto it = imm.rbegin(); it != imm.rend(); ++it)
    acc = acc ? mk::cap(*it, acc) : *it;
  return acc;
}

} // namespace

ContractPtr normalize_intersections(const ContractPtr &c) {
  return std::visit(
      [&](const auto &n) -> ContractPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, cnode::Fun>) {
          return mk::fun(normalize_intersections(n.dom),
                         normalize_intersections(n.rng));
        } else if constexpr (std::is_same_v<N, cnode::Dep>) {
          return mk::dep(n.param, normalize_intersections(n.body));
        } else if constexpr (std::is_same_v<N, cnode::Cup>) {
          return mk::cup(normalize_intersections(n.left),
                         normalize_intersections(n.right));
        } else if constexpr (std::is_same_v<N, cnode::Cap>) {
          return build_cap(normalize_intersections(n.left),
                           normalize_intersections(n.right));
        } else {
          return c;
        }
      },
      c->v);
}

bool contains_fork(const TermPtr &t) {
  return std::visit(
      [&](const auto &n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Fork>) {
          return true;
        } else if constexpr (std::is_same_v<N, node::Lam>) {
          return contains_fork(n.body);
        } else if constexpr (std::is_same_v<N, node::App>) {
          return contains_fork(n.fn) || contains_fork(n.arg);
        } else if constexpr (std::is_same_v<N, node::Prim>) {
          for (auto &a : n.args)
            if (contains_fork(a))
              return true;
          return false;
        } else if constexpr (std::is_same_v<N, node::If>) {
          return contains_fork(n.test) || contains_fork(n.then_branch) ||
                 contains_fork(n.else_branch);
        } else if constexpr (std::is_same_v<N, node::Assert>) {
          return contains_fork(n.subject);
        } else if constexpr (std::is_same_v<N, node::Check>) {
          return contains_fork(n.value) || contains_fork(n.pred);
        } else {
          return false;
        }
      },
      t->v);
}

bool is_source_contract(const ContractPtr &c) {
  return std::visit(
      [&](const auto &n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, cnode::Flat>) {
          return is_source_term(n.pred);
        } else if constexpr (std::is_same_v<N, cnode::Named>) {
          return true;
        } else if constexpr (std::is_same_v<N, cnode::Fun>) {
          return is_source_contract(n.dom) && is_source_contract(n.rng);
        } else if constexpr (std::is_same_v<N, cnode::Dep>) {
          return is_source_contract(n.body);
        } else if constexpr (std::is_same_v<N, cnode::Cap> ||
                             std::is_same_v<N, cnode::Cup>) {
          return is_source_contract(n.left) && is_source_contract(n.right);
        } else {
          return false;
        }
      },
      c->v);
}

bool is_source_term(const TermPtr &t) {
  return std::visit(
      [&](const auto &n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Const> ||
                      std::is_same_v<N, node::Var>) {
          return true;
        } else if constexpr (std::is_same_v<N, node::Lam>) {
          return is_source_term(n.body);
        } else if constexpr (std::is_same_v<N, node::App>) {
          return is_source_term(n.fn) && is_source_term(n.arg);
        } else if constexpr (std::is_same_v<N, node::Prim>) {
          for (auto &a : n.args)
            if (!is_source_term(a))
              return false;
          return true;
        } else if constexpr (std::is_same_v<N, node::If>) {
          return is_source_term(n.test) && is_source_term(n.then_branch) &&
                 is_source_term(n.else_branch);
        } else if constexpr (std::is_same_v<N, node::Assert>) {
          return n.label && is_source_term(n.subject) &&
                 is_source_contract(n.contract);
        } else {
          return false;
        }
      },
      t->v);
}

namespace {
void labels_in(const ContractPtr &c, std::vector<std::string> &out);
} // namespace

void collect_labels(const TermPtr &t, std::vector<std::string> &out) {
  std::visit(
      [&](const auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Lam>) {
          collect_labels(n.body, out);
        } else if constexpr (std::is_same_v<N, node::App>) {
          collect_labels(n.fn, out);
          collect_labels(n.arg, out);
        } else if constexpr (std::is_same_v<N, node::Prim>) {
          for (auto &a : n.args)
            collect_labels(a, out);
        } else if constexpr (std::is_same_v<N, node::If>) {
          collect_labels(n.test, out);
          collect_labels(n.then_branch, out);
          collect_labels(n.else_branch, out);
        } else if constexpr (std::is_same_v<N, node::Assert>) {
          if (n.label)
            out.push_back(*n.label);
          collect_labels(n.subject, out);
          labels_in(n.contract, out);
        } else if constexpr (std::is_same_v<N, node::Check>) {
          collect_labels(n.value, out);
          collect_labels(n.pred, out);
        } else if constexpr (std::is_same_v<N, node::Fork>) {
          collect_labels(n.left, out);
          collect_labels(n.right, out);
        }
      },
      t->v);
}

namespace {
void labels_in(const ContractPtr &c, std::vector<std::string> &out) {
  std::visit(
      [&](const auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, cnode::Flat>) {
          collect_labels(n.pred, out);
        } else if constexpr (std::is_same_v<N, cnode::Fun>) {
          labels_in(n.dom, out);
          labels_in(n.rng, out);
        } else if constexpr (std::is_same_v<N, cnode::Dep>) {
          labels_in(n.body, out);
        } else if constexpr (std::is_same_v<N, cnode::Cap> ||
                             std::is_same_v<N, cnode::Cup>) {
          labels_in(n.left, out);
          labels_in(n.right, out);
        }
      },
      c->v);
}
} // namespace

std::size_t term_size(const TermPtr &t) {
  return std::visit(
      [&](const auto &n) -> std::size_t {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Lam>) {
          return 1 + term_size(n.body);
        } else if constexpr (std::is_same_v<N, node::App>) {
          return 1 + term_size(n.fn) + term_size(n.arg);
        } else if constexpr (std::is_same_v<N, node::Prim>) {
          std::size_t s = 1;
          for (auto &a : n.args)
            s += term_size(a);
          return s;
        } else if constexpr (std::is_same_v<N, node::If>) {
          return 1 + term_size(n.test) + term_size(n.then_branch) +
                 term_size(n.else_branch);
        } else if constexpr (std::is_same_v<N, node::Assert>) {
          return 1 + term_size(n.subject);
        } else if constexpr (std::is_same_v<N, node::Check>) {
          return 1 + term_size(n.value) + term_size(n.pred);
        } else if constexpr (std::is_same_v<N, node::Fork>) {
          return 1 + term_size(n.left) + term_size(n.right);
        } else {
          return 1;
        }
      },
      t->v);
}

} // namespace lcon
