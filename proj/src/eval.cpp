// SPDX-License-Identifier: Apache-2.0
#include "lcon/eval.hpp"

namespace lcon {

const char *outcome_name(Outcome::Kind k) {
  switch (k) {
  case Outcome::Kind::Value:
    return "value";
  case Outcome::Kind::Blame:
    return "blame";
  case Outcome::Kind::Stuck:
    return "stuck";
  case Outcome::Kind::OutOfFuel:
    return "out_of_fuel";
  }
  return "?";
}

std::optional<Constant> delta(OpKind op, const std::vector<Constant> &args) {
  if (args.size() != 2)
    return std::nullopt;
  const Constant &x = args[0], &y = args[1];
  if (op == OpKind::Eq)
    return Constant{x == y};
  auto i = std::get_if<std::int64_t>(&x);
  auto j = std::get_if<std::int64_t>(&y);
  if (op == OpKind::Add) {
    auto s = std::get_if<std::string>(&x);
    auto t = std::get_if<std::string>(&y);
    if (s && t)
      return Constant{*s + *t};
  }
  if (!i || !j)
    return std::nullopt;
  std::int64_t r = 0;
  switch (op) {
  case OpKind::Add:
    if (__builtin_add_overflow(*i, *j, &r))
      return std::nullopt;
    return Constant{r};
  case OpKind::Sub:
    if (__builtin_sub_overflow(*i, *j, &r))
      return std::nullopt;
    return Constant{r};
  case OpKind::Mul:
    if (__builtin_mul_overflow(*i, *j, &r))
      return std::nullopt;
    return Constant{r};
  case OpKind::Lt:
    return Constant{*i < *j};
  case OpKind::Gt:
    return Constant{*i > *j};
  case OpKind::Le:
    return Constant{*i <= *j};
  case OpKind::Ge:
    return Constant{*i >= *j};
  case OpKind::Eq:
    break;
  }
  return std::nullopt;
}

bool builtin_holds(NamedPred p, const TermPtr &value) {
  auto k = as<node::Const>(unwrap(value));
  if (!k)
    return false;
  if (p == NamedPred::String)
    return std::holds_alternative<std::string>(k->value);
  auto n = std::get_if<std::int64_t>(&k->value);
  if (!n)
    return false;
  switch (p) {
  case NamedPred::Number:
    return true;
  case NamedPred::Positive:
    return *n > 0;
  case NamedPred::Natural:
    return *n >= 0;
  case NamedPred::Negative:
    return *n < 0;
  case NamedPred::String:
    break;
  }
  return false;
}

namespace {

struct Stepper {
  ConstraintStore &store;
  std::uint64_t &checks;
  StepStatus status = StepStatus::Stepped;
  BlameVerdict blame{};

  TermPtr stuck() {
    status = StepStatus::Stuck;
    return nullptr;
  }

  TermPtr apply(const TermPtr &f, const TermPtr &a) {
    if (auto l = as<node::Lam>(f))
      return substitute(l->body, l->param, a);
    auto w = as<node::Assert>(f);
    if (!w)
      return stuck();
    BlameId id = BlameId::of_var(*w->var);
    const TermPtr &v = w->subject;
    if (auto fn = as<cnode::Fun>(w->contract)) {
      // (top -> bot) goes through the range case: recording the failure
      // before the body runs would let it overtake blame raised inside.
      bool dom_top = as<cnode::Top>(fn->dom) != nullptr;
      if (as<cnode::Top>(fn->rng)) {
        VarId i1 = store.fresh_var();
        store.add(Constraint::inversion(id, i1));
        return mk::app(v, mk::assert_var(a, i1, fn->dom));
      }
      if (dom_top) {
        VarId i1 = store.fresh_var();
        store.add(Constraint::indirection(id, i1));
        return mk::assert_var(mk::app(v, a), i1, fn->rng);
      }
      VarId i1 = store.fresh_var(), i2 = store.fresh_var();
      store.add(Constraint::function(id, i1, i2));
      return mk::assert_var(mk::app(v, mk::assert_var(a, i1, fn->dom)), i2,
                            fn->rng);
    }
    if (auto d = as<cnode::Dep>(w->contract))
      return mk::assert_var(mk::app(v, a), *w->var,
                            substitute(d->body, d->param, unwrap(a)));
    if (auto k = as<cnode::Cap>(w->contract)) {
      VarId i1 = store.fresh_var(), i2 = store.fresh_var();
      store.add(Constraint::intersection(id, i1, i2));
      return mk::app(
          mk::assert_var(mk::assert_var(v, i1, k->left), i2, k->right), a);
    }
    return stuck();
  }

  TermPtr monitor(const node::Assert &n) {
    const TermPtr &v = n.subject;
    VarId var = *n.var;
    BlameId id = BlameId::of_var(var);
    const ContractPtr &c = n.contract;
    if (auto f = as<cnode::Flat>(c)) {
      ++checks;
      return mk::check(v, var, mk::app(f->pred, unwrap(v)));
    }
    if (auto p = as<cnode::Named>(c)) {
      ++checks;
      return mk::check(v, var, mk::boolean(builtin_holds(p->pred, v)));
    }
    if (as<cnode::Top>(c) || as<cnode::Bot>(c)) {
      store.add(Constraint::truth(id, as<cnode::Top>(c) != nullptr));
      return v;
    }
    if (auto u = as<cnode::Cup>(c)) {
      VarId i1 = store.fresh_var(), i2 = store.fresh_var();
      store.add(Constraint::union_(id, i1, i2));
      return mk::assert_var(mk::assert_var(v, i1, u->left), i2, u->right);
    }
    if (auto k = as<cnode::Cap>(c)) {
      VarId i1 = store.fresh_var(), i2 = store.fresh_var();
      store.add(Constraint::intersection(id, i1, i2));
      return mk::assert_var(mk::assert_var(v, i1, k->left), i2, k->right);
    }
    return stuck();
  }

  TermPtr go(const TermPtr &t) {
    return std::visit(
        [&](const auto &n) -> TermPtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, node::App>) {
            if (!is_value(n.fn)) {
              auto f = go(n.fn);
              return f ? mk::app(f, n.arg) : nullptr;
            }
            if (!is_value(n.arg)) {
              auto a = go(n.arg);
              return a ? mk::app(n.fn, a) : nullptr;
            }
            return apply(n.fn, n.arg);
          } else if constexpr (std::is_same_v<N, node::Prim>) {
            for (std::size_t i = 0; i < n.args.size(); ++i) {
              if (is_value(n.args[i]))
                continue;
              auto a = go(n.args[i]);
              if (!a)
                return nullptr;
              auto args = n.args;
              args[i] = a;
              return mk::prim(n.op, std::move(args));
            }
            for (std::size_t i = 0; i < n.args.size(); ++i) {
              if (auto w = as<node::Assert>(n.args[i])) {
                auto args = n.args;
                args[i] = w->subject;
                return mk::prim(n.op, std::move(args));
              }
            }
            std::vector<Constant> ks;
            for (auto &a : n.args) {
              auto k = as<node::Const>(a);
              if (!k)
                return stuck();
              ks.push_back(k->value);
            }
            auto r = delta(n.op, ks);
            return r ? mk::constant(*r) : stuck();
          } else if constexpr (std::is_same_v<N, node::If>) {
            if (!is_value(n.test)) {
              auto c = go(n.test);
              return c ? mk::if_(c, n.then_branch, n.else_branch) : nullptr;
            }
            if (auto w = as<node::Assert>(n.test))
              return mk::if_(w->subject, n.then_branch, n.else_branch);
            auto k = as<node::Const>(n.test);
            auto b = k ? std::get_if<bool>(&k->value) : nullptr;
            if (!b)
              return stuck();
            return *b ? n.then_branch : n.else_branch;
          } else if constexpr (std::is_same_v<N, node::Assert>) {
            if (!is_value(n.subject)) {
              auto s = go(n.subject);
              if (!s)
                return nullptr;
              return n.label ? mk::assert_label(s, *n.label, n.contract)
                             : mk::assert_var(s, *n.var, n.contract);
            }
            if (n.label) {
              VarId v = store.fresh_var();
              store.add(Constraint::indirection(BlameId::of_label(*n.label), v));
              return mk::assert_var(n.subject, v, n.contract);
            }
            return monitor(n);
          } else if constexpr (std::is_same_v<N, node::Check>) {
            if (!is_value(n.pred)) {
              auto p = go(n.pred);
              return p ? mk::check(n.value, n.var, p) : nullptr;
            }
            store.add(Constraint::outcome(BlameId::of_var(n.var), n.pred));
            return n.value;
          } else if constexpr (std::is_same_v<N, node::Blame>) {
            status = StepStatus::Blame;
            blame = {n.label, n.polarity};
            return nullptr;
          } else {
            return stuck();
          }
        },
        t->v);
  }
};

} // namespace

StepResult step(Configuration &cfg) {
  if (is_value(cfg.term))
    return {StepStatus::Value};
  Stepper s{cfg.store, cfg.predicate_checks};
  if (cfg.fuel > 0)
    --cfg.fuel;
  TermPtr next = s.go(cfg.term);
  if (!next)
    return {s.status, s.blame};
  cfg.term = std::move(next);
  return {StepStatus::Stepped};
}

Outcome run(const TermPtr &program, std::uint64_t fuel, ConstraintStore store) {
  Configuration cfg{std::move(store), program, 0, fuel};
  Outcome out;
  std::size_t solved = static_cast<std::size_t>(-1);
  auto finish = [&](Outcome::Kind k) {
    out.kind = k;
    out.term = cfg.term;
    out.store = std::move(cfg.store);
    out.predicate_checks = cfg.predicate_checks;
    return out;
  };
  for (;;) {
    if (cfg.store.size() != solved) {
      solved = cfg.store.size();
      if (auto b = blame_state(cfg.store)) {
        out.blame = *b;
        return finish(Outcome::Kind::Blame);
      }
    }
    if (is_value(cfg.term))
      return finish(Outcome::Kind::Value);
    if (cfg.fuel == 0)
      return finish(Outcome::Kind::OutOfFuel);
    StepResult r = step(cfg);
    ++out.steps;
    if (r.status == StepStatus::Blame) {
      out.blame = r.blame;
      return finish(Outcome::Kind::Blame);
    }
    if (r.status == StepStatus::Stuck)
      return finish(Outcome::Kind::Stuck);
  }
}

namespace {

using Env = std::vector<std::pair<std::string, std::string>>;

const TermPtr &strip(const TermPtr &t) {
  const TermPtr *cur = &t;
  for (;;) {
    if (auto a = as<node::Assert>(*cur))
      cur = &a->subject;
    else if (auto c = as<node::Check>(*cur))
      cur = &c->value;
    else
      return *cur;
  }
}

bool same_name(const Env &env, const std::string &a, const std::string &b) {
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    bool ma = it->first == a, mb = it->second == b;
    if (ma || mb)
      return ma && mb;
  }
  return a == b;
}

bool erased_equiv(const TermPtr &x, const TermPtr &y, Env &env) {
  const TermPtr &a = strip(x);
  const TermPtr &b = strip(y);
  if (as<node::Blame>(a) || as<node::Blame>(b))
    return true;
  if (a->v.index() != b->v.index())
    return false;
  if (auto k = as<node::Const>(a))
    return k->value == as<node::Const>(b)->value;
  if (auto v = as<node::Var>(a))
    return same_name(env, v->name, as<node::Var>(b)->name);
  if (auto l = as<node::Lam>(a)) {
    auto m = as<node::Lam>(b);
    env.emplace_back(l->param, m->param);
    bool r = erased_equiv(l->body, m->body, env);
    env.pop_back();
    return r;
  }
  if (auto p = as<node::App>(a)) {
    auto q = as<node::App>(b);
    return erased_equiv(p->fn, q->fn, env) && erased_equiv(p->arg, q->arg, env);
  }
  if (auto p = as<node::Prim>(a)) {
    auto q = as<node::Prim>(b);
    if (p->op != q->op || p->args.size() != q->args.size())
      return false;
    for (std::size_t i = 0; i < p->args.size(); ++i)
      if (!erased_equiv(p->args[i], q->args[i], env))
        return false;
    return true;
  }
  if (auto p = as<node::If>(a)) {
    auto q = as<node::If>(b);
    return erased_equiv(p->test, q->test, env) &&
           erased_equiv(p->then_branch, q->then_branch, env) &&
           erased_equiv(p->else_branch, q->else_branch, env);
  }
  if (auto p = as<node::Fork>(a)) {
    auto q = as<node::Fork>(b);
    return erased_equiv(p->left, q->left, env) &&
           erased_equiv(p->right, q->right, env);
  }
  return false;
}

} // namespace

bool same_value(const TermPtr &a, const TermPtr &b) {
  Env env;
  return erased_equiv(unwrap(a), unwrap(b), env);
}

} // namespace lcon
