// SPDX-License-Identifier: Apache-2.0
#include "lcon/transform.hpp"

#include "lcon/eval.hpp"
#include "lcon/syntax.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

namespace lcon {

const char *level_name(Level l) { return l == Level::Baseline ? "baseline" : "subset"; }

std::string print_path(const Path &p) {
  std::string out = "/";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i)
      out += "/";
    out += std::to_string(p[i]);
  }
  return out;
}

bool Frame::same(const Frame &o) const {
  return label == o.label && var == o.var && alpha_equal(contract, o.contract);
}

std::pair<std::vector<Frame>, TermPtr> split_frames(const TermPtr &t) {
  std::vector<Frame> frames;
  TermPtr cur = t;
  while (auto a = as<node::Assert>(cur)) {
    frames.push_back({a->label, a->var, a->contract});
    cur = a->subject;
  }
  return {frames, cur};
}

namespace {

TermPtr wrap(const Frame &f, TermPtr subject) {
  return f.label ? mk::assert_label(std::move(subject), *f.label, f.contract)
                 : mk::assert_var(std::move(subject), *f.var, f.contract);
}

} // namespace

TermPtr wrap_frames(const std::vector<Frame> &frames, TermPtr core) {
  for (auto it = frames.rbegin(); it != frames.rend(); ++it)
    core = wrap(*it, std::move(core));
  return core;
}

bool is_blame_term(const TermPtr &t) { return as<node::Blame>(t) != nullptr; }

namespace {

TermPtr child(const TermPtr &t, std::size_t i) {
  if (auto n = as<node::Lam>(t))
    return n->body;
  if (auto n = as<node::App>(t))
    return i == 0 ? n->fn : n->arg;
  if (auto n = as<node::Prim>(t))
    return n->args.at(i);
  if (auto n = as<node::If>(t))
    return i == 0 ? n->test : i == 1 ? n->then_branch : n->else_branch;
  if (auto n = as<node::Assert>(t))
    return n->subject;
  if (auto n = as<node::Check>(t))
    return i == 0 ? n->value : n->pred;
  if (auto n = as<node::Fork>(t))
    return i == 0 ? n->left : n->right;
  throw std::logic_error("path leads into a leaf");
}

TermPtr with_child(const TermPtr &t, std::size_t i, TermPtr c) {
  if (auto n = as<node::Lam>(t))
    return mk::lam(n->param, std::move(c));
  if (auto n = as<node::App>(t))
    return i == 0 ? mk::app(std::move(c), n->arg) : mk::app(n->fn, std::move(c));
  if (auto n = as<node::Prim>(t)) {
    auto args = n->args;
    args.at(i) = std::move(c);
    return mk::prim(n->op, std::move(args));
  }
  if (auto n = as<node::If>(t)) {
    if (i == 0)
      return mk::if_(std::move(c), n->then_branch, n->else_branch);
    if (i == 1)
      return mk::if_(n->test, std::move(c), n->else_branch);
    return mk::if_(n->test, n->then_branch, std::move(c));
  }
  if (auto n = as<node::Assert>(t))
    return wrap({n->label, n->var, n->contract}, std::move(c));
  if (auto n = as<node::Check>(t))
    return i == 0 ? mk::check(std::move(c), n->var, n->pred)
                  : mk::check(n->value, n->var, std::move(c));
  if (auto n = as<node::Fork>(t))
    return i == 0 ? mk::fork(std::move(c), n->right) : mk::fork(n->left, std::move(c));
  throw std::logic_error("path leads into a leaf");
}

} // namespace

TermPtr replace_at(const TermPtr &root, const Path &path, std::size_t depth,
                   const TermPtr &repl) {
  if (depth == path.size())
    return repl;
  return with_child(root, path[depth],
                    replace_at(child(root, path[depth]), path, depth + 1, repl));
}

TermPtr subterm_at(const TermPtr &root, const Path &path) {
  TermPtr cur = root;
  for (auto i : path)
    cur = child(cur, i);
  return cur;
}

VerifyResult verify_predicate(const ContractPtr &c, const TermPtr &value,
                              std::uint64_t fuel) {
  if (auto n = as<cnode::Named>(c))
    return builtin_holds(n->pred, value) ? VerifyResult::True : VerifyResult::False;
  auto f = as<cnode::Flat>(c);
  if (!f)
    return VerifyResult::Unknown;
  Outcome o = run(mk::app(f->pred, unwrap(value)), fuel);
  if (o.kind != Outcome::Kind::Value)
    return VerifyResult::Unknown;
  return make_truth(o.term) ? VerifyResult::True : VerifyResult::False;
}

namespace {

bool has_delayed_choice(const ContractPtr &c) {
  if (auto k = as<cnode::Cap>(c))
    return is_delayed(k->left) || is_delayed(k->right) || has_delayed_choice(k->left) ||
           has_delayed_choice(k->right);
  if (auto u = as<cnode::Cup>(c))
    return is_delayed(u->left) || is_delayed(u->right) || has_delayed_choice(u->left) ||
           has_delayed_choice(u->right);
  if (auto f = as<cnode::Fun>(c))
    return has_delayed_choice(f->dom) || has_delayed_choice(f->rng);
  if (auto d = as<cnode::Dep>(c))
    return has_delayed_choice(d->body);
  return false;
}

} // namespace

bool domain_only(const ContractPtr &c) {
  auto f = as<cnode::Fun>(c);
  return f && as<cnode::Top>(f->rng);
}

std::size_t contract_checks(const ContractPtr &c) {
  if (as<cnode::Flat>(c) || as<cnode::Named>(c))
    return 1;
  if (auto k = as<cnode::Cap>(c))
    return contract_checks(k->left) + contract_checks(k->right);
  if (auto u = as<cnode::Cup>(c))
    return contract_checks(u->left) + contract_checks(u->right);
  if (auto f = as<cnode::Fun>(c))
    return contract_checks(f->dom) + contract_checks(f->rng);
  if (auto d = as<cnode::Dep>(c))
    return contract_checks(d->body);
  return 0;
}

std::optional<bool> subset_keeps_outer(Subcontract &sub, const ContractPtr &outer,
                                       const ContractPtr &inner) {
  // A failing operand of an intersection or union of delayed contracts
  // can be excused by the other operand, which the judgments do not
  // see.
  if (has_delayed_choice(outer) || has_delayed_choice(inner))
    return std::nullopt;
  // A false contract records a failure that another observation may
  // excuse; it neither stands in for a check nor is replaced by one.
  if (as<cnode::Bot>(outer) || as<cnode::Bot>(inner))
    return std::nullopt;
  if (sub.naive(outer, inner) && contract_checks(outer) <= contract_checks(inner))
    return true;
  if (sub.naive(inner, outer))
    return false;
  return std::nullopt;
}

std::size_t count_branches(const TermPtr &t) {
  if (auto f = as<node::Fork>(t))
    return count_branches(f->left) + count_branches(f->right);
  return 1;
}

namespace {

std::size_t count_preds(const ContractPtr &c) {
  return std::visit(
      [](const auto &n) -> std::size_t {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, cnode::Flat> || std::is_same_v<N, cnode::Named>)
          return 1;
        else if constexpr (std::is_same_v<N, cnode::Fun>)
          return count_preds(n.dom) + count_preds(n.rng);
        else if constexpr (std::is_same_v<N, cnode::Dep>)
          return count_preds(n.body);
        else if constexpr (std::is_same_v<N, cnode::Cap> || std::is_same_v<N, cnode::Cup>)
          return count_preds(n.left) + count_preds(n.right);
        else
          return 0;
      },
      c->v);
}

} // namespace

std::size_t count_predicates(const TermPtr &t) {
  return std::visit(
      [](const auto &n) -> std::size_t {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Lam>)
          return count_predicates(n.body);
        else if constexpr (std::is_same_v<N, node::App>)
          return count_predicates(n.fn) + count_predicates(n.arg);
        else if constexpr (std::is_same_v<N, node::Prim>) {
          std::size_t s = 0;
          for (auto &a : n.args)
            s += count_predicates(a);
          return s;
        } else if constexpr (std::is_same_v<N, node::If>)
          return count_predicates(n.test) + count_predicates(n.then_branch) +
                 count_predicates(n.else_branch);
        else if constexpr (std::is_same_v<N, node::Assert>)
          return count_predicates(n.subject) + count_preds(n.contract);
        else if constexpr (std::is_same_v<N, node::Check>)
          return count_predicates(n.value) + 1;
        else if constexpr (std::is_same_v<N, node::Fork>)
          return count_predicates(n.left) + count_predicates(n.right);
        else
          return 0;
      },
      t->v);
}

struct Rewriter::Caches {
  std::map<std::pair<const Contract *, const Term *>, VerifyResult> verify;
  std::vector<ContractPtr> pinned_contracts;
  std::vector<TermPtr> pinned_terms;
};

Rewriter::Rewriter(Level level, const ImplicationEnv &env, TransformConfig cfg)
    : level_(level), env_(env), cfg_(cfg), sub_(std::make_unique<Subcontract>(env)),
      caches_(std::make_unique<Caches>()) {}

Rewriter::~Rewriter() = default;

namespace {

// Lower numbers win. Blame/Global shares the top slot but is only tried at
// branch roots.
enum Prio : int {
  kBlame = 0,
  kSubset = 1,
  kFork = 2,
  kMerge = 3,
  kLift = 4,
  kSimplify = 10,
  kVerify = 11,
  kConvert = 12,
  kPushImmediate = 13,
  kPushFalse = 14,
  kUnfold = 15,
  kUnroll = 16,
  kPushIf = 17,
  kLower = 18,
};

struct Candidate {
  int prio = 0;
  const char *rule = "";
  Path rpath; // reversed: innermost index first
  std::function<TermPtr(ConstraintStore &)> apply;
  std::function<std::pair<TermPtr, TermPtr>(ConstraintStore &)> fork;
};

bool is_flat_like(const ContractPtr &c) {
  return as<cnode::Flat>(c) || as<cnode::Named>(c);
}

const node::Assert *var_assert(const TermPtr &t) {
  auto a = as<node::Assert>(t);
  return a && a->var ? a : nullptr;
}

bool is_bot(const ContractPtr &c) { return as<cnode::Bot>(c) != nullptr; }

// Strips the false-contract wrappers of a value context.
TermPtr strip_bot_frames(const TermPtr &t, std::vector<Frame> *frames = nullptr) {
  TermPtr cur = t;
  while (auto a = var_assert(cur)) {
    if (!is_bot(a->contract))
      break;
    if (frames)
      frames->push_back({a->label, a->var, a->contract});
    cur = a->subject;
  }
  return cur;
}

} // namespace

class Search {
public:
  Search(Rewriter &rw, const ConstraintStore &store)
      : rw_(rw), store_(store), sub_(*rw.sub_), subset_(rw.level_ == Level::Subset) {}

  std::optional<Candidate> best(const TermPtr &t) {
    auto it = memo_.find(t.get());
    if (it != memo_.end())
      return it->second;
    pins_.push_back(t);
    std::optional<Candidate> own = at(t);
    std::optional<Candidate> inner;
    visit_children(t, [&](std::size_t i, const TermPtr &c) {
      auto b = best(c);
      if (!b)
        return true;
      b->rpath.push_back(i);
      inner = std::move(b);
      return false;
    });
    std::optional<Candidate> r;
    if (own && (!inner || own->prio <= inner->prio))
      r = std::move(own);
    else
      r = std::move(inner);
    memo_[t.get()] = r;
    return r;
  }

  bool canon(const TermPtr &t) { return !best(t).has_value(); }

  // Candidates at a branch root, including the root-only global blame rule.
  std::optional<Candidate> root(const TermPtr &t) {
    if (subset_)
      if (auto g = blame_global(t))
        return g;
    return best(t);
  }

private:
  // Children reachable through the transformation context, in order; the
  // callback returns false to stop.
  template <class F> void visit_children(const TermPtr &t, F &&f) {
    if (auto n = as<node::Lam>(t)) {
      f(0, n->body);
    } else if (auto n = as<node::App>(t)) {
      if (f(0, n->fn))
        f(1, n->arg);
    } else if (auto n = as<node::Prim>(t)) {
      for (std::size_t i = 0; i < n->args.size(); ++i)
        if (!f(i, n->args[i]))
          break;
    } else if (auto n = as<node::If>(t)) {
      if (f(0, n->test) && f(1, n->then_branch))
        f(2, n->else_branch);
    } else if (auto n = as<node::Assert>(t)) {
      f(0, n->subject);
    }
  }

  static Candidate make(int prio, const char *rule,
                        std::function<TermPtr(ConstraintStore &)> apply) {
    Candidate c;
    c.prio = prio;
    c.rule = rule;
    c.apply = std::move(apply);
    return c;
  }

  std::optional<Candidate> at(const TermPtr &t) {
    std::optional<Candidate> r;
    auto consider = [&](std::optional<Candidate> c) {
      if (c && (!r || c->prio < r->prio))
        r = std::move(c);
    };
    if (subset_) {
      consider(blame_lambda(t));
      consider(blame_if(t));
      consider(subset_rule(t));
      consider(fork_union(t));
      consider(fork_intersection(t));
      consider(merge(t));
      consider(lift(t));
    }
    consider(simplify(t));
    consider(verify(t));
    consider(convert_true(t));
    consider(push_immediate(t));
    consider(unfold_assert(t));
    if (!subset_) {
      consider(unfold_union(t));
      consider(unfold_d_intersection(t));
    }
    consider(unfold_intersection(t));
    consider(unfold_op(t));
    consider(unfold_d_function(t));
    consider(unroll(t));
    consider(push_if(t));
    consider(lower(t));
    return r;
  }

  // ---- baseline rules ----

  std::optional<Candidate> simplify(const TermPtr &t) {
    auto a = as<node::Assert>(t);
    if (!a || !a->label || !is_value(a->subject))
      return {};
    ContractPtr keep;
    const char *rule = nullptr;
    if (auto u = as<cnode::Cup>(a->contract)) {
      if (sub_.ordinary(u->left, u->right))
        keep = u->right, rule = "Simplify/Union/1";
      else if (sub_.ordinary(u->right, u->left))
        keep = u->left, rule = "Simplify/Union/2";
    } else if (auto k = as<cnode::Cap>(a->contract)) {
      if (sub_.ordinary(k->left, k->right))
        keep = k->left, rule = "Simplify/Intersection/1";
      else if (sub_.ordinary(k->right, k->left))
        keep = k->right, rule = "Simplify/Intersection/2";
    }
    if (!rule)
      return {};
    auto subject = a->subject;
    auto label = *a->label;
    return make(kSimplify, rule, [=](ConstraintStore &) {
      return mk::assert_label(subject, label, keep);
    });
  }

  VerifyResult verify_cached(const ContractPtr &c, const TermPtr &v) {
    auto &cache = rw_.caches_->verify;
    auto key = std::make_pair(c.get(), v.get());
    if (auto it = cache.find(key); it != cache.end())
      return it->second;
    rw_.caches_->pinned_contracts.push_back(c);
    rw_.caches_->pinned_terms.push_back(v);
    VerifyResult r = verify_predicate(c, v, rw_.cfg_.verify_fuel);
    cache[key] = r;
    if (r == VerifyResult::Unknown)
      rw_.warnings_.push_back("predicate " + print(c) + " on " + print(v) +
                              " did not finish at compile time; left residual");
    return r;
  }

  bool is_static_value(const TermPtr &t) {
    if (as<node::Const>(t))
      return true;
    return as<node::Lam>(t) && canon(t);
  }

  std::optional<Candidate> verify(const TermPtr &t) {
    auto a = var_assert(t);
    if (!a || !is_flat_like(a->contract))
      return {};
    TermPtr v = strip_bot_frames(a->subject);
    if (!is_static_value(v))
      return {};
    VerifyResult r = verify_cached(a->contract, v);
    if (r == VerifyResult::Unknown)
      return {};
    auto subject = a->subject;
    VarId var = *a->var;
    bool ok = r == VerifyResult::True;
    return make(kVerify, ok ? "Verify/True" : "Verify/False", [=](ConstraintStore &) {
      return mk::assert_var(subject, var, ok ? mk::top() : mk::bot());
    });
  }

  std::optional<Candidate> convert_true(const TermPtr &t) {
    auto a = var_assert(t);
    if (!a || !as<cnode::Top>(a->contract) || !canon(a->subject))
      return {};
    auto subject = a->subject;
    VarId var = *a->var;
    return make(kConvert, "Convert/True", [=](ConstraintStore &s) {
      s.add(Constraint::truth(BlameId::of_var(var), true));
      return subject;
    });
  }

  std::optional<Candidate> push_immediate(const TermPtr &t) {
    auto outer = as<node::Assert>(t);
    if (!outer)
      return {};
    bool bot = is_bot(outer->contract);
    if (!bot && !is_flat_like(outer->contract))
      return {};
    auto inner = as<node::Assert>(outer->subject);
    if (!inner || !is_delayed(inner->contract) || !canon(outer->subject))
      return {};
    Frame fo{outer->label, outer->var, outer->contract};
    Frame fi{inner->label, inner->var, inner->contract};
    auto core = inner->subject;
    return make(bot ? kPushFalse : kPushImmediate, bot ? "Push/False" : "Push/Immediate",
                [=](ConstraintStore &) { return wrap(fi, wrap(fo, core)); });
  }

  std::optional<Candidate> unfold_assert(const TermPtr &t) {
    auto a = as<node::Assert>(t);
    if (!a || !a->label || !canon(a->subject))
      return {};
    auto subject = a->subject;
    auto label = *a->label;
    auto c = a->contract;
    return make(kUnfold, "Unfold/Assert", [=](ConstraintStore &s) {
      VarId v = s.fresh_var();
      s.add(Constraint::indirection(BlameId::of_label(label), v));
      return mk::assert_var(subject, v, c);
    });
  }

  std::optional<Candidate> unfold_union(const TermPtr &t) {
    auto a = var_assert(t);
    if (!a)
      return {};
    auto u = as<cnode::Cup>(a->contract);
    if (!u || !canon(a->subject))
      return {};
    auto subject = a->subject;
    VarId var = *a->var;
    auto l = u->left, r = u->right;
    return make(kUnfold, "Unfold/Union", [=](ConstraintStore &s) {
      VarId i1 = s.fresh_var(), i2 = s.fresh_var();
      s.add(Constraint::union_(BlameId::of_var(var), i1, i2));
      return mk::assert_var(mk::assert_var(subject, i1, l), i2, r);
    });
  }

  std::optional<Candidate> unfold_intersection(const TermPtr &t) {
    auto a = var_assert(t);
    if (!a)
      return {};
    auto k = as<cnode::Cap>(a->contract);
    if (!k || !canon(a->subject))
      return {};
    ContractPtr imm, rest;
    if (is_immediate(k->left))
      imm = k->left, rest = k->right;
    else if (is_immediate(k->right))
      imm = k->right, rest = k->left;
    else
      return {};
    auto subject = a->subject;
    VarId var = *a->var;
    return make(kUnfold, "Unfold/Intersection", [=](ConstraintStore &s) {
      VarId i1 = s.fresh_var(), i2 = s.fresh_var();
      s.add(Constraint::intersection(BlameId::of_var(var), i1, i2));
      return mk::assert_var(mk::assert_var(subject, i1, imm), i2, rest);
    });
  }

  std::optional<Candidate> unfold_op(const TermPtr &t) {
    auto p = as<node::Prim>(t);
    if (!p)
      return {};
    for (std::size_t i = 0; i < p->args.size(); ++i) {
      if (!canon(p->args[i]))
        return {};
      auto a = var_assert(p->args[i]);
      if (!a || !is_delayed(a->contract))
        continue;
      auto op = p->op;
      auto args = p->args;
      VarId var = *a->var;
      auto subject = a->subject;
      return make(kUnfold, "Unfold/Op", [=](ConstraintStore &s) mutable {
        s.add(Constraint::truth(BlameId::of_var(var), true));
        args[i] = subject;
        return mk::prim(op, args);
      });
    }
    return {};
  }

  std::optional<Candidate> unfold_d_function(const TermPtr &t) {
    auto app = as<node::App>(t);
    if (!app)
      return {};
    auto a = var_assert(app->fn);
    if (!a)
      return {};
    auto f = as<cnode::Fun>(a->contract);
    if (!f || !canon(app->fn) || !canon(app->arg))
      return {};
    auto t1 = a->subject, t2 = app->arg;
    VarId var = *a->var;
    auto dom = f->dom, rng = f->rng;
    return make(kUnfold, "Unfold/D-Function", [=](ConstraintStore &s) {
      VarId i1 = s.fresh_var(), i2 = s.fresh_var();
      s.add(Constraint::function(BlameId::of_var(var), i1, i2));
      return mk::assert_var(mk::app(t1, mk::assert_var(t2, i1, dom)), i2, rng);
    });
  }

  std::optional<Candidate> unfold_d_intersection(const TermPtr &t) {
    auto app = as<node::App>(t);
    if (!app)
      return {};
    auto a = var_assert(app->fn);
    if (!a)
      return {};
    auto k = as<cnode::Cap>(a->contract);
    if (!k || !is_delayed(a->contract) || !canon(app->fn) || !canon(app->arg))
      return {};
    auto t1 = a->subject, t2 = app->arg;
    VarId var = *a->var;
    auto l = k->left, r = k->right;
    return make(kUnfold, "Unfold/D-Intersection", [=](ConstraintStore &s) {
      VarId i1 = s.fresh_var(), i2 = s.fresh_var();
      s.add(Constraint::intersection(BlameId::of_var(var), i1, i2));
      return mk::app(mk::assert_var(mk::assert_var(t1, i1, l), i2, r), t2);
    });
  }

  std::optional<Candidate> unroll(const TermPtr &t) {
    auto app = as<node::App>(t);
    if (!app)
      return {};
    std::vector<Frame> bots;
    TermPtr fn = strip_bot_frames(app->fn, &bots);
    auto lam = as<node::Lam>(fn);
    auto a = var_assert(app->arg);
    if (!lam || !a || !is_delayed(a->contract) || !canon(app->fn) || !canon(app->arg))
      return {};
    auto param = lam->param;
    auto body = lam->body;
    auto c = a->contract;
    VarId var = *a->var;
    auto subject = a->subject;
    return make(kUnroll, "Unroll", [=](ConstraintStore &) {
      auto graft = mk::assert_var(mk::var(param), var, c);
      auto nf = mk::lam(param, substitute(body, param, graft));
      return mk::app(wrap_frames(bots, nf), subject);
    });
  }

  std::optional<Candidate> push_if(const TermPtr &t) {
    auto n = as<node::If>(t);
    if (!n || !canon(n->test) || !canon(n->then_branch) || !canon(n->else_branch))
      return {};
    auto [ft, ct] = split_frames(n->then_branch);
    auto [fe, ce] = split_frames(n->else_branch);
    // Without assertion contexts only the outermost frames may match.
    std::size_t lim_t = subset_ ? ft.size() : std::min<std::size_t>(ft.size(), 1);
    std::size_t lim_e = subset_ ? fe.size() : std::min<std::size_t>(fe.size(), 1);
    for (std::size_t i = 0; i < lim_t; ++i) {
      if (!ft[i].var)
        continue;
      for (std::size_t j = 0; j < lim_e; ++j) {
        if (!ft[i].same(fe[j]))
          continue;
        auto test = n->test;
        auto ft2 = ft, fe2 = fe;
        Frame f = ft[i];
        ft2.erase(ft2.begin() + i);
        fe2.erase(fe2.begin() + j);
        auto core_t = ct, core_e = ce;
        return make(kPushIf, "Push/If", [=](ConstraintStore &) {
          return wrap(f, mk::if_(test, wrap_frames(ft2, core_t), wrap_frames(fe2, core_e)));
        });
      }
    }
    return {};
  }

  std::optional<Candidate> lower(const TermPtr &t) {
    auto lam = as<node::Lam>(t);
    if (!lam)
      return {};
    auto a = var_assert(lam->body);
    if (!a || !canon(lam->body))
      return {};
    if (subset_) {
      auto v = as<node::Var>(a->subject);
      if (v && v->name == lam->param)
        return {};
    }
    auto param = lam->param;
    auto subject = a->subject;
    VarId var = *a->var;
    auto c = a->contract;
    return make(kLower, "Lower", [=](ConstraintStore &) {
      return mk::assert_var(mk::lam(param, subject), var, mk::fun(mk::top(), c));
    });
  }

  // ---- subset rules ----

  // First position of the body context that satisfies pred, as a path.
  template <class P>
  std::optional<Path> find_b(const TermPtr &t, const P &pred, bool at_root) {
    if (pred(t, at_root))
      return Path{};
    auto down = [&](std::size_t i, const TermPtr &c) -> std::optional<Path> {
      auto r = find_b(c, pred, false);
      if (r)
        r->insert(r->begin(), i);
      return r;
    };
    if (auto n = as<node::App>(t)) {
      if (auto r = down(0, n->fn))
        return r;
      if (canon(n->fn))
        return down(1, n->arg);
    } else if (auto n = as<node::Prim>(t)) {
      for (std::size_t i = 0; i < n->args.size(); ++i) {
        if (auto r = down(i, n->args[i]))
          return r;
        if (!canon(n->args[i]))
          break;
      }
    } else if (auto n = as<node::Assert>(t)) {
      return down(0, n->subject);
    } else if (auto n = as<node::If>(t)) {
      return down(0, n->test);
    }
    return std::nullopt;
  }

  static TermPtr with_origin(const TermPtr &b, const TermPtr &origin) {
    auto n = as<node::Blame>(b);
    return n ? mk::blame(n->label, n->polarity, origin) : b;
  }

  std::optional<TermPtr> blame_term(VarId var) {
    try {
      return blame_of(BlameId::of_var(var), store_);
    } catch (const OrphanVariable &) {
      return std::nullopt;
    }
  }

  // A false-contract assertion on a canonical term. At the hole itself
  // the term must not already be a blame term, which would loop.
  auto bot_site() {
    return [this](const TermPtr &n, bool hole_is_root) {
      auto a = var_assert(n);
      if (!a || !is_bot(a->contract) || !canon(a->subject))
        return false;
      if (hole_is_root && is_blame_term(a->subject))
        return false;
      return blame_term(*a->var).has_value();
    };
  }

  std::optional<Candidate> blame_lambda(const TermPtr &t) {
    auto lam = as<node::Lam>(t);
    if (!lam)
      return {};
    auto site = bot_site();
    // The hole must be strictly inside the body; a bare false assertion
    // on the body is handled by Lower.
    auto pred = [&](const TermPtr &n, bool root) { return !root && site(n, false); };
    auto p = find_b(lam->body, pred, true);
    if (!p)
      return {};
    VarId var = *var_assert(subterm_at(lam->body, *p))->var;
    auto b = blame_term(var);
    if (!b)
      return {};
    auto param = lam->param;
    auto bt = with_origin(*b, lam->body);
    return make(kBlame, "Blame", [=](ConstraintStore &) {
      return mk::lam(param, mk::assert_var(bt, var, mk::bot()));
    });
  }

  std::optional<Candidate> blame_if(const TermPtr &t) {
    auto n = as<node::If>(t);
    if (!n || !canon(n->test))
      return {};
    auto site = bot_site();
    auto try_branch = [&](const TermPtr &br, bool then_side) -> std::optional<Candidate> {
      auto p = find_b(br, site, true);
      if (!p)
        return {};
      VarId var = *var_assert(subterm_at(br, *p))->var;
      auto b = blame_term(var);
      if (!b)
        return {};
      auto test = n->test, th = n->then_branch, el = n->else_branch;
      auto repl = mk::assert_var(with_origin(*b, br), var, mk::bot());
      return make(kBlame, then_side ? "Blame/If/True" : "Blame/If/False",
                  [=](ConstraintStore &) {
                    return then_side ? mk::if_(test, repl, el) : mk::if_(test, th, repl);
                  });
    };
    if (auto c = try_branch(n->then_branch, true))
      return c;
    if (canon(n->then_branch))
      return try_branch(n->else_branch, false);
    return {};
  }

public:
  std::optional<Candidate> blame_global(const TermPtr &t) {
    auto p = find_b(t, bot_site(), true);
    if (!p)
      return {};
    VarId var = *var_assert(subterm_at(t, *p))->var;
    auto b = blame_term(var);
    if (!b)
      return {};
    auto repl = mk::assert_var(*b, var, mk::bot());
    return make(kBlame, "Blame/Global", [=](ConstraintStore &) { return repl; });
  }

private:
  std::optional<Candidate> subset_rule(const TermPtr &t) {
    auto outer = as<node::Assert>(t);
    if (!outer)
      return {};
    auto [frames, core] = split_frames(t);
    // frames[0] is `outer`; compare it with each frame below, nearest first.
    for (std::size_t k = 1; k < frames.size(); ++k) {
      TermPtr below = wrap_frames(std::vector<Frame>(frames.begin() + k + 1, frames.end()), core);
      if (!canon(below))
        return {};
      auto which = subset_keeps_outer(sub_, frames[0].contract, frames[k].contract);
      if (!which)
        continue;
      bool right = *which;
      std::vector<Frame> kept(frames.begin() + 1, frames.end());
      // The survivor takes the place where its check would run first.
      // Domain checks of a stack run outermost first, so a survivor with
      // nothing but a domain stays at (or moves to) the outer position.
      const Frame &survivor = right ? frames[0] : frames[k];
      if (domain_only(survivor.contract)) {
        kept.erase(kept.begin() + static_cast<long>(k - 1));
        kept.insert(kept.begin(), survivor);
      } else if (right) {
        kept[k - 1] = frames[0];
      }
      auto cr = core;
      return make(kSubset, right ? "Subset/Right" : "Subset/Left",
                  [=](ConstraintStore &) { return wrap_frames(kept, cr); });
    }
    return {};
  }

  std::optional<Candidate> fork_union(const TermPtr &t) {
    auto a = var_assert(t);
    if (!a)
      return {};
    auto u = as<cnode::Cup>(a->contract);
    if (!u || !canon(a->subject))
      return {};
    auto subject = a->subject;
    VarId var = *a->var;
    auto l = u->left, r = u->right;
    Candidate c;
    c.prio = kFork;
    c.rule = "Fork/Union";
    c.fork = [=](ConstraintStore &s) {
      VarId i1 = s.fresh_var(), i2 = s.fresh_var();
      s.add(Constraint::union_(BlameId::of_var(var), i1, i2));
      return std::make_pair(mk::assert_var(subject, i1, l), mk::assert_var(subject, i2, r));
    };
    return c;
  }

  std::optional<Candidate> fork_intersection(const TermPtr &t) {
    auto app = as<node::App>(t);
    if (!app)
      return {};
    auto a = var_assert(app->fn);
    if (!a)
      return {};
    auto k = as<cnode::Cap>(a->contract);
    if (!k || !is_delayed(a->contract) || !canon(app->fn) || !canon(app->arg))
      return {};
    auto t1 = a->subject, t2 = app->arg;
    VarId var = *a->var;
    auto l = k->left, r = k->right;
    Candidate c;
    c.prio = kFork;
    c.rule = "Fork/Intersection";
    c.fork = [=](ConstraintStore &s) {
      VarId i1 = s.fresh_var(), i2 = s.fresh_var();
      s.add(Constraint::intersection(BlameId::of_var(var), i1, i2));
      return std::make_pair(mk::app(mk::assert_var(t1, i1, l), t2),
                            mk::app(mk::assert_var(t1, i2, r), t2));
    };
    return c;
  }

  static bool range_only(const ContractPtr &c) {
    auto f = as<cnode::Fun>(c);
    return f && as<cnode::Top>(f->dom);
  }
  static bool domain_only(const ContractPtr &c) {
    auto f = as<cnode::Fun>(c);
    return f && as<cnode::Top>(f->rng);
  }

  std::optional<Candidate> merge(const TermPtr &t) {
    auto outer = var_assert(t);
    if (!outer)
      return {};
    auto [frames, core] = split_frames(t);
    for (std::size_t k = 1; k < frames.size(); ++k) {
      TermPtr below = wrap_frames(std::vector<Frame>(frames.begin() + k + 1, frames.end()), core);
      if (!canon(below))
        return {};
      const Frame &fo = frames[0], &fi = frames[k];
      if (!fi.var)
        continue;
      ContractPtr dom, rng;
      if (range_only(fo.contract) && domain_only(fi.contract))
        dom = as<cnode::Fun>(fi.contract)->dom, rng = as<cnode::Fun>(fo.contract)->rng;
      else if (domain_only(fo.contract) && range_only(fi.contract))
        dom = as<cnode::Fun>(fo.contract)->dom, rng = as<cnode::Fun>(fi.contract)->rng;
      else
        continue;
      auto bo = blame_term(*fo.var), bi = blame_term(*fi.var);
      if (!bo || !bi || !alpha_equal(*bo, *bi))
        continue;
      std::vector<Frame> kept(frames.begin() + 1, frames.end());
      VarId vo = *fo.var, vi = *fi.var;
      auto cr = core;
      std::size_t slot = k - 1;
      return make(kMerge, "Merge", [=](ConstraintStore &s) mutable {
        VarId v3 = s.fresh_var();
        s.add(Constraint::indirection(BlameId::of_var(vo), v3));
        s.add(Constraint::indirection(BlameId::of_var(vi), v3));
        kept[slot] = Frame{std::nullopt, v3, mk::fun(dom, rng)};
        return wrap_frames(kept, cr);
      });
    }
    return {};
  }

  std::optional<Candidate> lift(const TermPtr &t) {
    auto lam = as<node::Lam>(t);
    if (!lam)
      return {};
    const std::string &x = lam->param;
    auto pred = [&](const TermPtr &n, bool) {
      auto a = var_assert(n);
      if (!a || !(is_flat_like(a->contract) || is_bot(a->contract)))
        return false;
      auto v = as<node::Var>(a->subject);
      return v && v->name == x;
    };
    auto p = find_b(lam->body, pred, true);
    if (!p)
      return {};
    auto a = var_assert(subterm_at(lam->body, *p));
    VarId var = *a->var;
    auto c = a->contract;
    auto body = lam->body;
    auto path = *p;
    return make(kLift, "Lift", [=](ConstraintStore &s) {
      VarId v1 = s.fresh_var();
      s.add(Constraint::inversion(BlameId::of_var(var), v1));
      auto nb = replace_at(body, path, 0, mk::var(x));
      return mk::assert_var(mk::lam(x, nb), v1, mk::fun(c, mk::top()));
    });
  }

  Rewriter &rw_;
  const ConstraintStore &store_;
  Subcontract &sub_;
  bool subset_;
  std::unordered_map<const Term *, std::optional<Candidate>> memo_;
  std::vector<TermPtr> pins_;
};

namespace {

struct Found {
  Path branch; // path of the branch root inside the observation tree
  Candidate cand;
};

std::optional<Found> find_redex(Search &s, const TermPtr &t, Path &prefix) {
  if (auto f = as<node::Fork>(t)) {
    prefix.push_back(0);
    auto l = find_redex(s, f->left, prefix);
    prefix.pop_back();
    if (l)
      return l;
    prefix.push_back(1);
    auto r = find_redex(s, f->right, prefix);
    prefix.pop_back();
    return r;
  }
  auto c = s.root(t);
  if (!c)
    return std::nullopt;
  std::reverse(c->rpath.begin(), c->rpath.end());
  return Found{prefix, std::move(*c)};
}

} // namespace

std::optional<TransformStep> Rewriter::step(ConstraintStore &store, TermPtr &t) {
  Search s(*this, store);
  Path prefix;
  auto found = find_redex(s, t, prefix);
  if (!found)
    return std::nullopt;
  std::size_t before_size = store.size();
  TermPtr branch = subterm_at(t, found->branch);
  const Path &rel = found->cand.rpath;
  TransformStep st;
  st.rule = found->cand.rule;
  st.before = subterm_at(branch, rel);
  TermPtr new_branch;
  if (found->cand.fork) {
    auto [l, r] = found->cand.fork(store);
    new_branch = mk::fork(replace_at(branch, rel, 0, l), replace_at(branch, rel, 0, r));
    st.after = mk::fork(l, r);
  } else {
    st.after = found->cand.apply(store);
    new_branch = replace_at(branch, rel, 0, st.after);
  }
  t = replace_at(t, found->branch, 0, new_branch);
  if (found->cand.fork && count_branches(t) > cfg_.max_branches)
    throw ForkLimitExceeded("more than " + std::to_string(cfg_.max_branches) +
                            " parallel observations");
  st.path = found->branch;
  st.path.insert(st.path.end(), rel.begin(), rel.end());
  const auto &cs = store.constraints();
  st.store_delta.assign(cs.begin() + static_cast<std::ptrdiff_t>(before_size), cs.end());
  return st;
}

std::optional<std::pair<std::string, Path>> Rewriter::peek(const ConstraintStore &store,
                                                           const TermPtr &t) {
  Search s(*this, store);
  Path prefix;
  auto found = find_redex(s, t, prefix);
  if (!found)
    return std::nullopt;
  Path p = found->branch;
  p.insert(p.end(), found->cand.rpath.begin(), found->cand.rpath.end());
  return std::make_pair(std::string(found->cand.rule), p);
}

NormalizeResult normalize(Level level, ConstraintStore store, TermPtr t,
                          const ImplicationEnv &env, const TransformConfig &cfg,
                          bool keep_trace) {
  Rewriter rw(level, env, cfg);
  NormalizeResult out;
  for (;;) {
    auto st = rw.step(store, t);
    if (!st)
      break;
    ++out.steps;
    out.branches_max = std::max(out.branches_max, count_branches(t));
    if (keep_trace)
      out.trace.push_back(std::move(*st));
    if (out.steps >= cfg.step_cap)
      throw StepBudgetExceeded("normalization exceeded " + std::to_string(cfg.step_cap) +
                               " steps");
  }
  out.store = std::move(store);
  out.term = std::move(t);
  out.warnings = rw.warnings();
  return out;
}

} // namespace lcon
