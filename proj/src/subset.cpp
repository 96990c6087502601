// SPDX-License-Identifier: Apache-2.0
#include "lcon/subset.hpp"

namespace lcon {

std::optional<TransformStep> subset_step(ConstraintStore &store, TermPtr &t,
                                         const ImplicationEnv &env,
                                         const TransformConfig &cfg) {
  Rewriter rw(Level::Subset, env, cfg);
  return rw.step(store, t);
}

NormalizeResult subset_normalize(ConstraintStore store, TermPtr t, const ImplicationEnv &env,
                                 const TransformConfig &cfg, bool keep_trace) {
  return normalize(Level::Subset, std::move(store), std::move(t), env, cfg, keep_trace);
}

namespace {

const node::Assert *var_frame(const TermPtr &t) {
  auto a = as<node::Assert>(t);
  return a && a->var ? a : nullptr;
}

bool outer_delayed(const TermPtr &t) {
  auto a = var_frame(t);
  return a && is_delayed(a->contract);
}

bool flat_like(const ContractPtr &c) { return as<cnode::Flat>(c) || as<cnode::Named>(c); }

bool fun_with_top_dom(const ContractPtr &c) {
  auto f = as<cnode::Fun>(c);
  return f && as<cnode::Top>(f->dom);
}
bool fun_with_top_rng(const ContractPtr &c) {
  auto f = as<cnode::Fun>(c);
  return f && as<cnode::Top>(f->rng);
}

class Grammar {
public:
  Grammar(const ConstraintStore &store, const ImplicationEnv &env, std::uint64_t fuel)
      : store_(store), sub_(env), fuel_(fuel) {}

  Canonicity run(const TermPtr &t) {
    leaf(t);
    return bad_ ? *bad_ : Canonicity{};
  }

private:
  bool fail(const char *rule, const Path &extra = {}) {
    if (!bad_) {
      Path p = path_;
      p.insert(p.end(), extra.begin(), extra.end());
      bad_ = Canonicity{false, rule, p};
    }
    return false;
  }

  bool sub(std::size_t i, const TermPtr &t) {
    path_.push_back(i);
    bool ok = term(t);
    path_.pop_back();
    return ok;
  }

  // A fork leaf: the whole term, plus the root-only global blame check.
  bool leaf(const TermPtr &t) {
    if (auto f = as<node::Fork>(t)) {
      path_.push_back(0);
      bool ok = leaf(f->left);
      path_.pop_back();
      if (!ok)
        return false;
      path_.push_back(1);
      ok = leaf(f->right);
      path_.pop_back();
      return ok;
    }
    if (!term(t))
      return false;
    if (auto p = blame_site(t, true))
      return fail("Blame/Global", *p);
    return true;
  }

  bool blame_var(VarId v) {
    try {
      blame_of(BlameId::of_var(v), store_);
      return true;
    } catch (const OrphanVariable &) {
      return false;
    }
  }

  // Positions reachable through the body context of a canonical term.
  template <class P> std::optional<Path> search(const TermPtr &t, const P &pred, bool root) {
    if (pred(t, root))
      return Path{};
    auto down = [&](std::size_t i, const TermPtr &c) -> std::optional<Path> {
      auto r = search(c, pred, false);
      if (r)
        r->insert(r->begin(), i);
      return r;
    };
    if (auto n = as<node::App>(t)) {
      if (auto r = down(0, n->fn))
        return r;
      return down(1, n->arg);
    }
    if (auto n = as<node::Prim>(t)) {
      for (std::size_t i = 0; i < n->args.size(); ++i)
        if (auto r = down(i, n->args[i]))
          return r;
      return std::nullopt;
    }
    if (auto n = as<node::Assert>(t))
      return down(0, n->subject);
    if (auto n = as<node::If>(t))
      return down(0, n->test);
    return std::nullopt;
  }

  std::optional<Path> blame_site(const TermPtr &t, bool root_ok) {
    return search(
        t,
        [&](const TermPtr &n, bool root) {
          auto a = var_frame(n);
          if (!a || !as<cnode::Bot>(a->contract))
            return false;
          if (root && (!root_ok || as<node::Blame>(a->subject)))
            return false;
          return blame_var(*a->var);
        },
        true);
  }

  bool term(const TermPtr &t) {
    if (as<node::Const>(t) || as<node::Var>(t) || as<node::Blame>(t) || as<node::Check>(t))
      return true;
    if (as<node::Fork>(t))
      return fail("Fork");
    if (auto n = as<node::Lam>(t))
      return lam(*n);
    if (auto n = as<node::App>(t)) {
      if (!sub(0, n->fn) || !sub(1, n->arg))
        return false;
      if (auto a = var_frame(n->fn)) {
        if (as<cnode::Fun>(a->contract))
          return fail("Unfold/D-Function");
        if (as<cnode::Cap>(a->contract))
          return fail("Fork/Intersection");
      }
      TermPtr fn = n->fn;
      while (auto a = var_frame(fn)) {
        if (!as<cnode::Bot>(a->contract))
          break;
        fn = a->subject;
      }
      if (as<node::Lam>(fn) && outer_delayed(n->arg))
        return fail("Unroll");
      return true;
    }
    if (auto n = as<node::Prim>(t)) {
      for (std::size_t i = 0; i < n->args.size(); ++i) {
        if (!sub(i, n->args[i]))
          return false;
        if (outer_delayed(n->args[i]))
          return fail("Unfold/Op");
      }
      return true;
    }
    if (auto n = as<node::If>(t)) {
      if (!sub(0, n->test) || !sub(1, n->then_branch) || !sub(2, n->else_branch))
        return false;
      if (auto p = blame_site(n->then_branch, true)) {
        p->insert(p->begin(), 1);
        return fail("Blame/If/True", *p);
      }
      if (auto p = blame_site(n->else_branch, true)) {
        p->insert(p->begin(), 2);
        return fail("Blame/If/False", *p);
      }
      auto [ft, ct] = split_frames(n->then_branch);
      auto [fe, ce] = split_frames(n->else_branch);
      for (auto &a : ft)
        for (auto &b : fe)
          if (a.var && a.same(b))
            return fail("Push/If");
      return true;
    }
    return stack(t);
  }

  bool lam(const node::Lam &n) {
    if (!sub(0, n.body))
      return false;
    const std::string &x = n.param;
    if (blame_site_inner(n.body))
      return false;
    auto lift = search(
        n.body,
        [&](const TermPtr &m, bool) {
          auto a = var_frame(m);
          if (!a || !(flat_like(a->contract) || as<cnode::Bot>(a->contract)))
            return false;
          auto v = as<node::Var>(a->subject);
          return v && v->name == x;
        },
        true);
    if (lift) {
      lift->insert(lift->begin(), 0);
      return fail("Lift", *lift);
    }
    if (auto a = var_frame(n.body)) {
      auto v = as<node::Var>(a->subject);
      if (!(v && v->name == x))
        return fail("Lower");
    }
    return true;
  }

  // A violated false contract strictly inside a function body.
  bool blame_site_inner(const TermPtr &body) {
    auto p = search(
        body,
        [&](const TermPtr &m, bool root) {
          auto a = var_frame(m);
          return !root && a && as<cnode::Bot>(a->contract) && blame_var(*a->var);
        },
        true);
    if (!p)
      return false;
    p->insert(p->begin(), 0);
    return !fail("Blame", *p);
  }

  bool stack(const TermPtr &t) {
    auto [frames, core] = split_frames(t);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const ContractPtr &c = frames[i].contract;
      Path at(i, 0);
      if (frames[i].label)
        return fail("Unfold/Assert", at);
      if (as<cnode::Top>(c))
        return fail("Convert/True", at);
      if (as<cnode::Cup>(c))
        return fail("Fork/Union", at);
      if (auto k = as<cnode::Cap>(c))
        if (is_immediate(k->left) || is_immediate(k->right))
          return fail("Unfold/Intersection", at);
    }
    if (!sub_core(frames.size(), core))
      return false;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      for (std::size_t j = i + 1; j < frames.size(); ++j) {
        const ContractPtr &c = frames[i].contract, &d = frames[j].contract;
        if (!is_delayed(c) && is_delayed(d))
          return fail(as<cnode::Bot>(c) ? "Push/False" : "Push/Immediate", Path(i, 0));
        if (subset_keeps_outer(sub_, c, d))
          return fail("Subset", Path(i, 0));
        if ((fun_with_top_dom(c) && fun_with_top_rng(d)) ||
            (fun_with_top_rng(c) && fun_with_top_dom(d)))
          if (same_root(*frames[i].var, *frames[j].var))
            return fail("Merge", Path(i, 0));
      }
    }
    // Immediate contracts over a value must have been undecidable.
    bool value_core = as<node::Const>(core) || as<node::Lam>(core);
    for (std::size_t i = frames.size(); value_core && i-- > 0;) {
      const ContractPtr &c = frames[i].contract;
      if (as<cnode::Bot>(c))
        continue;
      if (flat_like(c) && verify_predicate(c, core, fuel_) != VerifyResult::Unknown)
        return fail("Verify", Path(i, 0));
      break;
    }
    return true;
  }

  bool sub_core(std::size_t depth, const TermPtr &core) {
    for (std::size_t i = 0; i < depth; ++i)
      path_.push_back(0);
    bool ok = term(core);
    path_.resize(path_.size() - depth);
    return ok;
  }

  bool same_root(VarId a, VarId b) {
    try {
      return alpha_equal(blame_of(BlameId::of_var(a), store_),
                         blame_of(BlameId::of_var(b), store_));
    } catch (const OrphanVariable &) {
      return false;
    }
  }

  const ConstraintStore &store_;
  Subcontract sub_;
  std::uint64_t fuel_;
  Path path_;
  std::optional<Canonicity> bad_;
};

} // namespace

Canonicity is_canonical_subset(const TermPtr &t, const ConstraintStore &store,
                               const ImplicationEnv &env, std::uint64_t verify_fuel) {
  return Grammar(store, env, verify_fuel).run(t);
}

} // namespace lcon
