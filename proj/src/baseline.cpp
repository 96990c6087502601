// SPDX-License-Identifier: Apache-2.0
#include "lcon/baseline.hpp"

namespace lcon {

std::optional<TransformStep> baseline_step(ConstraintStore &store, TermPtr &t,
                                           const ImplicationEnv &env) {
  Rewriter rw(Level::Baseline, env);
  return rw.step(store, t);
}

NormalizeResult baseline_normalize(ConstraintStore store, TermPtr t,
                                   const ImplicationEnv &env, const TransformConfig &cfg,
                                   bool keep_trace) {
  return normalize(Level::Baseline, std::move(store), std::move(t), env, cfg, keep_trace);
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

// Value under zero or more false-contract wrappers (T_Val).
TermPtr under_bots(const TermPtr &t) {
  TermPtr cur = t;
  while (auto a = var_frame(cur)) {
    if (!as<cnode::Bot>(a->contract))
      break;
    cur = a->subject;
  }
  return cur;
}

bool is_tval(const TermPtr &t) {
  auto v = under_bots(t);
  return as<node::Const>(v) || as<node::Lam>(v);
}

class Grammar {
public:
  explicit Grammar(std::uint64_t fuel) : fuel_(fuel) {}

  Canonicity run(const TermPtr &t) {
    term(t);
    return bad_ ? *bad_ : Canonicity{};
  }

private:
  bool fail(const char *rule) {
    if (!bad_)
      bad_ = Canonicity{false, rule, path_};
    return false;
  }

  bool sub(std::size_t i, const TermPtr &t) {
    path_.push_back(i);
    bool ok = term(t);
    path_.pop_back();
    return ok;
  }

  bool term(const TermPtr &t) {
    if (as<node::Const>(t) || as<node::Var>(t) || as<node::Blame>(t) || as<node::Check>(t))
      return true;
    if (as<node::Fork>(t))
      return fail("Fork");
    if (auto n = as<node::Lam>(t)) {
      if (auto a = as<node::Assert>(n->body)) {
        path_.push_back(0);
        bool r = fail(a->label ? "Unfold/Assert" : "Lower");
        path_.pop_back();
        return r;
      }
      return sub(0, n->body);
    }
    if (auto n = as<node::App>(t)) {
      if (!sub(0, n->fn) || !sub(1, n->arg))
        return false;
      if (auto a = var_frame(n->fn)) {
        if (as<cnode::Fun>(a->contract))
          return fail("Unfold/D-Function");
        if (as<cnode::Cap>(a->contract))
          return fail("Unfold/D-Intersection");
      }
      // T_Abs applied to a delayed-wrapped argument.
      if (as<node::Lam>(under_bots(n->fn)) && outer_delayed(n->arg))
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
      auto a = var_frame(n->then_branch), b = var_frame(n->else_branch);
      if (a && b && *a->var == *b->var && alpha_equal(a->contract, b->contract))
        return fail("Push/If");
      return true;
    }
    auto a = as<node::Assert>(t);
    if (a->label)
      return fail("Unfold/Assert");
    const ContractPtr &c = a->contract;
    if (as<cnode::Top>(c))
      return fail("Convert/True");
    if (as<cnode::Cup>(c))
      return fail("Unfold/Union");
    if (auto k = as<cnode::Cap>(c))
      if (is_immediate(k->left) || is_immediate(k->right))
        return fail("Unfold/Intersection");
    if (!sub(0, a->subject))
      return false;
    if (as<cnode::Bot>(c))
      return outer_delayed(a->subject) ? fail("Push/False") : true;
    if (as<cnode::Flat>(c) || as<cnode::Named>(c)) {
      if (outer_delayed(a->subject))
        return fail("Push/Immediate");
      // Immediate contracts stay only on non-values, or when the check
      // could not be decided at compile time.
      if (is_tval(a->subject) &&
          verify_predicate(c, under_bots(a->subject), fuel_) != VerifyResult::Unknown)
        return fail("Verify");
      return true;
    }
    return true; // delayed: T_Q
  }

  std::uint64_t fuel_;
  Path path_;
  std::optional<Canonicity> bad_;
};

} // namespace

Canonicity is_canonical_baseline(const TermPtr &t, std::uint64_t verify_fuel) {
  return Grammar(verify_fuel).run(t);
}

} // namespace lcon
