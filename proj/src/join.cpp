// SPDX-License-Identifier: Apache-2.0
#include "lcon/join.hpp"

#include "lcon/syntax.hpp"

#include <algorithm>
#include <set>

namespace lcon {

namespace {

bool same_frames(const std::vector<Frame> &a, const std::vector<Frame> &b) {
  if (a.size() != b.size())
    return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].same(b[i]))
      return false;
  return true;
}

// Renames the binder of a right-hand lambda to the left-hand name.
TermPtr align_body(const node::Lam &l, const node::Lam &r) {
  if (l.param == r.param)
    return r.body;
  if (free_vars(r.body).count(l.param))
    throw JoinStuck("binder " + l.param + " would capture a free variable");
  return substitute(r.body, r.param, mk::var(l.param));
}

bool equiv(const TermPtr &m, Path &pm, const TermPtr &n, Path &pn, EquivWitness &w) {
  auto [fm, cm] = split_frames(m);
  auto [fn, cn] = split_frames(n);
  Path qm = pm, qn = pn;
  qm.insert(qm.end(), fm.size(), 0);
  qn.insert(qn.end(), fn.size(), 0);
  if (as<node::Blame>(cm) || as<node::Blame>(cn)) {
    w.positions.emplace_back(qm, qn);
    return true;
  }
  if (!same_frames(fm, fn))
    w.positions.emplace_back(qm, qn);
  if (cm->v.index() != cn->v.index())
    return false;
  auto kid = [&](std::size_t i, const TermPtr &a, const TermPtr &b) {
    qm.push_back(i);
    qn.push_back(i);
    bool ok = equiv(a, qm, b, qn, w);
    qm.pop_back();
    qn.pop_back();
    return ok;
  };
  if (auto a = as<node::Const>(cm))
    return a->value == as<node::Const>(cn)->value;
  if (auto a = as<node::Var>(cm))
    return a->name == as<node::Var>(cn)->name;
  if (auto a = as<node::Lam>(cm)) {
    auto b = as<node::Lam>(cn);
    try {
      return kid(0, a->body, align_body(*a, *b));
    } catch (const JoinStuck &) {
      return false;
    }
  }
  if (auto a = as<node::App>(cm)) {
    auto b = as<node::App>(cn);
    return kid(0, a->fn, b->fn) && kid(1, a->arg, b->arg);
  }
  if (auto a = as<node::Prim>(cm)) {
    auto b = as<node::Prim>(cn);
    if (a->op != b->op || a->args.size() != b->args.size())
      return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
      if (!kid(i, a->args[i], b->args[i]))
        return false;
    return true;
  }
  if (auto a = as<node::If>(cm)) {
    auto b = as<node::If>(cn);
    return kid(0, a->test, b->test) && kid(1, a->then_branch, b->then_branch) &&
           kid(2, a->else_branch, b->else_branch);
  }
  return alpha_equal(erase_contracts(cm), erase_contracts(cn));
}

} // namespace

std::optional<EquivWitness> struct_equiv(const TermPtr &m, const TermPtr &n) {
  EquivWitness w;
  Path pm, pn;
  if (!equiv(m, pm, n, pn, w))
    return std::nullopt;
  return w;
}

std::vector<Frame> ctx_join(const std::vector<Frame> &a, const std::vector<Frame> &b,
                            bool b_inside, const FrameTwin &twin) {
  // Walk both stacks from the hole outwards. Shared frames are emitted
  // once and keep their depth; twins are emitted side by side. Between two
  // anchors the remaining frames are interleaved level by level, the
  // inside side first.
  std::vector<Frame> ai(a.rbegin(), a.rend()), bi(b.rbegin(), b.rend());
  auto match = [&](const Frame &f, const Frame &g) { return f.same(g) || (twin && twin(f, g)); };
  auto has_from = [&](const std::vector<Frame> &v, std::size_t from, const Frame &f) {
    return std::any_of(v.begin() + static_cast<long>(from), v.end(),
                       [&](const Frame &g) { return match(g, f); });
  };
  std::vector<Frame> inner_first, pa, pb;
  auto emit = [&](const Frame &f) {
    if (std::none_of(inner_first.begin(), inner_first.end(), [&](const Frame &g) { return g.same(f); }))
      inner_first.push_back(f);
  };
  auto flush = [&] {
    auto &first = b_inside ? pb : pa, &second = b_inside ? pa : pb;
    for (std::size_t k = 0; k < std::max(first.size(), second.size()); ++k) {
      if (k < first.size())
        emit(first[k]);
      if (k < second.size())
        emit(second[k]);
    }
    pa.clear();
    pb.clear();
  };
  std::size_t i = 0, j = 0;
  while (i < ai.size() || j < bi.size()) {
    if (i < ai.size() && j < bi.size() && match(ai[i], bi[j])) {
      flush();
      emit(b_inside ? bi[j] : ai[i]);
      emit(b_inside ? ai[i] : bi[j]);
      ++i, ++j;
    } else if (j < bi.size() && !has_from(ai, i, bi[j])) {
      pb.push_back(bi[j++]);
    } else if (i < ai.size()) {
      pa.push_back(ai[i++]);
    } else {
      pb.push_back(bi[j++]);
    }
  }
  flush();
  return {inner_first.rbegin(), inner_first.rend()};
}

namespace {

void bump(RuleCounts *counts, const char *rule) {
  if (counts)
    ++(*counts)[rule];
}

// Where each blame variable hangs in the store: its oldest parent, the
// parent's constraint kind, the child side, and whether the edge flips
// polarity.
struct Edge {
  BlameId parent;
  Constraint::Kind kind;
  int side;
  bool flips;
};

class Ancestry {
public:
  explicit Ancestry(const ConstraintStore *store) {
    if (!store)
      return;
    for (const Constraint &c : store->constraints()) {
      auto note = [&](VarId v, int side, bool flips) {
        if (v)
          up_.emplace(v, Edge{c.id, c.kind, side, flips});
      };
      switch (c.kind) {
      case Constraint::Kind::Indirection:
        note(c.a, 0, false);
        break;
      case Constraint::Kind::Inversion:
        note(c.a, 0, true);
        break;
      case Constraint::Kind::Function:
        note(c.a, 0, true);
        note(c.b, 1, false);
        if (!c.id.is_label())
          unfolded_.emplace(c.id.var, std::make_pair(c.a, c.b));
        break;
      case Constraint::Kind::Intersection:
      case Constraint::Kind::Union:
        note(c.a, 0, false);
        note(c.b, 1, false);
        break;
      case Constraint::Kind::Outcome:
        break;
      }
    }
  }

  // True when, at the split that separates the two variables, the left
  // operand's frames are checked before the right operand's. Run time
  // checks the left operand first at even polarity below the split and
  // the right one first at odd polarity.
  std::optional<bool> left_first(VarId l, VarId r) const {
    struct Step {
      BlameId node;
      int side;
      bool odd;
      Constraint::Kind kind;
    };
    auto chain = [&](VarId v) {
      std::vector<Step> out;
      BlameId cur = BlameId::of_var(v);
      bool odd = false;
      for (std::size_t guard = 0; guard < up_.size() + 1 && !cur.is_label(); ++guard) {
        auto it = up_.find(cur.var);
        if (it == up_.end())
          break;
        out.push_back({it->second.parent, it->second.side, odd, it->second.kind});
        odd ^= it->second.flips;
        cur = it->second.parent;
      }
      return out;
    };
    auto cl = chain(l), cr = chain(r);
    for (const Step &a : cl)
      for (const Step &b : cr)
        if (a.node == b.node) {
          bool split = (a.kind == Constraint::Kind::Union ||
                        a.kind == Constraint::Kind::Intersection) &&
                       a.side == 0 && b.side == 1;
          if (!split)
            return std::nullopt;
          return !a.odd;
        }
    return std::nullopt;
  }

  // True when v sits under one of the roots through range and
  // indirection edges only, so a false contract on v just repeats theirs.
  bool derived_from(VarId v, const std::set<VarId> &roots) const {
    for (std::size_t guard = 0; guard <= up_.size(); ++guard) {
      if (roots.count(v))
        return true;
      auto it = up_.find(v);
      if (it == up_.end() || it->second.parent.is_label())
        return false;
      const Edge &e = it->second;
      bool range = e.kind == Constraint::Kind::Function && e.side == 1;
      if (!range && e.kind != Constraint::Kind::Indirection)
        return false;
      v = e.parent.var;
    }
    return false;
  }

  // Copies of one assertion made in different observations: both hang
  // directly off the same parent.
  bool twins(VarId u, VarId v) const {
    auto a = up_.find(u), b = up_.find(v);
    return a != up_.end() && b != up_.end() && a->second.kind == Constraint::Kind::Indirection &&
           b->second.kind == Constraint::Kind::Indirection && a->second.parent == b->second.parent;
  }

  // Domain and range variables of a function contract unfolded at
  // compile time.
  std::optional<std::pair<VarId, VarId>> unfolded(VarId v) const {
    auto it = unfolded_.find(v);
    if (it == unfolded_.end())
      return std::nullopt;
    return it->second;
  }

private:
  std::map<VarId, Edge> up_;
  std::map<VarId, std::pair<VarId, VarId>> unfolded_;
};

struct JoinCtx {
  RuleCounts *counts;
  Ancestry ancestry;
  // Variables of false contracts put back from a blame's origin.
  mutable std::set<VarId> restored;
};

// The false contracts a blame stood for, moved onto the matching
// positions of the other branch. Stops where the shapes part.
TermPtr graft(const TermPtr &t, const TermPtr &origin, const JoinCtx &cx) {
  auto [ft, ct] = split_frames(t);
  auto [fo, co] = split_frames(origin);
  std::vector<Frame> add;
  for (const Frame &f : fo)
    if (f.var && as<cnode::Bot>(f.contract) &&
        std::none_of(ft.begin(), ft.end(), [&](const Frame &g) { return g.same(f); }))
      add.push_back(f);
  TermPtr core = ct;
  if (ct->v.index() == co->v.index()) {
    if (auto a = as<node::Lam>(ct)) {
      core = mk::lam(a->param, graft(a->body, as<node::Lam>(co)->body, cx));
    } else if (auto a = as<node::App>(ct)) {
      auto b = as<node::App>(co);
      core = mk::app(graft(a->fn, b->fn, cx), graft(a->arg, b->arg, cx));
    } else if (auto a = as<node::Prim>(ct)) {
      auto b = as<node::Prim>(co);
      if (a->op == b->op && a->args.size() == b->args.size()) {
        std::vector<TermPtr> args;
        for (std::size_t i = 0; i < a->args.size(); ++i)
          args.push_back(graft(a->args[i], b->args[i], cx));
        core = mk::prim(a->op, std::move(args));
      }
    } else if (auto a = as<node::If>(ct)) {
      auto b = as<node::If>(co);
      core = mk::if_(graft(a->test, b->test, cx), graft(a->then_branch, b->then_branch, cx),
                     graft(a->else_branch, b->else_branch, cx));
    }
  }
  if (add.empty() && core == ct)
    return t;
  for (const Frame &f : add)
    cx.restored.insert(*f.var);
  // Restored frames go innermost, where they sat in the origin.
  std::vector<Frame> frames = add;
  frames.insert(frames.end(), ft.begin(), ft.end());
  return wrap_frames(frames, core);
}

bool false_chain(const ContractPtr &c) {
  if (as<cnode::Bot>(c))
    return true;
  auto f = as<cnode::Fun>(c);
  return f && as<cnode::Top>(f->dom) && false_chain(f->rng);
}

// Drops false frames that only repeat a restored contract.
std::vector<Frame> drop_restored(const std::vector<Frame> &fs, const JoinCtx &cx) {
  if (cx.restored.empty())
    return fs;
  std::vector<Frame> out;
  for (const Frame &f : fs)
    if (!(f.var && false_chain(f.contract) && !cx.restored.count(*f.var) &&
          cx.ancestry.derived_from(*f.var, cx.restored)))
      out.push_back(f);
  return out;
}

// The left branch's extra frames go inside unless the store shows that
// run time would reach the right branch's checks first.
// A function frame on one side's operator that the other side already
// unfolded at this application: its domain check sits on the other
// side's argument or its range check around the application, so keeping
// the frame would run both halves twice.
TermPtr drop_unfolded(const TermPtr &fn, const TermPtr &other_arg,
                      const std::vector<Frame> &other_outer, const JoinCtx &cx) {
  auto [frames, core] = split_frames(fn);
  auto arg_frames = split_frames(other_arg).first;
  auto has_var = [](const std::vector<Frame> &fs, VarId v) {
    return std::any_of(fs.begin(), fs.end(), [&](const Frame &g) { return g.var == v; });
  };
  std::vector<Frame> kept;
  for (const Frame &f : frames) {
    std::optional<std::pair<VarId, VarId>> u;
    if (f.var && as<cnode::Fun>(f.contract))
      u = cx.ancestry.unfolded(*f.var);
    if (!(u && (has_var(arg_frames, u->first) || has_var(other_outer, u->second))))
      kept.push_back(f);
  }
  if (kept.size() == frames.size())
    return fn;
  return wrap_frames(kept, core);
}

bool left_inside(const std::vector<Frame> &fl, const std::vector<Frame> &fr,
                 const JoinCtx &cx) {
  auto unique_var = [](const std::vector<Frame> &mine, const std::vector<Frame> &other)
      -> std::optional<VarId> {
    for (auto it = mine.rbegin(); it != mine.rend(); ++it)
      if (it->var && std::none_of(other.begin(), other.end(),
                                  [&](const Frame &g) { return g.same(*it); }))
        return it->var;
    return std::nullopt;
  };
  auto l = unique_var(fl, fr), r = unique_var(fr, fl);
  if (!l || !r)
    return true;
  return cx.ancestry.left_first(*l, *r).value_or(true);
}

TermPtr sync(const TermPtr &l, const TermPtr &r, const JoinCtx &cx) {
  RuleCounts *counts = cx.counts;
  auto [fl, cl] = split_frames(l);
  auto [fr, cr] = split_frames(r);
  TermPtr core;
  auto bl = as<node::Blame>(cl), br = as<node::Blame>(cr);
  if (bl || br) {
    if (bl && !br) {
      bump(counts, "Synchronize/Right");
      core = bl->origin ? graft(cr, bl->origin, cx) : cr;
    } else if (br && !bl) {
      bump(counts, "Synchronize/Left");
      core = br->origin ? graft(cl, br->origin, cx) : cl;
    } else {
      core = cl;
    }
  } else {
    if (cl->v.index() != cr->v.index())
      throw JoinStuck("branches differ in shape: " + print(cl) + " vs " + print(cr));
    if (auto a = as<node::Lam>(cl)) {
      core = mk::lam(a->param, sync(a->body, align_body(*a, *as<node::Lam>(cr)), cx));
    } else if (auto a = as<node::App>(cl)) {
      auto b = as<node::App>(cr);
      core = mk::app(sync(drop_unfolded(a->fn, b->arg, fr, cx), drop_unfolded(b->fn, a->arg, fl, cx), cx),
                     sync(a->arg, b->arg, cx));
    } else if (auto a = as<node::Prim>(cl)) {
      auto b = as<node::Prim>(cr);
      if (a->op != b->op || a->args.size() != b->args.size())
        throw JoinStuck("operators differ: " + print(cl) + " vs " + print(cr));
      std::vector<TermPtr> args;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        args.push_back(sync(a->args[i], b->args[i], cx));
      core = mk::prim(a->op, std::move(args));
    } else if (auto a = as<node::If>(cl)) {
      auto b = as<node::If>(cr);
      core = mk::if_(sync(a->test, b->test, cx), sync(a->then_branch, b->then_branch, cx),
                     sync(a->else_branch, b->else_branch, cx));
    } else if (alpha_equal(cl, cr)) {
      core = cl;
    } else {
      throw JoinStuck("branches differ: " + print(cl) + " vs " + print(cr));
    }
  }
  fl = drop_restored(fl, cx);
  fr = drop_restored(fr, cx);
  if (same_frames(fl, fr))
    return wrap_frames(fl, core);
  bump(counts, "Synchronize/Contract");
  FrameTwin twin = [&](const Frame &f, const Frame &g) {
    return f.var && g.var && alpha_equal(f.contract, g.contract) && cx.ancestry.twins(*f.var, *g.var);
  };
  return wrap_frames(ctx_join(fr, fl, left_inside(fl, fr, cx), twin), core);
}

TermPtr join_fork(const node::Fork &f, const JoinCtx &cx) {
  RuleCounts *counts = cx.counts;
  if (alpha_equal(f.left, f.right)) {
    bump(counts, "Match");
    return f.left;
  }
  bump(counts, "Join");
  return sync(f.left, f.right, cx);
}

std::optional<TermPtr> join_once(const TermPtr &t, const JoinCtx &cx) {
  auto f = as<node::Fork>(t);
  if (!f) {
    if (contains_fork(t))
      throw JoinStuck("fork below a branch root: " + print(t));
    return std::nullopt;
  }
  if (auto l = join_once(f->left, cx))
    return mk::fork(*l, f->right);
  if (auto r = join_once(f->right, cx))
    return mk::fork(f->left, *r);
  return join_fork(*f, cx);
}

} // namespace

std::optional<TermPtr> join_step(const TermPtr &t, RuleCounts *counts,
                                 const ConstraintStore *store) {
  return join_once(t, JoinCtx{counts, Ancestry(store)});
}

TermPtr join_all(TermPtr t, RuleCounts *counts, const ConstraintStore *store) {
  while (auto next = join_step(t, counts, store))
    t = *next;
  return t;
}

namespace {

// Removes the first outer frame that duplicates an inner one.
std::optional<TermPtr> condense_stack(ConstraintStore &store, const TermPtr &t) {
  auto [frames, core] = split_frames(t);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!frames[i].var)
      continue;
    for (std::size_t j = i + 1; j < frames.size(); ++j) {
      if (!frames[j].var || !alpha_equal(frames[i].contract, frames[j].contract))
        continue;
      store.add(Constraint::indirection(BlameId::of_var(*frames[i].var), *frames[j].var));
      frames.erase(frames.begin() + static_cast<std::ptrdiff_t>(i));
      return wrap_frames(frames, core);
    }
  }
  return std::nullopt;
}

std::optional<TermPtr> condense_in(ConstraintStore &store, const TermPtr &t) {
  if (as<node::Assert>(t)) {
    if (auto r = condense_stack(store, t))
      return r;
    auto [frames, core] = split_frames(t);
    if (auto r = condense_in(store, core))
      return wrap_frames(frames, *r);
    return std::nullopt;
  }
  if (auto n = as<node::Lam>(t)) {
    if (auto b = condense_in(store, n->body))
      return mk::lam(n->param, *b);
  } else if (auto n = as<node::App>(t)) {
    if (auto a = condense_in(store, n->fn))
      return mk::app(*a, n->arg);
    if (auto a = condense_in(store, n->arg))
      return mk::app(n->fn, *a);
  } else if (auto n = as<node::Prim>(t)) {
    for (std::size_t i = 0; i < n->args.size(); ++i)
      if (auto a = condense_in(store, n->args[i])) {
        auto args = n->args;
        args[i] = *a;
        return mk::prim(n->op, std::move(args));
      }
  } else if (auto n = as<node::If>(t)) {
    if (auto a = condense_in(store, n->test))
      return mk::if_(*a, n->then_branch, n->else_branch);
    if (auto a = condense_in(store, n->then_branch))
      return mk::if_(n->test, *a, n->else_branch);
    if (auto a = condense_in(store, n->else_branch))
      return mk::if_(n->test, n->then_branch, *a);
  }
  return std::nullopt;
}

} // namespace

std::optional<TermPtr> condense_step(ConstraintStore &store, const TermPtr &t) {
  return condense_in(store, t);
}

TermPtr condense_all(ConstraintStore &store, TermPtr t, RuleCounts *counts) {
  while (auto next = condense_step(store, t)) {
    bump(counts, "Condense");
    t = *next;
  }
  return t;
}

OptimizeResult optimize(const TermPtr &program, const ImplicationEnv &env,
                        const TransformConfig &cfg, bool keep_trace) {
  OptimizeResult out;
  out.report.predicates_before = count_predicates(program);
  auto norm = subset_normalize({}, program, env, cfg, true);
  for (const auto &st : norm.trace)
    ++out.report.rule_counts[st.rule];
  out.report.branches_max = norm.branches_max;
  out.report.warnings = norm.warnings;
  if (keep_trace)
    out.trace = std::move(norm.trace);
  out.store = std::move(norm.store);
  TermPtr t = join_all(norm.term, &out.report.rule_counts, &out.store);
  out.term = condense_all(out.store, t, &out.report.rule_counts);
  out.report.predicates_after = count_predicates(out.term);
  return out;
}

} // namespace lcon
