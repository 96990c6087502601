// SPDX-License-Identifier: Apache-2.0
#include "lcon/difftest.hpp"

#include "lcon/syntax.hpp"

#include <sstream>

namespace lcon {

const char *verdict_name(Verdict v) {
  switch (v) {
  case Verdict::StrongOk:
    return "strong-ok";
  case Verdict::WeakOk:
    return "weak-ok";
  case Verdict::Violation:
    return "violation";
  case Verdict::Inconclusive:
    return "inconclusive";
  }
  return "?";
}

CallCounts call_counts(const TermPtr &program, const TermPtr &arg, const ImplicationEnv &env,
                       std::uint64_t fuel) {
  auto call = [&](const TermPtr &p) { return arg ? mk::app(p, arg) : p; };
  CallCounts r;
  r.original = run(call(program), fuel);
  auto b = baseline_normalize({}, program, env);
  r.baseline = run(call(b.term), fuel, b.store);
  auto s = optimize(program, env);
  r.subset = run(call(s.term), fuel, s.store);
  return r;
}

std::string describe(const Outcome &o) {
  switch (o.kind) {
  case Outcome::Kind::Value:
    return "value " + print(unwrap(o.term));
  case Outcome::Kind::Blame:
    return std::string("blame #") + o.blame.label +
           (o.blame.polarity == Polarity::Positive ? " +" : " -");
  case Outcome::Kind::Stuck:
    return "stuck";
  case Outcome::Kind::OutOfFuel:
    return "out_of_fuel";
  }
  return "?";
}

namespace {

void classify(DiffReport &r) {
  const Outcome &a = r.original, &b = r.transformed;
  using K = Outcome::Kind;
  if (a.kind == K::OutOfFuel || b.kind == K::OutOfFuel) {
    r.verdict = Verdict::Inconclusive;
    r.detail = "fuel exhausted";
    return;
  }
  auto violate = [&](const char *kind) {
    r.verdict = Verdict::Violation;
    r.violation = kind;
    r.detail = describe(a) + " vs " + describe(b);
  };
  if (a.kind != b.kind)
    return violate("outcome-class");
  if (a.kind == K::Value && !same_value(a.term, b.term))
    return violate("value");
  bool identical = a.kind != K::Blame || a.blame == b.blame;
  if (r.level == Level::Baseline && !identical)
    return violate("blame-label");
  if (r.checks_transformed > r.checks_original) {
    r.verdict = Verdict::Violation;
    r.violation = "improvement";
    r.detail = std::to_string(r.checks_original) + " -> " + std::to_string(r.checks_transformed);
    return;
  }
  if (!r.canonical) {
    r.verdict = Verdict::Violation;
    r.violation = "non-canonical";
    return;
  }
  r.verdict = identical ? Verdict::StrongOk : Verdict::WeakOk;
  if (r.level == Level::Subset && r.verdict == Verdict::StrongOk)
    r.verdict = Verdict::WeakOk;
}

} // namespace

DiffReport diff(const TermPtr &program, Level level, const ImplicationEnv &env,
                const DiffOptions &opt, const std::string &id) {
  DiffReport r;
  r.program = id.empty() ? print(program) : id;
  r.level = level;
  r.original = run(program, opt.fuel);
  r.checks_original = r.original.predicate_checks;
  ConstraintStore store;
  try {
    if (level == Level::Baseline) {
      auto n = baseline_normalize({}, program, env, opt.transform);
      r.output = n.term;
      r.steps = n.steps;
      r.warnings = n.warnings;
      store = n.store;
      auto c = is_canonical_baseline(n.term, opt.transform.verify_fuel);
      r.canonical = c.canonical;
      if (!c.canonical)
        r.detail = c.rule + " at " + print_path(c.path);
    } else {
      auto n = subset_normalize({}, program, env, opt.transform);
      r.steps = n.steps;
      r.warnings = n.warnings;
      auto c = is_canonical_subset(n.term, n.store, env, opt.transform.verify_fuel);
      r.canonical = c.canonical;
      if (!c.canonical)
        r.detail = c.rule + " at " + print_path(c.path);
      store = n.store;
      TermPtr t = n.term;
      if (opt.join) {
        t = condense_all(store, join_all(t, nullptr, &store));
      } else if (contains_fork(t)) {
        // Without join only a single observation can be run.
        r.verdict = Verdict::Inconclusive;
        r.detail = "forked output not joined";
        r.output = t;
        return r;
      }
      r.output = t;
    }
  } catch (const std::exception &e) {
    r.verdict = Verdict::Violation;
    r.violation = "transform-error";
    r.detail = e.what();
    return r;
  }
  std::string saved = r.detail;
  r.transformed = run(r.output, opt.fuel, store);
  r.checks_transformed = r.transformed.predicate_checks;
  classify(r);
  if (r.detail.empty())
    r.detail = saved;
  return r;
}

std::string report_line(const DiffReport &r) {
  std::ostringstream out;
  out << verdict_name(r.verdict);
  if (!r.violation.empty())
    out << "(" << r.violation << ")";
  out << " level=" << level_name(r.level) << " original=[" << describe(r.original)
      << "] transformed=[" << describe(r.transformed) << "] checks=" << r.checks_original
      << "->" << r.checks_transformed;
  if (!r.detail.empty())
    out << " detail=" << r.detail;
  return out.str();
}

// ---- generator ----

struct ProgramGenerator::Type {
  enum class K { Num, Str, Bool, Fun } k;
  TypeP dom, rng;
};

ProgramGenerator::ProgramGenerator(std::uint64_t seed, int term_depth, int contract_depth,
                                   int label_budget)
    : rng_(seed), term_depth_(term_depth), contract_depth_(contract_depth),
      label_budget_(label_budget) {}

bool ProgramGenerator::chance(double p) {
  return std::uniform_real_distribution<double>(0, 1)(rng_) < p;
}

int ProgramGenerator::pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

std::string ProgramGenerator::fresh(const char *base) {
  return std::string(base) + std::to_string(++names_);
}

namespace {

const char *kSmall[] = {"a", "b"};

} // namespace

ProgramGenerator::TypeP ProgramGenerator::random_arg_type(int depth) {
  static const TypeP num = std::make_shared<Type>(Type{Type::K::Num, nullptr, nullptr});
  static const TypeP str = std::make_shared<Type>(Type{Type::K::Str, nullptr, nullptr});
  int r = pick(20);
  if (r < 13 || depth < 2)
    return r < 16 ? num : str;
  if (r < 16)
    return str;
  return std::make_shared<Type>(Type{Type::K::Fun, num, num});
}

std::optional<TermPtr> ProgramGenerator::pick_var(const TypeP &t,
                                                  const std::vector<Binding> &env) {
  std::vector<const Binding *> hits;
  for (auto &b : env) {
    bool same = b.type->k == t->k;
    if (same && t->k == Type::K::Fun)
      same = b.type->dom->k == t->dom->k && b.type->rng->k == t->rng->k;
    if (same)
      hits.push_back(&b);
  }
  if (hits.empty())
    return std::nullopt;
  // Later bindings shadow earlier ones with the same name, so names are
  // unique by construction.
  return mk::var(hits[static_cast<std::size_t>(pick(static_cast<int>(hits.size())))]->name);
}

TermPtr ProgramGenerator::leaf(const TypeP &t, std::vector<Binding> &env) {
  if (chance(0.5))
    if (auto v = pick_var(t, env))
      return *v;
  switch (t->k) {
  case Type::K::Num:
    return mk::num(pick(7) - 3);
  case Type::K::Str:
    return mk::str(kSmall[pick(2)]);
  case Type::K::Bool:
    return mk::boolean(chance(0.5));
  case Type::K::Fun: {
    std::string x = fresh("x");
    env.push_back({x, t->dom});
    TermPtr body = leaf(t->rng, env);
    env.pop_back();
    return mk::lam(x, body);
  }
  }
  return mk::num(0);
}

ContractPtr ProgramGenerator::immediate(const TypeP &t, const std::string &dep_var) {
  static const OpKind cmp[] = {OpKind::Lt, OpKind::Gt, OpKind::Le, OpKind::Ge, OpKind::Eq};
  if (t->k == Type::K::Str) {
    switch (pick(6)) {
    case 0:
    case 1:
    case 2:
      return mk::named(NamedPred::String);
    case 3:
      return mk::named(NamedPred::Number);
    default:
      return mk::flat(mk::lam("v", mk::prim(OpKind::Eq, mk::var("v"), mk::str(kSmall[pick(2)]))));
    }
  }
  if (t->k == Type::K::Bool)
    return mk::named(chance(0.5) ? NamedPred::Number : NamedPred::String);
  // Weighted towards contracts that hold, so that enough runs end in a
  // value.
  switch (pick(12)) {
  case 0:
  case 1:
  case 2:
  case 3:
    return mk::named(NamedPred::Number);
  case 4:
    return mk::named(NamedPred::Positive);
  case 5:
    return mk::named(NamedPred::Natural);
  case 6:
    return mk::named(NamedPred::Negative);
  case 7:
    return mk::named(NamedPred::String);
  default: {
    TermPtr rhs = !dep_var.empty() && chance(0.5) ? mk::var(dep_var) : mk::num(pick(5) - 2);
    return mk::flat(mk::lam("v", mk::prim(cmp[pick(5)], mk::var("v"), rhs)));
  }
  }
}

ContractPtr ProgramGenerator::contract(const TypeP &t, int depth, const std::string &dep_var) {
  if (depth > 0 && chance(0.3)) {
    auto l = contract(t, depth - 1, dep_var), r = contract(t, depth - 1, dep_var);
    return normalize_intersections(chance(0.5) ? mk::cap(l, r) : mk::cup(l, r));
  }
  if (t->k != Type::K::Fun)
    return immediate(t, dep_var);
  int d = std::max(depth - 1, 0);
  if (t->dom->k == Type::K::Num && chance(0.2)) {
    std::string x = fresh("d");
    return mk::dep(x, contract(t->rng, d, x));
  }
  return mk::fun(contract(t->dom, d, ""), contract(t->rng, d, dep_var));
}

TermPtr ProgramGenerator::term(const TypeP &t, std::vector<Binding> &env, int depth) {
  static const TypeP num = std::make_shared<Type>(Type{Type::K::Num, nullptr, nullptr});
  static const TypeP str = std::make_shared<Type>(Type{Type::K::Str, nullptr, nullptr});
  if (depth <= 0)
    return leaf(t, env);
  int choice = pick(10);
  // Assertion on any type.
  if (choice < 3 && labels_left_ > 0) {
    --labels_left_;
    std::string label = "l" + std::to_string(++label_seq_);
    return mk::assert_label(term(t, env, depth - 1), label,
                            contract(t, pick(contract_depth_ + 1), ""));
  }
  // Local binding: ((lam x body) arg), the shape that unrolling targets.
  if (choice < 5) {
    TypeP at = random_arg_type(depth);
    TermPtr arg = term(at, env, depth - 1);
    std::string x = fresh("x");
    env.push_back({x, at});
    TermPtr body = term(t, env, depth - 1);
    env.pop_back();
    return mk::app(mk::lam(x, body), arg);
  }
  // Application of a function expression.
  if (choice < 7 && t->k != Type::K::Bool) {
    TypeP at = random_arg_type(depth);
    auto ft = std::make_shared<Type>(Type{Type::K::Fun, at, t});
    return mk::app(term(ft, env, depth - 1), term(at, env, depth - 1));
  }
  if (choice < 8) {
    auto test = std::make_shared<Type>(Type{Type::K::Bool, nullptr, nullptr});
    return mk::if_(term(test, env, depth - 1), term(t, env, depth - 1), term(t, env, depth - 1));
  }
  switch (t->k) {
  case Type::K::Num: {
    static const OpKind ops[] = {OpKind::Add, OpKind::Sub, OpKind::Mul};
    return mk::prim(ops[pick(3)], term(t, env, depth - 1), term(t, env, depth - 1));
  }
  case Type::K::Str:
    return mk::prim(OpKind::Add, term(t, env, depth - 1), term(t, env, depth - 1));
  case Type::K::Bool: {
    static const OpKind cmp[] = {OpKind::Lt, OpKind::Gt, OpKind::Le, OpKind::Ge, OpKind::Eq};
    if (chance(0.2))
      return mk::prim(OpKind::Eq, term(str, env, depth - 1), term(str, env, depth - 1));
    return mk::prim(cmp[pick(5)], term(num, env, depth - 1), term(num, env, depth - 1));
  }
  case Type::K::Fun: {
    std::string x = fresh("x");
    env.push_back({x, t->dom});
    TermPtr body = term(t->rng, env, depth - 1);
    env.pop_back();
    return mk::lam(x, body);
  }
  }
  return leaf(t, env);
}

TermPtr ProgramGenerator::next() {
  static const TypeP num = std::make_shared<Type>(Type{Type::K::Num, nullptr, nullptr});
  static const TypeP str = std::make_shared<Type>(Type{Type::K::Str, nullptr, nullptr});
  names_ = 0;
  label_seq_ = 0;
  labels_left_ = 1 + pick(std::max(label_budget_, 1));
  std::vector<Binding> env;
  TypeP result = chance(0.85) ? num : str;
  // Most cases call a contracted function, as in the motivating programs.
  if (chance(0.6) && labels_left_ > 0) {
    TypeP at = random_arg_type(term_depth_);
    auto ft = std::make_shared<Type>(Type{Type::K::Fun, at, result});
    std::string x = fresh("x");
    env.push_back({x, at});
    TermPtr body = term(result, env, term_depth_ - 1);
    env.pop_back();
    --labels_left_;
    std::string label = "l" + std::to_string(++label_seq_);
    TermPtr f = mk::assert_label(mk::lam(x, body), label,
                                 contract(ft, pick(contract_depth_ + 1), ""));
    return mk::app(f, term(at, env, std::max(term_depth_ - 2, 0)));
  }
  return term(result, env, term_depth_);
}

// ---- shrinking ----

namespace {

void contract_variants(const ContractPtr &c, std::vector<ContractPtr> &out) {
  if (auto f = as<cnode::Fun>(c)) {
    std::vector<ContractPtr> d, r;
    contract_variants(f->dom, d);
    contract_variants(f->rng, r);
    for (auto &x : d)
      out.push_back(mk::fun(x, f->rng));
    for (auto &x : r)
      out.push_back(mk::fun(f->dom, x));
  } else if (auto k = as<cnode::Cap>(c)) {
    out.push_back(k->left);
    out.push_back(k->right);
  } else if (auto u = as<cnode::Cup>(c)) {
    out.push_back(u->left);
    out.push_back(u->right);
  } else if (auto dp = as<cnode::Dep>(c)) {
    std::vector<ContractPtr> b;
    contract_variants(dp->body, b);
    for (auto &x : b)
      out.push_back(mk::dep(dp->param, x));
  } else if (!as<cnode::Named>(c)) {
    out.push_back(mk::named(NamedPred::Number));
  }
}

// All terms obtained by one local simplification somewhere in t.
void variants(const TermPtr &t, std::vector<TermPtr> &out) {
  auto rebuild = [&](const std::vector<TermPtr> &kids, auto make) {
    for (std::size_t i = 0; i < kids.size(); ++i) {
      std::vector<TermPtr> sub;
      variants(kids[i], sub);
      for (auto &s : sub) {
        auto k = kids;
        k[i] = s;
        out.push_back(make(k));
      }
    }
  };
  if (auto c = as<node::Const>(t)) {
    if (auto n = std::get_if<std::int64_t>(&c->value); n && *n != 0)
      out.push_back(mk::num(0));
    return;
  }
  if (auto n = as<node::Lam>(t)) {
    rebuild({n->body}, [&](auto &k) { return mk::lam(n->param, k[0]); });
  } else if (auto n = as<node::App>(t)) {
    out.push_back(n->fn);
    out.push_back(n->arg);
    if (auto l = as<node::Lam>(n->fn))
      out.push_back(substitute(l->body, l->param, n->arg));
    rebuild({n->fn, n->arg}, [](auto &k) { return mk::app(k[0], k[1]); });
  } else if (auto n = as<node::Prim>(t)) {
    for (auto &a : n->args)
      out.push_back(a);
    rebuild(n->args, [&](auto &k) { return mk::prim(n->op, k); });
  } else if (auto n = as<node::If>(t)) {
    out.push_back(n->then_branch);
    out.push_back(n->else_branch);
    rebuild({n->test, n->then_branch, n->else_branch},
            [](auto &k) { return mk::if_(k[0], k[1], k[2]); });
  } else if (auto n = as<node::Assert>(t)) {
    out.push_back(n->subject);
    std::vector<ContractPtr> cs;
    contract_variants(n->contract, cs);
    for (auto &c : cs)
      out.push_back(mk::assert_label(n->subject, *n->label, normalize_intersections(c)));
    rebuild({n->subject}, [&](auto &k) { return mk::assert_label(k[0], *n->label, n->contract); });
  }
}

} // namespace

TermPtr shrink(const TermPtr &t, const std::function<bool(const TermPtr &)> &fails,
               std::size_t max_rounds) {
  TermPtr cur = t;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    std::vector<TermPtr> cands;
    variants(cur, cands);
    bool progressed = false;
    for (auto &c : cands) {
      if (!free_vars(c).empty() || term_size(c) >= term_size(cur))
        continue;
      if (fails(c)) {
        cur = c;
        progressed = true;
        break;
      }
    }
    if (!progressed)
      break;
  }
  return cur;
}

FuzzSummary fuzz(const FuzzConfig &cfg, const ImplicationEnv &env, const DiffOptions &opt,
                 bool shrink_failures) {
  FuzzSummary s;
  ProgramGenerator gen(cfg.seed, cfg.term_depth, cfg.contract_depth, cfg.label_budget);
  for (std::size_t i = 0; i < cfg.cases; ++i) {
    TermPtr p = gen.next();
    DiffReport r = diff(p, cfg.level, env, opt, "case " + std::to_string(i));
    ++s.cases;
    s.checks_original += r.checks_original;
    s.checks_transformed += r.checks_transformed;
    s.max_steps = std::max(s.max_steps, r.steps);
    if (!r.canonical)
      ++s.non_canonical;
    switch (r.original.kind) {
    case Outcome::Kind::Value:
      ++s.values;
      break;
    case Outcome::Kind::Blame:
      ++s.blames;
      break;
    default:
      ++s.stuck;
    }
    switch (r.verdict) {
    case Verdict::StrongOk:
      ++s.strong_ok;
      break;
    case Verdict::WeakOk:
      ++s.weak_ok;
      break;
    case Verdict::Inconclusive:
      ++s.inconclusive;
      break;
    case Verdict::Violation: {
      ++s.violations;
      TermPtr small = p;
      if (shrink_failures) {
        std::string kind = r.violation;
        auto orig = r.original.kind;
        // Keep the original outcome class so shrinking cannot trade the
        // failure for one caused by an ill-typed candidate.
        small = shrink(p, [&](const TermPtr &c) {
          auto rr = diff(c, cfg.level, env, opt);
          return rr.verdict == Verdict::Violation && rr.violation == kind &&
                 rr.original.kind == orig;
        });
      }
      s.failures.push_back({i, std::move(r), small});
      break;
    }
    }
  }
  return s;
}

std::string summary_text(const FuzzSummary &s, const FuzzConfig &cfg) {
  std::ostringstream out;
  out << "fuzz seed=" << cfg.seed << " level=" << level_name(cfg.level) << " cases=" << s.cases
      << "\n";
  out << "  strong-ok=" << s.strong_ok << " weak-ok=" << s.weak_ok
      << " violations=" << s.violations << " inconclusive=" << s.inconclusive << "\n";
  out << "  original outcomes: value=" << s.values << " blame=" << s.blames
      << " stuck/fuel=" << s.stuck << "\n";
  out << "  predicate checks: " << s.checks_original << " -> " << s.checks_transformed
      << "  max normalization steps=" << s.max_steps << "\n";
  for (const auto &f : s.failures) {
    out << "  case " << f.index << ": " << report_line(f.report) << "\n";
    out << "    program: " << print(f.shrunk) << "\n";
  }
  return out.str();
}

} // namespace lcon
