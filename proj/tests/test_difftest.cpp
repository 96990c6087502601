// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <doctest.h>

using namespace lcon;
using namespace lcon::testing;

TEST_CASE("the generator is deterministic and closed") {
  ProgramGenerator a(9, 4, 2, 4), b(9, 4, 2, 4);
  for (int i = 0; i < 50; ++i) {
    auto x = a.next(), y = b.next();
    CHECK(lcon::print(x) == lcon::print(y));
    CHECK(free_vars(x).empty());
    CHECK(is_source_term(x));
  }
}

TEST_CASE("generated programs terminate") {
  ProgramGenerator g(1, 4, 2, 4);
  for (int i = 0; i < 200; ++i) {
    auto o = run(g.next());
    CHECK(o.kind != Outcome::Kind::OutOfFuel);
    CHECK(o.kind != Outcome::Kind::Stuck);
  }
}

TEST_CASE("per-call counts simplify the program alone") {
  auto env = ImplicationEnv::defaults();
  auto c1 = call_counts(corpus("addOne1"), mk::num(5), env);
  CHECK(c1.original.predicate_checks == 3);
  CHECK(c1.baseline.predicate_checks == 2);
  CHECK(c1.subset.predicate_checks == 2);
  auto c2 = call_counts(corpus("addOne2"), mk::num(5), env);
  CHECK(c2.original.predicate_checks == 6);
  CHECK(c2.baseline.predicate_checks == 4);
  CHECK(c2.subset.predicate_checks == 2);
  CHECK(c2.subset.kind == Outcome::Kind::Value);
  CHECK(lcon::print(c2.subset.term) == "6");
}

TEST_CASE("diff classifies a mismatch") {
  auto env = ImplicationEnv::defaults();
  auto r = diff(corpus("blame_range"), Level::Baseline, env);
  CHECK(r.verdict == Verdict::StrongOk);
  CHECK(r.original.kind == Outcome::Kind::Blame);
  CHECK(report_line(r).find("strong") != std::string::npos);
}

TEST_CASE("shrinking keeps the property") {
  auto t = parse_term("((lam x (+ x 1)) ((lam y (+ y 2)) 3))");
  auto small = shrink(t, [](const TermPtr &c) { return term_size(c) >= 3; });
  CHECK(term_size(small) >= 3);
  CHECK(term_size(small) <= term_size(t));
}

TEST_CASE("a short fuzz run is clean at baseline") {
  FuzzConfig cfg;
  cfg.cases = 300;
  cfg.seed = 5;
  auto s = fuzz(cfg, ImplicationEnv::defaults());
  CHECK(s.cases == 300);
  CHECK(s.violations == 0);
  CHECK(s.non_canonical == 0);
  CHECK(s.strong_ok + s.inconclusive == 300);
  CHECK(s.checks_transformed <= s.checks_original);
}

TEST_CASE("a short fuzz run keeps outcomes at subset") {
  FuzzConfig cfg;
  cfg.cases = 300;
  cfg.seed = 5;
  cfg.level = Level::Subset;
  auto s = fuzz(cfg, ImplicationEnv::defaults(), {}, false);
  for (const auto &f : s.failures) {
    INFO(report_line(f.report));
    CHECK(f.report.violation == "improvement");
    CHECK(f.report.original.kind == Outcome::Kind::Blame);
  }
  CHECK(s.non_canonical == 0);
}
