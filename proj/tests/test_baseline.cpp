// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <doctest.h>

using namespace lcon;
using namespace lcon::testing;

namespace {

NormalizeResult base(const TermPtr &t, bool trace = false) {
  static const ImplicationEnv env = ImplicationEnv::defaults();
  return baseline_normalize({}, t, env, {}, trace);
}

bool fired(const NormalizeResult &r, const std::string &rule) {
  return std::any_of(r.trace.begin(), r.trace.end(),
                     [&](const TransformStep &s) { return s.rule == rule; });
}

} // namespace

TEST_CASE("golden: curried number contract moves to the result") {
  auto r = base(corpus("addOne1"));
  CHECK(canon(r.term) == canon(golden("addOne1.baseline")));
  CHECK(is_canonical_baseline(r.term).canonical);
}

TEST_CASE("golden: both alternatives stay, the failed one as bot") {
  auto r = base(corpus("addOne2"));
  CHECK(canon(r.term) == canon(golden("addOne2.baseline")));
  CHECK(is_canonical_baseline(r.term).canonical);
}

TEST_CASE("the delayed contract is unrolled before it is unfolded") {
  auto r = base(corpus("addOne1"), true);
  REQUIRE(r.trace.size() >= 2);
  CHECK(fired(r, "Unroll"));
  CHECK(fired(r, "Verify/True"));
  auto unroll = std::find_if(r.trace.begin(), r.trace.end(),
                             [](const TransformStep &s) { return s.rule == "Unroll"; });
  auto unfold = std::find_if(r.trace.begin(), r.trace.end(), [](const TransformStep &s) {
    return s.rule.rfind("Unfold/D-Function", 0) == 0;
  });
  CHECK(unroll < unfold);
}

TEST_CASE("contract-free programs are already canonical") {
  auto t = corpus("contract_free");
  auto r = base(t);
  CHECK(alpha_equal(r.term, t));
  CHECK(r.steps == 0);
}

TEST_CASE("single steps reach the same normal form") {
  auto env = ImplicationEnv::defaults();
  TermPtr t = corpus("addOne2");
  ConstraintStore store;
  std::size_t n = 0;
  while (baseline_step(store, t, env))
    REQUIRE(++n < 10000);
  CHECK(canon(t) == canon(base(corpus("addOne2")).term));
}

TEST_CASE("baseline keeps outcomes and never adds checks on the corpus") {
  auto env = ImplicationEnv::defaults();
  for (const char *name :
       {"addOne1_call", "addOne2_call", "addOne3_call", "addOne4_call", "addOne5_call",
        "addOne6_call", "blame_domain", "blame_range", "blame_propagation_call", "contract_free_call"}) {
    auto r = diff(corpus(name), Level::Baseline, env);
    INFO(std::string(name) << ": " << report_line(r));
    CHECK(r.verdict == Verdict::StrongOk);
    CHECK(r.checks_transformed <= r.checks_original);
  }
}

TEST_CASE("the grammar check names the rule that still applies") {
  auto c = is_canonical_baseline(parse_term("(assert 1 @1 Number?)"));
  CHECK_FALSE(c.canonical);
  CHECK_FALSE(c.rule.empty());
  CHECK(is_canonical_baseline(parse_term("(assert 1 @1 bot)")).canonical);
}
