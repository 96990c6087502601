// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <doctest.h>

using namespace lcon;
using namespace lcon::testing;

namespace {

const ImplicationEnv &env() {
  static const ImplicationEnv e = ImplicationEnv::defaults();
  return e;
}

} // namespace

TEST_CASE("golden: the failing alternative leaves only bot") {
  auto r = optimize(corpus("addOne2"), env());
  CHECK(canon(r.term) == canon(golden("addOne2.subset")));
}

TEST_CASE("golden: the positive contract subsumes the number halves") {
  auto r = optimize(corpus("addOne4"), env());
  CHECK(canon(r.term) == canon(golden("addOne4.subset")));
}

TEST_CASE("golden: blame travels to the outer boundary") {
  auto r = optimize(corpus("blame_propagation"), env());
  CHECK(canon(r.term) == canon(golden("blame_propagation.subset")));
}

TEST_CASE("intersections split into observations") {
  auto r = subset_normalize({}, corpus("addOne2"), env());
  CHECK(contains_fork(r.term));
  CHECK(count_branches(r.term) == 2);
  CHECK(is_canonical_subset(r.term, r.store, env()).canonical);
}

TEST_CASE("the report counts rules and predicates") {
  auto r = optimize(corpus("addOne2"), env());
  CHECK(r.report.predicates_before == 6);
  CHECK(r.report.predicates_after == 2);
  CHECK(r.report.rule_counts.count("Fork/Intersection"));
  CHECK(r.report.branches_max == 2);
}

TEST_CASE("stacked contracts collapse by subcontracting") {
  Subcontract sub(env());
  // Outer is tighter and no dearer: keep it at the inner position.
  CHECK(subset_keeps_outer(sub, parse_contract("Positive?"), parse_contract("Number?")) == true);
  // Inner already implies outer: drop the outer one.
  CHECK(subset_keeps_outer(sub, parse_contract("Number?"), parse_contract("Positive?")) == false);
  CHECK_FALSE(subset_keeps_outer(sub, parse_contract("String?"), parse_contract("Number?")));
  // Choices between delayed operands are left alone.
  CHECK_FALSE(subset_keeps_outer(sub, parse_contract("(cap (-> Number? Number?) (-> String? String?))"),
                                 parse_contract("(-> top top)")));
  CHECK(contract_checks(parse_contract("(-> Number? (cap Positive? top))")) == 2);
}

TEST_CASE("subset keeps outcome classes and values on the corpus") {
  for (const char *name :
       {"addOne1_call", "addOne2_call", "addOne3_call", "addOne4_call", "addOne5_call",
        "addOne6_call", "blame_domain", "blame_range", "blame_propagation_call", "contract_free_call"}) {
    auto r = diff(corpus(name), Level::Subset, env());
    INFO(std::string(name) << ": " << report_line(r));
    CHECK((r.verdict == Verdict::WeakOk || r.verdict == Verdict::StrongOk));
    CHECK(r.canonical);
    CHECK_FALSE(contains_fork(r.output));
  }
}

TEST_CASE("a blame term reached at run time blames its label") {
  auto o = run(parse_term("((lam x (blame #f -)) 1)"));
  REQUIRE(o.kind == Outcome::Kind::Blame);
  CHECK(o.blame == BlameVerdict{"f", Polarity::Negative});
}
