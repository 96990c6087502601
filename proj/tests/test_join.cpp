// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <doctest.h>

using namespace lcon;
using namespace lcon::testing;

namespace {

Frame fr(VarId v, const char *c) { return Frame{std::nullopt, v, parse_contract(c)}; }

std::string show(const std::vector<Frame> &fs) {
  return lcon::print(wrap_frames(fs, mk::var("_")));
}

} // namespace

TEST_CASE("context join") {
  auto c1 = fr(1, "Number?"), c2 = fr(2, "String?"), c3 = fr(3, "Positive?");
  // Frames are listed outermost first.
  CHECK(show(ctx_join({c1}, {c2, c1})) == show({c2, c1}));
  CHECK(show(ctx_join({}, {c1, c2})) == show({c1, c2}));
  CHECK(show(ctx_join({c1, c2}, {})) == show({c1, c2}));
  CHECK(show(ctx_join({c1, c2}, {c1, c2})) == show({c1, c2}));
  // Unique frames at one level: b's goes inside unless told otherwise.
  CHECK(show(ctx_join({c1}, {c2})) == show({c1, c2}));
  CHECK(show(ctx_join({c1}, {c2}, false)) == show({c2, c1}));
  // A shared frame anchors the depth of the others.
  CHECK(show(ctx_join({c3, c1}, {c1, c2})) == show({c3, c1, c2}));
}

TEST_CASE("structural equivalence ignores frames and blame") {
  auto w = struct_equiv(parse_term("((lam x (assert x @1 Number?)) 1)"), parse_term("((lam y y) 1)"));
  REQUIRE(w);
  CHECK(w->positions.size() == 1);
  CHECK(struct_equiv(parse_term("(lam x (blame #l +))"), parse_term("(lam x (x 1))")));
  CHECK_FALSE(struct_equiv(parse_term("(lam x (x 1))"), parse_term("(lam x 1)")));
}

TEST_CASE("identical branches join to one") {
  auto t = parse_term("(fork (assert (lam x x) @1 (-> top Number?)) (assert (lam x x) @1 (-> top Number?)))");
  RuleCounts counts;
  auto j = join_all(t, &counts);
  CHECK(lcon::print(j) == "(assert (lam x x) @1 (-> top Number?))");
}

TEST_CASE("a blame branch yields to the other branch") {
  auto t = parse_term("(fork (lam x ((x 1) x)) (lam x (blame #p -)))");
  CHECK(lcon::print(join_all(t)) == "(lam x ((x 1) x))");
}

TEST_CASE("differing frames are merged") {
  auto t = parse_term("(fork (assert (lam x x) @1 (-> top Number?)) (assert (lam x x) @2 (-> top String?)))");
  auto j = join_all(t);
  CHECK_FALSE(contains_fork(j));
  auto frames = split_frames(j).first;
  CHECK(frames.size() == 2);
}

TEST_CASE("branches of different shape cannot join") {
  CHECK_THROWS_AS(join_all(parse_term("(fork (lam x x) 1)")), JoinStuck);
}

TEST_CASE("condense drops a repeated contract") {
  ConstraintStore s;
  s.reserve_vars(3);
  auto t = parse_term("(assert (assert (lam x x) @1 (-> Number? Number?)) @2 (-> Number? Number?))");
  auto c = condense_all(s, t);
  CHECK(split_frames(c).first.size() == 1);
  CHECK(s.size() == 1);
}

TEST_CASE("join never adds checks on the corpus") {
  auto env = ImplicationEnv::defaults();
  for (const char *name : {"addOne2_call", "addOne4_call", "addOne5_call", "addOne6_call"}) {
    auto joined = diff(corpus(name), Level::Subset, env);
    INFO(std::string(name) << ": " << report_line(joined));
    CHECK(joined.checks_transformed <= joined.checks_original);
  }
}
