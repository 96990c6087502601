// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <doctest.h>

using namespace lcon;
using namespace lcon::testing;

namespace {

Facets at(const Interpretation &m, const BlameId &id) {
  auto it = m.find(id);
  return it == m.end() ? Facets{} : it->second;
}

} // namespace

TEST_CASE("union subject is a disjunction") {
  ConstraintStore s;
  s.add(Constraint::indirection(BlameId::of_label("l"), 1));
  s.add(Constraint::union_(BlameId::of_var(1), 2, 3));
  s.add(Constraint::truth(BlameId::of_var(2), false));
  s.add(Constraint::truth(BlameId::of_var(3), true));
  auto m = solve(s);
  CHECK(at(m, BlameId::of_label("l")).subject);
  CHECK(at(m, BlameId::of_label("l")).context);
  CHECK_FALSE(blame_state(s));
}

TEST_CASE("intersection subject is a conjunction") {
  ConstraintStore s;
  s.add(Constraint::indirection(BlameId::of_label("l"), 1));
  s.add(Constraint::intersection(BlameId::of_var(1), 2, 3));
  s.add(Constraint::truth(BlameId::of_var(2), true));
  s.add(Constraint::truth(BlameId::of_var(3), false));
  auto v = blame_state(s);
  REQUIRE(v);
  CHECK(v->label == "l");
  CHECK(v->polarity == Polarity::Positive);
}

TEST_CASE("a failing domain blames the context") {
  ConstraintStore s;
  s.add(Constraint::indirection(BlameId::of_label("f"), 1));
  s.add(Constraint::function(BlameId::of_var(1), 2, 3));
  s.add(Constraint::truth(BlameId::of_var(2), false));
  auto v = blame_state(s);
  REQUIRE(v);
  CHECK(v->polarity == Polarity::Negative);
  CHECK(sign_of(BlameId::of_var(2), s) == Polarity::Negative);
  CHECK(to_string(root_of(BlameId::of_var(3), s)) == "#f");
  CHECK(sign_of(BlameId::of_var(3), s) == Polarity::Positive);
}

TEST_CASE("a failing range after a passing domain blames the subject") {
  ConstraintStore s;
  s.add(Constraint::indirection(BlameId::of_label("f"), 1));
  s.add(Constraint::function(BlameId::of_var(1), 2, 3));
  s.add(Constraint::truth(BlameId::of_var(2), true));
  s.add(Constraint::truth(BlameId::of_var(3), false));
  auto v = blame_state(s);
  REQUIRE(v);
  CHECK(v->polarity == Polarity::Positive);
}

TEST_CASE("inversion swaps facets") {
  ConstraintStore s;
  s.add(Constraint::inversion(BlameId::of_label("n"), 1));
  s.add(Constraint::truth(BlameId::of_var(1), false));
  auto m = solve(s);
  CHECK(at(m, BlameId::of_label("n")).subject);
  CHECK_FALSE(at(m, BlameId::of_label("n")).context);
}

TEST_CASE("several definitions of one identifier are conjoined") {
  ConstraintStore s;
  s.add(Constraint::indirection(BlameId::of_label("l"), 1));
  s.add(Constraint::indirection(BlameId::of_label("l"), 2));
  s.add(Constraint::truth(BlameId::of_var(1), true));
  s.add(Constraint::truth(BlameId::of_var(2), false));
  CHECK_FALSE(at(solve(s), BlameId::of_label("l")).subject);
}

TEST_CASE("strict solving rejects undefined variables") {
  ConstraintStore s;
  s.add(Constraint::indirection(BlameId::of_label("l"), 7));
  CHECK(at(solve(s), BlameId::of_label("l")).subject);
  CHECK_THROWS_AS(solve(s, true), DanglingVariable);
}

TEST_CASE("orphan variables have no root") {
  ConstraintStore s;
  s.add(Constraint::truth(BlameId::of_var(4), false));
  CHECK_THROWS_AS(root_of(BlameId::of_var(4), s), OrphanVariable);
}

TEST_CASE("solver matches the brute-force oracle on every store up to four identifiers") {
  std::size_t stores = 0, disagree = 0, pointwise = 0, pointwise_disagree = 0;
  for (std::size_t ids = 1; ids <= 4; ++ids)
    enumerate_stores(ids, [&](const StoreCase &sc) {
      ++stores;
      auto r = check_solver(sc);
      if (!r.agrees)
        ++disagree;
      if (r.pointwise_exists) {
        ++pointwise;
        if (!r.pointwise_agrees)
          ++pointwise_disagree;
      }
    });
  CHECK(stores >= 500);
  CHECK(disagree == 0);
  CHECK(pointwise > 0);
  CHECK(pointwise_disagree == 0);
}

TEST_CASE("solver matches the oracle on sampled stores with five and six identifiers") {
  std::mt19937_64 rng(7);
  std::size_t disagree = 0;
  for (int i = 0; i < 400; ++i) {
    auto sc = random_store(5 + (i & 1), rng);
    if (!check_solver(sc).agrees)
      ++disagree;
  }
  CHECK(disagree == 0);
}

TEST_CASE("the least map need not exist pointwise") {
  // Raising the domain's subject to false would make the function's
  // subject true, so the two models are incomparable.
  StoreCase sc;
  sc.store.add(Constraint::function(BlameId::of_label("r"), 1, 2));
  sc.store.add(Constraint::truth(BlameId::of_var(1), true));
  sc.store.add(Constraint::truth(BlameId::of_var(2), false));
  sc.order = {BlameId::of_var(2), BlameId::of_var(1), BlameId::of_label("r")};
  auto o = brute_force(sc.store, sc.order);
  CHECK_FALSE(o.has_pointwise_least);
  CHECK(check_solver(sc).agrees);
}
