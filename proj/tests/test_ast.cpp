// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <doctest.h>

using namespace lcon;
using namespace lcon::testing;

TEST_CASE("alpha equality ignores binder names") {
  CHECK(alpha_equal(parse_term("(lam x (lam y (x y)))"), parse_term("(lam a (lam b (a b)))")));
  CHECK_FALSE(alpha_equal(parse_term("(lam x (lam y (x y)))"), parse_term("(lam a (lam b (b a)))")));
  CHECK(alpha_equal(parse_contract("(dep (lam x (flat (lam v (> v x)))))"),
                    parse_contract("(dep (lam y (flat (lam w (> w y)))))")));
}

TEST_CASE("substitution avoids capture") {
  auto body = parse_term("(lam y (x y))");
  auto out = substitute(body, "x", mk::var("y"));
  auto lam = as<node::Lam>(out);
  REQUIRE(lam);
  CHECK(lam->param != "y");
  CHECK(free_vars(out) == std::set<std::string>{"y"});
}

TEST_CASE("substitution stops at a shadowing binder") {
  auto t = parse_term("((lam x x) x)");
  CHECK(print(substitute(t, "x", mk::num(3))) == "((lam x x) 3)");
}

TEST_CASE("contract classes") {
  CHECK(is_immediate(parse_contract("Number?")));
  CHECK(is_immediate(parse_contract("bot")));
  CHECK_FALSE(is_immediate(parse_contract("(cap Number? Positive?)")));
  CHECK_FALSE(is_delayed(parse_contract("(cap (-> Number? Number?) Positive?)")));
  CHECK(is_delayed(parse_contract("(-> Number? Number?)")));
  CHECK(is_delayed(parse_contract("(cap (-> Number? Number?) (-> String? String?))")));
}

TEST_CASE("values") {
  CHECK(is_value(mk::num(1)));
  CHECK(is_value(parse_term("(lam x x)")));
  CHECK(is_value(parse_term("(assert (lam x x) @1 (-> Number? Number?))")));
  CHECK_FALSE(is_value(parse_term("(assert 1 @1 Number?)")));
  CHECK_FALSE(is_value(parse_term("((lam x x) 1)")));
  CHECK(is_wrapped_value(parse_term("(assert (lam x x) @1 (-> Number? Number?))")));
  CHECK(print(unwrap(parse_term("(assert (lam x x) @1 (-> Number? Number?))"))) == "(lam x x)");
}

TEST_CASE("erasing contracts keeps subjects") {
  auto t = parse_term("((assert (lam x x) #f (-> Number? Number?)) (assert 1 @2 bot))");
  CHECK(print(erase_contracts(t)) == "((lam x x) 1)");
}

TEST_CASE("intersection normalization distributes unions and immediates") {
  auto c = normalize_intersections(parse_contract("(cap (cup Number? String?) Positive?)"));
  CHECK(as<cnode::Cup>(c));
  auto d = normalize_intersections(parse_contract("(cap (-> Number? Number?) Positive?)"));
  // The immediate part is checked first.
  auto cap = as<cnode::Cap>(d);
  REQUIRE(cap);
  CHECK(is_immediate(cap->left));
}

TEST_CASE("alpha normalization is idempotent and canonical") {
  auto a = alpha_normalize(parse_term("(lam q (lam r (q r)))"));
  auto b = alpha_normalize(parse_term("(lam s (lam t (s t)))"));
  CHECK(print(a) == print(b));
  CHECK(print(alpha_normalize(a)) == print(a));
}

TEST_CASE("source terms exclude intermediate forms") {
  CHECK(is_source_term(parse_term("(assert 1 #l Number?)")));
  CHECK_FALSE(is_source_term(parse_term("(assert 1 @1 Number?)")));
  CHECK_FALSE(is_source_term(parse_term("(blame #l +)")));
  CHECK(contains_fork(parse_term("(fork 1 2)")));
  CHECK_FALSE(is_source_contract(parse_contract("top")));
}

TEST_CASE("label collection walks the whole term") {
  std::vector<std::string> labels;
  collect_labels(corpus("addOne4"), labels);
  std::sort(labels.begin(), labels.end());
  CHECK(labels == std::vector<std::string>{"addOne", "plus"});
}
