// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <doctest.h>

using namespace lcon;
using namespace lcon::testing;

TEST_CASE("print and parse round trip") {
  const char *terms[] = {
      "((lam x (+ x 1)) 2)",
      "(if (< 1 2) \"a\" \"b\")",
      "(assert (lam x x) #f (-> Number? (dep (lam y (flat (lam v (> v y)))))))",
      "(assert 1 @3 (cup Positive? Negative?))",
      "(fork (blame #l +) (assert 1 @2 bot))",
      "(check 1 @4 (lam v (> v 0)))",
      "(assert (lam x x) @1 (-> top bot))",
      "true",
      "-4",
  };
  for (const char *s : terms) {
    auto t = parse_term(s);
    CHECK(print(t) == s);
    CHECK(alpha_equal(parse_term(print(t)), t));
  }
}

TEST_CASE("source programs reject intermediate forms") {
  CHECK_THROWS_AS(parse("(assert 1 @1 Number?)"), ParseError);
  CHECK_THROWS_AS(parse("(blame #l +)"), ParseError);
  CHECK_THROWS_AS(parse("(assert 1 #l top)"), ParseError);
  try {
    parse("(fork 1 2)");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.kind == ParseError::Kind::IntermediateForm);
  }
}

TEST_CASE("labels must be distinct") {
  try {
    parse("((assert (lam x x) #l (-> Number? Number?)) (assert 1 #l Number?))");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.kind == ParseError::Kind::DuplicateLabel);
  }
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse("((lam x x)\n  (+ 1 ))");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.kind == ParseError::Kind::Syntax);
    CHECK(e.line >= 1);
  }
  CHECK_THROWS_AS(parse("(lam x"), ParseError);
  CHECK_THROWS_AS(parse_contract("(-> Number?)"), ParseError);
}

TEST_CASE("comments and whitespace are skipped") {
  auto p = parse("; leading\n((lam x x) ; inline\n 1)");
  CHECK(print(p.term) == "((lam x x) 1)");
}

TEST_CASE("source contracts are intersection-normalized") {
  auto p = parse("(assert 1 #l (cap (cup Number? String?) Positive?))");
  auto a = as<node::Assert>(p.term);
  REQUIRE(a);
  CHECK(as<cnode::Cup>(a->contract));
}

TEST_CASE("every corpus program parses and reprints") {
  for (const char *name : {"addOne1", "addOne2", "addOne3", "addOne4", "addOne5", "addOne6",
                           "blame_domain", "blame_range", "blame_propagation", "contract_free"}) {
    auto t = corpus(name);
    CHECK_MESSAGE(alpha_equal(parse_term(print(t)), t), name);
  }
}
