// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <doctest.h>

using namespace lcon;
using namespace lcon::testing;

namespace {

ContractPtr C(const char *s) { return parse_contract(s); }

} // namespace

TEST_CASE("implication facts") {
  auto env = ImplicationEnv::defaults();
  CHECK(pred_implies(env, "Positive?", "Number?"));
  CHECK(pred_implies(env, "Number?", "Number?"));
  CHECK_FALSE(pred_implies(env, "Number?", "Positive?"));
  auto custom = ImplicationEnv::parse("; facts\nPositive? <= Natural?\n\n\"(lam v (> v 1))\" <= Positive?\n");
  CHECK(custom.facts().size() == 2);
  CHECK(custom.contains("Positive?", "Natural?"));
  CHECK(predicate_key(C("(flat (lam w (> w 1)))")) == predicate_key(C("(flat (lam v (> v 1)))")));
}

TEST_CASE("flat contracts follow implication") {
  auto env = ImplicationEnv::defaults();
  CHECK(subject_sub(env, C("Positive?"), C("Number?")));
  CHECK_FALSE(subject_sub(env, C("Number?"), C("Positive?")));
  CHECK(naive_sub(env, C("Positive?"), C("Natural?")));
  CHECK(subject_sub(env, C("bot"), C("String?")));
  CHECK(subject_sub(env, C("String?"), C("top")));
}

TEST_CASE("function contracts") {
  auto env = ImplicationEnv::defaults();
  // The running example: the outer contract subsumes both halves.
  CHECK(naive_sub(env, C("(-> Positive? Positive?)"), C("(-> Number? top)")));
  CHECK(naive_sub(env, C("(-> Positive? Positive?)"), C("(-> top Number?)")));
  CHECK_FALSE(naive_sub(env, C("(-> Number? Number?)"), C("(-> Positive? Positive?)")));
  // Ordinary subcontracting is contravariant in the domain.
  CHECK(ordinary_sub(env, C("(-> Number? Positive?)"), C("(-> Positive? Number?)")));
  CHECK_FALSE(ordinary_sub(env, C("(-> Positive? Positive?)"), C("(-> Number? Number?)")));
}

TEST_CASE("intersections and unions") {
  auto env = ImplicationEnv::defaults();
  CHECK(subject_sub(env, C("(cap Positive? String?)"), C("Positive?")));
  CHECK(subject_sub(env, C("Positive?"), C("(cup Positive? String?)")));
  CHECK(subject_sub(env, C("(cup Positive? Natural?)"), C("Number?")));
}

TEST_CASE("memoized and unmemoized judgments agree") {
  auto env = ImplicationEnv::defaults();
  Subcontract memo(env, true), plain(env, false);
  ContractGen gen(11);
  for (int i = 0; i < 300; ++i) {
    auto a = gen.next(2), b = gen.next(2);
    CHECK(memo.subject(a, b) == plain.subject(a, b));
    CHECK(memo.context(a, b) == plain.context(a, b));
  }
}

TEST_CASE("both judgments are reflexive") {
  auto env = ImplicationEnv::defaults();
  Subcontract sub(env);
  ContractGen gen(3);
  for (int i = 0; i < 1000; ++i) {
    auto c = gen.next(3);
    INFO(lcon::print(c));
    CHECK(sub.subject(c, c));
    CHECK(sub.context(c, c));
  }
}

TEST_CASE("both judgments are transitive on derivable chains") {
  auto env = ImplicationEnv::defaults();
  Subcontract sub(env);
  ContractGen gen(5);
  std::vector<ContractPtr> pool;
  for (int i = 0; i < 120; ++i)
    pool.push_back(gen.next(2));
  std::size_t subject_chains = 0, context_chains = 0;
  std::vector<std::string> broken;
  for (auto &a : pool)
    for (auto &b : pool)
      for (auto &c : pool) {
        if (sub.subject(a, b) && sub.subject(b, c)) {
          ++subject_chains;
          if (!sub.subject(a, c))
            broken.push_back("subject " + lcon::print(a) + " " + lcon::print(b) + " " + lcon::print(c));
        }
        if (sub.context(a, b) && sub.context(b, c)) {
          ++context_chains;
          if (!sub.context(a, c))
            broken.push_back("context " + lcon::print(a) + " " + lcon::print(b) + " " + lcon::print(c));
        }
      }
  for (std::size_t i = 0; i < std::min<std::size_t>(broken.size(), 5); ++i)
    MESSAGE(broken[i]);
  CHECK(broken.empty());
  CHECK(subject_chains >= 1000);
  CHECK(context_chains >= 1000);
}
