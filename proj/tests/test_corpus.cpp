// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <doctest.h>

#include <filesystem>

using namespace lcon;
using namespace lcon::testing;

namespace {

std::vector<std::string> corpus_names() {
  std::vector<std::string> out;
  for (auto &e : std::filesystem::directory_iterator(LCON_CORPUS_DIR))
    if (e.path().extension() == ".lcon")
      out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST_CASE("corpus outcomes") {
  struct Want {
    const char *name;
    Outcome::Kind kind;
    const char *value;
    std::uint64_t checks;
  };
  // Interpreter counts, fixed here after a hand trace of each program.
  const Want wants[] = {
      {"addOne1_call", Outcome::Kind::Value, "6", 3},
      {"addOne2_call", Outcome::Kind::Value, "6", 6},
      {"contract_free_call", Outcome::Kind::Value, "6", 0},
      {"blame_domain", Outcome::Kind::Blame, nullptr, 1},
      {"blame_range", Outcome::Kind::Blame, nullptr, 2},
  };
  for (const Want &w : wants) {
    auto o = run(corpus(w.name));
    INFO(w.name);
    CHECK(o.kind == w.kind);
    if (w.value)
      CHECK(lcon::print(o.term) == w.value);
    CHECK(o.predicate_checks == w.checks);
  }
}

TEST_CASE("every corpus program survives both levels") {
  auto env = ImplicationEnv::defaults();
  for (const auto &name : corpus_names()) {
    for (Level l : {Level::Baseline, Level::Subset}) {
      auto r = diff(corpus(name), l, env);
      INFO(std::string(name) << " " << level_name(l) << ": " << report_line(r));
      CHECK(r.verdict != Verdict::Violation);
      CHECK(r.canonical);
    }
  }
}

TEST_CASE("per-call counts never grow from level to level") {
  auto env = ImplicationEnv::defaults();
  for (const auto &name : corpus_names()) {
    if (name.find("_call") != std::string::npos || name.rfind("blame_", 0) == 0)
      continue;
    auto c = call_counts(corpus(name), mk::num(5), env);
    INFO(std::string(name) << " " << c.original.predicate_checks << " " << c.baseline.predicate_checks << " "
              << c.subset.predicate_checks);
    CHECK(c.baseline.predicate_checks <= c.original.predicate_checks);
    CHECK(c.subset.predicate_checks <= c.baseline.predicate_checks);
  }
}

TEST_CASE("every snapshot still matches") {
  // Frozen after each program passed diff and the check-count oracle.
  auto env = ImplicationEnv::defaults();
  std::size_t seen = 0;
  for (auto &e : std::filesystem::directory_iterator(LCON_GOLDEN_DIR)) {
    auto name = e.path().stem().string();
    auto level = e.path().extension().string();
    auto p = corpus(name);
    auto out = level == ".subset" ? optimize(p, env).term : baseline_normalize({}, p, env).term;
    INFO(name << level);
    CHECK(canon(out) == canon(golden(name + level)));
    ++seen;
  }
  CHECK(seen == 2 * corpus_names().size());
}
