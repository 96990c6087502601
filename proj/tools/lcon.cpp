// SPDX-License-Identifier: Apache-2.0
// Command-line driver. Exit codes: 0 value / success, 1 parse or usage
// error, 2 blame, 3 stuck or out of fuel, 4 inconclusive, 5 violation.
#include "lcon/difftest.hpp"
#include "lcon/syntax.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace lcon;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kParse = 1, kBlame = 2, kStuck = 3, kInconclusive = 4, kViolation = 5 };

struct Common {
  std::string file;
  std::string gamma;
  std::uint64_t fuel = kDefaultFuel;
  bool json = false;
  bool dump = false;
};

std::string slurp(const std::string &path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ImplicationEnv load_env(const Common &c) {
  return c.gamma.empty() ? ImplicationEnv::defaults() : ImplicationEnv::load(c.gamma);
}

Level parse_level(const std::string &s) {
  return s == "subset" ? Level::Subset : Level::Baseline;
}

int exit_for(const Outcome &o) {
  switch (o.kind) {
  case Outcome::Kind::Value:
    return kOk;
  case Outcome::Kind::Blame:
    return kBlame;
  default:
    return kStuck;
  }
}

json outcome_json(const Outcome &o) {
  json j;
  j["outcome"] = outcome_name(o.kind);
  j["checks"] = o.predicate_checks;
  j["steps"] = o.steps;
  if (o.kind == Outcome::Kind::Value)
    j["value"] = print(unwrap(o.term));
  else if (o.kind == Outcome::Kind::Blame) {
    j["label"] = o.blame.label;
    j["polarity"] = o.blame.polarity == Polarity::Positive ? "+" : "-";
  } else if (o.term) {
    j["term"] = print(o.term);
  }
  return j;
}

void add_common(CLI::App *cmd, Common &c, bool with_file = true) {
  if (with_file)
    cmd->add_option("file", c.file, "program file, or - for stdin")->required();
  cmd->add_option("--gamma", c.gamma, "predicate implication file");
  cmd->add_option("--fuel", c.fuel, "evaluation step budget");
  cmd->add_flag("--json", c.json, "machine-readable output");
  cmd->add_flag("--dump-constraints", c.dump, "print the constraint store");
}

int cmd_run(const Common &c) {
  auto prog = parse(slurp(c.file), c.file);
  Outcome o = run(prog.term, c.fuel);
  if (c.json) {
    json j = outcome_json(o);
    if (c.dump)
      j["constraints"] = dump(o.store);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << describe(o) << " checks=" << o.predicate_checks << "\n";
    if (c.dump)
      std::cout << dump(o.store);
  }
  return exit_for(o);
}

struct SimplifyOpts {
  std::string level = "baseline";
  bool no_join = false, trace = false, report = false;
};

int cmd_simplify(const Common &c, const SimplifyOpts &s) {
  auto prog = parse(slurp(c.file), c.file);
  auto env = load_env(c);
  Level level = parse_level(s.level);
  ConstraintStore store;
  TermPtr out;
  std::vector<TransformStep> trace;
  json report;
  std::vector<std::string> warnings;
  if (level == Level::Baseline) {
    auto n = baseline_normalize({}, prog.term, env, {}, s.trace);
    store = n.store;
    out = n.term;
    trace = std::move(n.trace);
    warnings = n.warnings;
    json counts = json::object();
    for (auto &st : trace)
      counts[st.rule] = counts.value(st.rule, 0) + 1;
    report = {{"rule_counts", counts},
              {"branches_max", 1},
              {"predicates_before", count_predicates(prog.term)},
              {"predicates_after", count_predicates(out)}};
  } else if (s.no_join) {
    auto n = subset_normalize({}, prog.term, env, {}, true);
    store = n.store;
    out = n.term;
    warnings = n.warnings;
    json counts = json::object();
    for (auto &st : n.trace)
      counts[st.rule] = counts.value(st.rule, 0) + 1;
    report = {{"rule_counts", counts},
              {"branches_max", n.branches_max},
              {"predicates_before", count_predicates(prog.term)},
              {"predicates_after", count_predicates(out)}};
    if (s.trace)
      trace = std::move(n.trace);
  } else {
    auto r = optimize(prog.term, env, {}, s.trace);
    store = r.store;
    out = r.term;
    trace = std::move(r.trace);
    warnings = r.report.warnings;
    report = {{"rule_counts", r.report.rule_counts},
              {"branches_max", r.report.branches_max},
              {"predicates_before", r.report.predicates_before},
              {"predicates_after", r.report.predicates_after}};
  }
  for (auto &w : warnings)
    std::cerr << "warning: " << w << "\n";
  if (c.json) {
    json j;
    j["term"] = print(out);
    if (c.dump)
      j["constraints"] = dump(store);
    if (s.report)
      j["report"] = report;
    if (s.trace) {
      j["trace"] = json::array();
      for (auto &st : trace)
        j["trace"].push_back({{"rule", st.rule},
                              {"path", print_path(st.path)},
                              {"before", print(st.before)},
                              {"after", print(st.after)}});
    }
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  if (s.trace)
    for (auto &st : trace)
      std::cout << st.rule << " " << print_path(st.path) << " " << print(st.before) << "\n";
  std::cout << print(out) << "\n";
  if (c.dump)
    std::cout << dump(store);
  if (s.report)
    std::cout << report.dump() << "\n";
  return kOk;
}

int cmd_count(const Common &c, const std::string &arg) {
  auto prog = parse(slurp(c.file), c.file);
  auto env = load_env(c);
  TermPtr a = arg.empty() ? nullptr : parse(arg, "--arg").term;
  auto r = call_counts(prog.term, a, env, c.fuel);
  const Outcome &o = r.original, &ob = r.baseline, &os = r.subset;
  if (c.json) {
    std::cout << json{{"original", o.predicate_checks},
                      {"baseline", ob.predicate_checks},
                      {"subset", os.predicate_checks}}
                     .dump()
              << "\n";
  } else {
    std::cout << "original=" << o.predicate_checks << " baseline=" << ob.predicate_checks
              << " subset=" << os.predicate_checks << "\n";
  }
  return kOk;
}

int verdict_exit(const DiffReport &r) {
  switch (r.verdict) {
  case Verdict::Violation:
    return kViolation;
  case Verdict::Inconclusive:
    return kInconclusive;
  default:
    return kOk;
  }
}

int cmd_diff(const Common &c, const std::string &level, bool no_join) {
  auto prog = parse(slurp(c.file), c.file);
  auto env = load_env(c);
  DiffOptions opt;
  opt.fuel = c.fuel;
  opt.join = !no_join;
  DiffReport r = diff(prog.term, parse_level(level), env, opt, c.file);
  if (c.json) {
    json j{{"program", r.program},
           {"level", level_name(r.level)},
           {"verdict", verdict_name(r.verdict)},
           {"original", outcome_json(r.original)},
           {"transformed", outcome_json(r.transformed)},
           {"checks_original", r.checks_original},
           {"checks_transformed", r.checks_transformed}};
    if (!r.violation.empty())
      j["violation"] = r.violation;
    if (!r.detail.empty())
      j["detail"] = r.detail;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << report_line(r) << "\n";
  }
  return verdict_exit(r);
}

int cmd_fuzz(const Common &c, FuzzConfig cfg, const std::string &level, bool no_shrink) {
  cfg.level = parse_level(level);
  auto env = load_env(c);
  DiffOptions opt;
  opt.fuel = c.fuel;
  FuzzSummary s = fuzz(cfg, env, opt, !no_shrink);
  if (c.json) {
    json fails = json::array();
    for (auto &f : s.failures)
      fails.push_back({{"case", f.index},
                       {"verdict", verdict_name(f.report.verdict)},
                       {"violation", f.report.violation},
                       {"detail", f.report.detail},
                       {"program", print(f.shrunk)}});
    std::cout << json{{"seed", cfg.seed},
                      {"level", level_name(cfg.level)},
                      {"cases", s.cases},
                      {"strong_ok", s.strong_ok},
                      {"weak_ok", s.weak_ok},
                      {"violations", s.violations},
                      {"inconclusive", s.inconclusive},
                      {"checks_original", s.checks_original},
                      {"checks_transformed", s.checks_transformed},
                      {"failures", fails}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << summary_text(s, cfg);
  }
  return s.violations ? kViolation : kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"contract calculus interpreter and simplifier"};
  app.require_subcommand(1);

  Common run_c, simp_c, count_c, diff_c, fuzz_c;
  auto *run_cmd = app.add_subcommand("run", "evaluate a program");
  add_common(run_cmd, run_c);

  SimplifyOpts sopts;
  auto *simp_cmd = app.add_subcommand("simplify", "transform a program to canonical form");
  add_common(simp_cmd, simp_c);
  simp_cmd->add_option("--level", sopts.level, "baseline or subset")
      ->check(CLI::IsMember({"baseline", "subset"}));
  simp_cmd->add_flag("--no-join", sopts.no_join, "keep parallel observations");
  simp_cmd->add_flag("--trace", sopts.trace, "print every rule application");
  simp_cmd->add_flag("--report", sopts.report, "print rule and predicate counts");

  auto *count_cmd = app.add_subcommand("count", "predicate checks before and after simplifying");
  add_common(count_cmd, count_c);
  std::string count_arg;
  count_cmd->add_option("--arg", count_arg, "simplify the program alone, then apply it to this term");

  std::string diff_level = "baseline";
  bool diff_no_join = false;
  auto *diff_cmd = app.add_subcommand("diff", "compare a program with its transformation");
  add_common(diff_cmd, diff_c);
  diff_cmd->add_option("--level", diff_level, "baseline or subset")
      ->check(CLI::IsMember({"baseline", "subset"}));
  diff_cmd->add_flag("--no-join", diff_no_join, "do not join forks (subset)");

  FuzzConfig fcfg;
  std::string fuzz_level = "baseline";
  bool no_shrink = false;
  auto *fuzz_cmd = app.add_subcommand("fuzz", "differential testing on random programs");
  add_common(fuzz_cmd, fuzz_c, false);
  fuzz_cmd->add_option("--seed", fcfg.seed, "random seed");
  fuzz_cmd->add_option("--cases", fcfg.cases, "number of programs");
  fuzz_cmd->add_option("--depth", fcfg.term_depth, "term depth bound");
  fuzz_cmd->add_option("--contract-depth", fcfg.contract_depth, "contract depth bound");
  fuzz_cmd->add_option("--labels", fcfg.label_budget, "assertions per program");
  fuzz_cmd->add_option("--level", fuzz_level, "baseline or subset")
      ->check(CLI::IsMember({"baseline", "subset"}));
  fuzz_cmd->add_flag("--no-shrink", no_shrink, "report failures unshrunk");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kParse;
  }

  try {
    if (*run_cmd)
      return cmd_run(run_c);
    if (*simp_cmd)
      return cmd_simplify(simp_c, sopts);
    if (*count_cmd)
      return cmd_count(count_c, count_arg);
    if (*diff_cmd)
      return cmd_diff(diff_c, diff_level, diff_no_join);
    if (*fuzz_cmd)
      return cmd_fuzz(fuzz_c, fcfg, fuzz_level, no_shrink);
  } catch (const ParseError &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStuck;
  }
  return kOk;
}
