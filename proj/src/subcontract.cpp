// SPDX-License-Identifier: Apache-2.0
#include "lcon/subcontract.hpp"

#include "lcon/syntax.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lcon {

ImplicationEnv ImplicationEnv::defaults() {
  ImplicationEnv env;
  env.add("Positive?", "Natural?");
  env.add("Natural?", "Number?");
  env.add("Positive?", "Number?");
  env.add("Negative?", "Number?");
  return env;
}

void ImplicationEnv::add(std::string lhs, std::string rhs) {
  facts_.emplace(std::move(lhs), std::move(rhs));
}

bool ImplicationEnv::contains(const std::string &lhs, const std::string &rhs) const {
  return facts_.count({lhs, rhs}) > 0;
}

namespace {

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string side_key(const std::string &raw, int line) {
  std::string s = trim(raw);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return predicate_key(mk::flat(parse_term(s.substr(1, s.size() - 2))));
  if (pred_from_name(s))
    return s;
  throw std::runtime_error("implication file line " + std::to_string(line) +
                           ": unknown predicate '" + s + "'");
}

} // namespace

ImplicationEnv ImplicationEnv::parse(const std::string &text) {
  ImplicationEnv env;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto c = line.find(';'); c != std::string::npos && line.find('"') == std::string::npos)
      line = line.substr(0, c);
    if (trim(line).empty())
      continue;
    auto sep = line.find("<=");
    // Skip "<=" occurrences inside a quoted predicate.
    while (sep != std::string::npos &&
           std::count(line.begin(), line.begin() + sep, '"') % 2 == 1)
      sep = line.find("<=", sep + 2);
    if (sep == std::string::npos)
      throw std::runtime_error("implication file line " + std::to_string(n) +
                               ": expected 'LHS <= RHS'");
    env.add(side_key(line.substr(0, sep), n), side_key(line.substr(sep + 2), n));
  }
  return env;
}

ImplicationEnv ImplicationEnv::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open implication file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string predicate_key(const ContractPtr &c) {
  if (auto n = as<cnode::Named>(c))
    return pred_name(n->pred);
  if (auto f = as<cnode::Flat>(c))
    return print(alpha_normalize(f->pred));
  return "";
}

bool pred_implies(const ImplicationEnv &env, const std::string &m,
                  const std::string &n) {
  return m == n || env.contains(m, n);
}

namespace {

// Opens two dependent contracts under one shared binder.
std::pair<ContractPtr, ContractPtr> align(const cnode::Dep &a, const cnode::Dep &b) {
  if (a.param == b.param)
    return {a.body, b.body};
  auto avoid = free_vars(a.body);
  auto fb = free_vars(b.body);
  avoid.insert(fb.begin(), fb.end());
  std::string z = fresh_name(a.param, avoid);
  auto v = mk::var(z);
  return {substitute(a.body, a.param, v), substitute(b.body, b.param, v)};
}

bool flat_like(const ContractPtr &c) {
  return as<cnode::Flat>(c) || as<cnode::Named>(c);
}

} // namespace

bool Subcontract::subject(const ContractPtr &c, const ContractPtr &d) {
  if (!memoize_)
    return subject_rules(c, d);
  auto key = std::make_pair(c.get(), d.get());
  if (auto it = subject_memo_.find(key); it != subject_memo_.end())
    return it->second;
  pinned_.insert(c);
  pinned_.insert(d);
  bool r = subject_rules(c, d);
  subject_memo_[key] = r;
  return r;
}

bool Subcontract::context(const ContractPtr &c, const ContractPtr &d) {
  if (!memoize_)
    return context_rules(c, d);
  auto key = std::make_pair(c.get(), d.get());
  if (auto it = context_memo_.find(key); it != context_memo_.end())
    return it->second;
  pinned_.insert(c);
  pinned_.insert(d);
  bool r = context_rules(c, d);
  context_memo_[key] = r;
  return r;
}

bool Subcontract::subject_rules(const ContractPtr &c, const ContractPtr &d) {
  if (as<cnode::Top>(d) || as<cnode::Bot>(c) || alpha_equal(c, d))
    return true;
  if (flat_like(c) && flat_like(d))
    return pred_implies(env_, predicate_key(c), predicate_key(d));
  if (auto f = as<cnode::Fun>(c))
    if (auto g = as<cnode::Fun>(d))
      if (context(f->dom, g->dom) && subject(f->rng, g->rng))
        return true;
  if (auto f = as<cnode::Dep>(c))
    if (auto g = as<cnode::Dep>(d)) {
      auto [x, y] = align(*f, *g);
      if (subject(x, y))
        return true;
    }
  if (auto k = as<cnode::Cap>(d))
    if (subject(c, k->left) && subject(c, k->right))
      return true;
  if (auto u = as<cnode::Cup>(c))
    if (subject(u->left, d) && subject(u->right, d))
      return true;
  if (auto k = as<cnode::Cap>(c))
    if (subject(k->left, d) || subject(k->right, d))
      return true;
  if (auto u = as<cnode::Cup>(d))
    if (subject(c, u->left) || subject(c, u->right))
      return true;
  return false;
}

bool Subcontract::context_rules(const ContractPtr &c, const ContractPtr &d) {
  if ((is_immediate(c) && is_immediate(d)) || alpha_equal(c, d))
    return true;
  if (auto f = as<cnode::Fun>(c))
    if (auto g = as<cnode::Fun>(d))
      if (subject(f->dom, g->dom) && context(f->rng, g->rng))
        return true;
  if (auto f = as<cnode::Dep>(c))
    if (auto g = as<cnode::Dep>(d)) {
      auto [x, y] = align(*f, *g);
      if (context(x, y))
        return true;
    }
  if (auto k = as<cnode::Cap>(c))
    if (context(k->left, d) && context(k->right, d))
      return true;
  if (auto u = as<cnode::Cup>(d))
    if (context(c, u->left) && context(c, u->right))
      return true;
  if (auto k = as<cnode::Cap>(d))
    if (context(c, k->left) || context(c, k->right))
      return true;
  if (auto u = as<cnode::Cup>(c))
    if (context(u->left, d) || context(u->right, d))
      return true;
  return false;
}

bool subject_sub(const ImplicationEnv &env, const ContractPtr &c, const ContractPtr &d) {
  return Subcontract(env).subject(c, d);
}
bool context_sub(const ImplicationEnv &env, const ContractPtr &c, const ContractPtr &d) {
  return Subcontract(env).context(c, d);
}
bool naive_sub(const ImplicationEnv &env, const ContractPtr &c, const ContractPtr &d) {
  return Subcontract(env).naive(c, d);
}
bool ordinary_sub(const ImplicationEnv &env, const ContractPtr &c, const ContractPtr &d) {
  return Subcontract(env).ordinary(c, d);
}

} // namespace lcon
