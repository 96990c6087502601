// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lcon/ast.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace lcon {

class ParseError : public std::runtime_error {
public:
  enum class Kind { Syntax, DuplicateLabel, IntermediateForm };
  ParseError(Kind kind, int line, int column, const std::string &msg);
  Kind kind;
  int line, column;
};

struct SourceProgram {
  TermPtr term;
  std::string origin;
  std::vector<std::string> labels;
};

// Parses a source program: intermediate forms are rejected, labels must be
// distinct, and every contract is intersection-normalized.
SourceProgram parse(const std::string &text, const std::string &origin = "<input>");

// Parses any term, including blame variables, blame terms, forks, checks
// and top/bot. Contracts are taken as written.
TermPtr parse_term(const std::string &text);
ContractPtr parse_contract(const std::string &text);

std::string print(const TermPtr &t);
std::string print(const ContractPtr &c);
std::string print_constant(const Constant &k);

} // namespace lcon
