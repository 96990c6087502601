// SPDX-License-Identifier: Apache-2.0
#include "lcon/syntax.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace lcon {

ParseError::ParseError(Kind kind, int line, int column, const std::string &msg)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": " + msg),
      kind(kind), line(line), column(column) {}

namespace {

struct Sx {
  enum class Kind { Atom, String, List } kind;
  std::string text;
  std::vector<Sx> items;
  int line = 0, col = 0;
};

class Reader {
public:
  explicit Reader(const std::string &s) : src(s) {}

  std::vector<Sx> read_all() {
    std::vector<Sx> out;
    skip();
    while (pos < src.size()) {
      out.push_back(read());
      skip();
    }
    return out;
  }

private:
  const std::string &src;
  std::size_t pos = 0;
  int line = 1, col = 1;

  [[noreturn]] void fail(const std::string &msg) {
    throw ParseError(ParseError::Kind::Syntax, line, col, msg);
  }

  void advance() {
    if (src[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == ';') {
        while (pos < src.size() && src[pos] != '\n')
          advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Sx read() {
    Sx sx;
    sx.line = line;
    sx.col = col;
    char c = src[pos];
    if (c == '(') {
      sx.kind = Sx::Kind::List;
      advance();
      for (;;) {
        skip();
        if (pos >= src.size())
          throw ParseError(ParseError::Kind::Syntax, sx.line, sx.col,
                           "unclosed parenthesis");
        if (src[pos] == ')') {
          advance();
          return sx;
        }
        sx.items.push_back(read());
      }
    }
    if (c == ')')
      fail("unexpected ')'");
    if (c == '"') {
      sx.kind = Sx::Kind::String;
      advance();
      for (;;) {
        if (pos >= src.size())
          throw ParseError(ParseError::Kind::Syntax, sx.line, sx.col,
                           "unterminated string");
        char d = src[pos];
        if (d == '"') {
          advance();
          return sx;
        }
        if (d == '\\') {
          advance();
          if (pos >= src.size())
            fail("unterminated escape");
          char e = src[pos];
          sx.text += e == 'n' ? '\n' : e == 't' ? '\t' : e;
          advance();
          continue;
        }
        sx.text += d;
        advance();
      }
    }
    sx.kind = Sx::Kind::Atom;
    while (pos < src.size()) {
      char d = src[pos];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' ||
          d == '"' || d == ';')
        break;
      sx.text += d;
      advance();
    }
    return sx;
  }
};

const std::set<std::string> &keywords() {
  static const std::set<std::string> k = {
      "lam", "if",  "assert", "blame", "fork", "check", "true", "false",
      "flat", "dep", "cap",   "cup",   "top",  "bot",   "->"};
  return k;
}

bool is_ident(const std::string &s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''))
      return false;
  return !keywords().count(s);
}

bool is_label_name(const std::string &s) {
  if (s.empty())
    return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  return true;
}

class Builder {
public:
  explicit Builder(bool source) : source(source) {}

  std::vector<std::string> labels;

  TermPtr term(const Sx &sx) {
    switch (sx.kind) {
    case Sx::Kind::String:
      return mk::str(sx.text);
    case Sx::Kind::Atom:
      return atom(sx);
    case Sx::Kind::List:
      return list(sx);
    }
    return nullptr;
  }

  ContractPtr contract(const Sx &sx) {
    if (sx.kind == Sx::Kind::Atom) {
      if (auto p = pred_from_name(sx.text))
        return mk::named(*p);
      if (sx.text == "top" || sx.text == "bot") {
        intermediate(sx, sx.text);
        return sx.text == "top" ? mk::top() : mk::bot();
      }
      fail(sx, "expected a contract, found '" + sx.text + "'");
    }
    if (sx.kind != Sx::Kind::List || sx.items.empty())
      fail(sx, "expected a contract");
    const Sx &head = sx.items[0];
    std::string h = head.kind == Sx::Kind::Atom ? head.text : "";
    if (h == "flat") {
      arity(sx, 2);
      return mk::flat(term(sx.items[1]));
    }
    if (h == "->") {
      arity(sx, 3);
      auto d = contract(sx.items[1]);
      return mk::fun(d, contract(sx.items[2]));
    }
    if (h == "cap" || h == "cup") {
      arity(sx, 3);
      auto l = contract(sx.items[1]);
      auto r = contract(sx.items[2]);
      return h == "cap" ? mk::cap(l, r) : mk::cup(l, r);
    }
    if (h == "dep") {
      arity(sx, 2);
      const Sx &l = sx.items[1];
      if (l.kind != Sx::Kind::List || l.items.size() != 3 ||
          l.items[0].kind != Sx::Kind::Atom || l.items[0].text != "lam")
        fail(l, "dep expects (lam x C)");
      return mk::dep(ident(l.items[1]), contract(l.items[2]));
    }
    fail(sx, "unknown contract form");
  }

private:
  bool source;

  [[noreturn]] static void fail(const Sx &sx, const std::string &msg) {
    throw ParseError(ParseError::Kind::Syntax, sx.line, sx.col, msg);
  }

  void intermediate(const Sx &sx, const std::string &what) {
    if (source)
      throw ParseError(ParseError::Kind::IntermediateForm, sx.line, sx.col,
                       "intermediate form '" + what + "' is not allowed in source");
  }

  static void arity(const Sx &sx, std::size_t n) {
    if (sx.items.size() != n)
      fail(sx, "'" + sx.items[0].text + "' expects " + std::to_string(n - 1) +
                   " operand(s)");
  }

  static std::string ident(const Sx &sx) {
    if (sx.kind != Sx::Kind::Atom || !is_ident(sx.text))
      fail(sx, "expected an identifier");
    return sx.text;
  }

  static VarId blame_var(const Sx &sx) {
    const std::string &s = sx.text;
    VarId v = 0;
    if (sx.kind != Sx::Kind::Atom || s.size() < 2 || s[0] != '@' ||
        std::from_chars(s.data() + 1, s.data() + s.size(), v).ptr !=
            s.data() + s.size())
      fail(sx, "expected a blame variable @n");
    return v;
  }

  static std::string label(const Sx &sx) {
    if (sx.kind != Sx::Kind::Atom || sx.text.size() < 2 || sx.text[0] != '#' ||
        !is_label_name(sx.text.substr(1)))
      fail(sx, "expected a blame label #name");
    return sx.text.substr(1);
  }

  TermPtr atom(const Sx &sx) {
    const std::string &s = sx.text;
    if (s == "true" || s == "false")
      return mk::boolean(s == "true");
    bool digits = !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) ||
                                 (s[0] == '-' && s.size() > 1));
    if (digits) {
      std::int64_t n = 0;
      auto r = std::from_chars(s.data(), s.data() + s.size(), n);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        fail(sx, "malformed integer '" + s + "'");
      return mk::num(n);
    }
    if (is_ident(s))
      return mk::var(s);
    fail(sx, "unexpected token '" + s + "'");
  }

  TermPtr list(const Sx &sx) {
    if (sx.items.empty())
      fail(sx, "empty application");
    const Sx &head = sx.items[0];
    std::string h = head.kind == Sx::Kind::Atom ? head.text : "";
    if (h == "lam") {
      arity(sx, 3);
      return mk::lam(ident(sx.items[1]), term(sx.items[2]));
    }
    if (h == "if") {
      arity(sx, 4);
      auto c = term(sx.items[1]);
      auto a = term(sx.items[2]);
      return mk::if_(c, a, term(sx.items[3]));
    }
    if (h == "assert") {
      arity(sx, 4);
      auto subject = term(sx.items[1]);
      const Sx &tag = sx.items[2];
      if (tag.kind == Sx::Kind::Atom && !tag.text.empty() && tag.text[0] == '@') {
        intermediate(tag, tag.text);
        VarId v = blame_var(tag);
        return mk::assert_var(subject, v, contract(sx.items[3]));
      }
      std::string l = label(tag);
      labels.push_back(l);
      if (source)
        for (std::size_t i = 0; i + 1 < labels.size(); ++i)
          if (labels[i] == l)
            throw ParseError(ParseError::Kind::DuplicateLabel, tag.line, tag.col,
                             "duplicate blame label #" + l);
      auto c = contract(sx.items[3]);
      if (source)
        c = normalize_intersections(c);
      return mk::assert_label(subject, l, c);
    }
    if (h == "blame") {
      intermediate(head, "blame");
      arity(sx, 3);
      const Sx &p = sx.items[2];
      if (p.kind != Sx::Kind::Atom || (p.text != "+" && p.text != "-"))
        fail(p, "expected + or -");
      return mk::blame(label(sx.items[1]),
                       p.text == "+" ? Polarity::Positive : Polarity::Negative);
    }
    if (h == "fork") {
      intermediate(head, "fork");
      arity(sx, 3);
      auto l = term(sx.items[1]);
      return mk::fork(l, term(sx.items[2]));
    }
    if (h == "check") {
      intermediate(head, "check");
      arity(sx, 4);
      auto v = term(sx.items[1]);
      VarId var = blame_var(sx.items[2]);
      return mk::check(v, var, term(sx.items[3]));
    }
    if (auto op = op_from_name(h)) {
      arity(sx, 3);
      auto a = term(sx.items[1]);
      return mk::prim(*op, a, term(sx.items[2]));
    }
    if (keywords().count(h))
      fail(head, "'" + h + "' cannot appear here");
    if (sx.items.size() != 2)
      fail(sx, "application expects exactly one argument");
    auto f = term(sx.items[0]);
    return mk::app(f, term(sx.items[1]));
  }
};

Sx single(const std::string &text) {
  auto forms = Reader(text).read_all();
  if (forms.empty())
    throw ParseError(ParseError::Kind::Syntax, 1, 1, "empty input");
  if (forms.size() > 1)
    throw ParseError(ParseError::Kind::Syntax, forms[1].line, forms[1].col,
                     "trailing input after the program");
  return forms[0];
}

std::string escape(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += '\\', out += c;
    else if (c == '\n')
      out += "\\n";
    else if (c == '\t')
      out += "\\t";
    else
      out += c;
  }
  return out + "\"";
}

void emit(const ContractPtr &c, std::string &out);

void emit(const TermPtr &t, std::string &out) {
  std::visit(
      [&](const auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Const>) {
          out += print_constant(n.value);
        } else if constexpr (std::is_same_v<N, node::Var>) {
          out += n.name;
        } else if constexpr (std::is_same_v<N, node::Lam>) {
          out += "(lam " + n.param + " ";
          emit(n.body, out);
          out += ")";
        } else if constexpr (std::is_same_v<N, node::App>) {
          out += "(";
          emit(n.fn, out);
          out += " ";
          emit(n.arg, out);
          out += ")";
        } else if constexpr (std::is_same_v<N, node::Prim>) {
          out += "(";
          out += op_name(n.op);
          for (auto &a : n.args) {
            out += " ";
            emit(a, out);
          }
          out += ")";
        } else if constexpr (std::is_same_v<N, node::If>) {
          out += "(if ";
          emit(n.test, out);
          out += " ";
          emit(n.then_branch, out);
          out += " ";
          emit(n.else_branch, out);
          out += ")";
        } else if constexpr (std::is_same_v<N, node::Assert>) {
          out += "(assert ";
          emit(n.subject, out);
          out += n.label ? " #" + *n.label + " " : " @" + std::to_string(*n.var) + " ";
          emit(n.contract, out);
          out += ")";
        } else if constexpr (std::is_same_v<N, node::Check>) {
          out += "(check ";
          emit(n.value, out);
          out += " @" + std::to_string(n.var) + " ";
          emit(n.pred, out);
          out += ")";
        } else if constexpr (std::is_same_v<N, node::Blame>) {
          out += "(blame #" + n.label +
                 (n.polarity == Polarity::Positive ? " +)" : " -)");
        } else {
          out += "(fork ";
          emit(n.left, out);
          out += " ";
          emit(n.right, out);
          out += ")";
        }
      },
      t->v);
}

void emit(const ContractPtr &c, std::string &out) {
  std::visit(
      [&](const auto &n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, cnode::Flat>) {
          out += "(flat ";
          emit(n.pred, out);
          out += ")";
        } else if constexpr (std::is_same_v<N, cnode::Named>) {
          out += pred_name(n.pred);
        } else if constexpr (std::is_same_v<N, cnode::Fun>) {
          out += "(-> ";
          emit(n.dom, out);
          out += " ";
          emit(n.rng, out);
          out += ")";
        } else if constexpr (std::is_same_v<N, cnode::Dep>) {
          out += "(dep (lam " + n.param + " ";
          emit(n.body, out);
          out += "))";
        } else if constexpr (std::is_same_v<N, cnode::Cap> ||
                             std::is_same_v<N, cnode::Cup>) {
          out += std::is_same_v<N, cnode::Cap> ? "(cap " : "(cup ";
          emit(n.left, out);
          out += " ";
          emit(n.right, out);
          out += ")";
        } else if constexpr (std::is_same_v<N, cnode::Top>) {
          out += "top";
        } else {
          out += "bot";
        }
      },
      c->v);
}

} // namespace

SourceProgram parse(const std::string &text, const std::string &origin) {
  Sx sx = single(text);
  Builder b(true);
  SourceProgram p;
  p.term = b.term(sx);
  p.origin = origin;
  p.labels = std::move(b.labels);
  return p;
}

TermPtr parse_term(const std::string &text) {
  Builder b(false);
  return b.term(single(text));
}

ContractPtr parse_contract(const std::string &text) {
  Builder b(false);
  return b.contract(single(text));
}

std::string print_constant(const Constant &k) {
  if (auto b = std::get_if<bool>(&k))
    return *b ? "true" : "false";
  if (auto n = std::get_if<std::int64_t>(&k))
    return std::to_string(*n);
  return escape(std::get<std::string>(k));
}

std::string print(const TermPtr &t) {
  std::string out;
  emit(t, out);
  return out;
}

std::string print(const ContractPtr &c) {
  std::string out;
  emit(c, out);
  return out;
}

} // namespace lcon
