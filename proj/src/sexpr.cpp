// SPDX-License-Identifier: Apache-2.0

#include "sexpr.hpp"

#include <cctype>
#include <cstring>
#include <sstream>

namespace galatt {

namespace {

struct Lexer {
  const std::string& s;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& in) : s(in) {}

  int peek() const { return pos < s.size() ? static_cast<unsigned char>(s[pos]) : -1; }

  int get() {
    if (pos >= s.size()) return -1;
    char c = s[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return static_cast<unsigned char>(c);
  }

  void skip_ws() {
    while (true) {
      int c = peek();
      if (c == ';') {
        while (c != -1 && c != '\n') c = get();
      } else if (c != -1 && std::isspace(c)) {
        get();
      } else {
        return;
      }
    }
  }
};

bool symbol_char(int c) {
  if (c == -1) return false;
  if (std::isalnum(c)) return true;
  return std::strchr("~!@$%^&*_-+=<>.?/'", c) != nullptr;
}

SExpr parse_one(Lexer& lx) {
  lx.skip_ws();
  int sl = lx.line, sc = lx.col;
  int c = lx.peek();
  if (c == -1) throw ParseError("unexpected end of input", sl, sc);
  if (c == '(') {
    lx.get();
    SExpr node;
    node.kind = SExpr::Kind::List;
    node.line = sl;
    node.col = sc;
    while (true) {
      lx.skip_ws();
      int d = lx.peek();
      if (d == -1) throw ParseError("unbalanced '('", sl, sc);
      if (d == ')') {
        lx.get();
        return node;
      }
      node.items.push_back(parse_one(lx));
    }
  }
  if (c == ')') throw ParseError("unexpected ')'", sl, sc);
  if (c == '"') {
    lx.get();
    SExpr node;
    node.kind = SExpr::Kind::String;
    node.line = sl;
    node.col = sc;
    while (true) {
      int d = lx.get();
      if (d == -1) throw ParseError("unterminated string", sl, sc);
      if (d == '"') {
        if (lx.peek() == '"') {  // smtlib escape: ""
          lx.get();
          node.text.push_back('"');
          continue;
        }
        return node;
      }
      node.text.push_back(static_cast<char>(d));
    }
  }
  if (c == '|') {
    lx.get();
    SExpr node;
    node.kind = SExpr::Kind::Symbol;
    node.line = sl;
    node.col = sc;
    while (true) {
      int d = lx.get();
      if (d == -1) throw ParseError("unterminated |symbol|", sl, sc);
      if (d == '|') return node;
      node.text.push_back(static_cast<char>(d));
    }
  }
  if (!symbol_char(c) && c != ':') throw ParseError("unexpected character", sl, sc);
  SExpr node;
  node.line = sl;
  node.col = sc;
  std::string tok;
  if (lx.peek() == ':') tok.push_back(static_cast<char>(lx.get()));  // keyword
  while (symbol_char(lx.peek())) tok.push_back(static_cast<char>(lx.get()));
  if (tok.empty()) throw ParseError("empty token", sl, sc);
  bool numeric = std::isdigit(static_cast<unsigned char>(tok[0])) ||
                 (tok.size() > 1 && tok[0] == '-' &&
                  std::isdigit(static_cast<unsigned char>(tok[1])));
  if (numeric) {
    bool all = true;
    for (size_t i = (tok[0] == '-' ? 1 : 0); i < tok.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(tok[i])) && tok[i] != '.') all = false;
    if (all) {
      node.kind = SExpr::Kind::Number;
      node.text = tok;
      return node;
    }
  }
  node.kind = SExpr::Kind::Symbol;
  node.text = tok;
  return node;
}

bool needs_quoting(const std::string& sym) {
  if (sym.empty()) return true;
  for (char c : sym)
    if (!symbol_char(static_cast<unsigned char>(c)) || c == '\'') return true;
  return std::isdigit(static_cast<unsigned char>(sym[0]));
}

void print_rec(const SExpr& e, std::ostringstream& os) {
  switch (e.kind) {
    case SExpr::Kind::Symbol:
      if (needs_quoting(e.text))
        os << '|' << e.text << '|';
      else
        os << e.text;
      return;
    case SExpr::Kind::Number:
      os << e.text;
      return;
    case SExpr::Kind::String:
      os << '"' << e.text << '"';
      return;
    case SExpr::Kind::List:
      os << '(';
      for (size_t i = 0; i < e.items.size(); ++i) {
        if (i) os << ' ';
        print_rec(e.items[i], os);
      }
      os << ')';
      return;
  }
}

}  // namespace

std::string SExpr::to_string() const {
  std::ostringstream os;
  print_rec(*this, os);
  return os.str();
}

std::vector<SExpr> parse_sexprs(const std::string& input) {
  Lexer lx(input);
  std::vector<SExpr> out;
  while (true) {
    lx.skip_ws();
    if (lx.peek() == -1) return out;
    out.push_back(parse_one(lx));
  }
}

}  // namespace galatt
