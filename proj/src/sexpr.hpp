// SPDX-License-Identifier: Apache-2.0

#ifndef GALATT_SEXPR_HPP
#define GALATT_SEXPR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace galatt {

struct ParseError : std::runtime_error {
  int line = 0, col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
        line(line_),
        col(col_) {}
};

struct SExpr {
  enum class Kind { Symbol, Number, String, List };
  Kind kind = Kind::List;
  std::string text;          // symbol name / numeral text / string contents
  std::vector<SExpr> items;  // for lists
  int line = 0, col = 0;

  bool is_sym(const char* s) const { return kind == Kind::Symbol && text == s; }
  std::string to_string() const;
};

// Parses a sequence of top-level s-expressions. Accepts ';' comments,
// |quoted symbols| and "strings".
std::vector<SExpr> parse_sexprs(const std::string& input);

}  // namespace galatt

#endif
