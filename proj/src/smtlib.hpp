// SPDX-License-Identifier: Apache-2.0
//
// SMT-LIB2 text serialization of formulas and the inverse term reader.
// Primed variables are serialized with the reserved "!p" suffix; placeholder
// symbols are only allowed in debug dumps, never in solver input.

#ifndef GALATT_SMTLIB_HPP
#define GALATT_SMTLIB_HPP

#include <map>
#include <set>
#include <string>

#include "formula.hpp"
#include "sexpr.hpp"

namespace galatt {

std::string smt_symbol(const Variable& v);

struct SmtPrintOptions {
  bool allow_placeholders = false;   // debug dumps only
  std::string prime_suffix = "!p";   // game files use "'"
};

std::string to_smt(const Formula& f, const SmtPrintOptions& opts = {});
std::string to_smt(const LinearTerm& t, Sort context_sort);

// Maps SMT symbols back to variables when reading solver replies.
struct SmtSymbolTable {
  std::map<std::string, Variable> vars;

  void add(const Variable& v) { vars[smt_symbol(v)] = v; }
  void add_all(const std::set<Variable>& vs) {
    for (const auto& v : vs) add(v);
  }
};

// Converts a solver-produced term into a Formula. Unsupported constructs
// (div/mod/ite over numerals, ...) are captured verbatim as opaque atoms at
// the nearest boolean level. Throws ParseError on malformed input.
Formula smt_to_formula(const SExpr& e, const SmtSymbolTable& symtab);

}  // namespace galatt

#endif
