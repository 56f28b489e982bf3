// SPDX-License-Identifier: Apache-2.0
//
// Immutable first-order formula core over linear integer/real arithmetic and
// Booleans. Formulas are shared, persistent trees; all operations are pure.

#ifndef GALATT_FORMULA_HPP
#define GALATT_FORMULA_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace galatt {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

enum class Sort { Int, Real, Bool };

const char* sort_name(Sort s);

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SortError : Error {
  using Error::Error;
};

// A variable is identified by (name, primed). The sort is carried along and
// must be consistent wherever the same (name, primed) pair appears.
struct Variable {
  std::string name;
  Sort sort = Sort::Int;
  bool primed = false;

  bool is_numeric() const { return sort != Sort::Bool; }
  Variable primed_version() const;
  Variable unprimed_version() const;
  std::string display() const { return primed ? name + "'" : name; }

  friend bool operator==(const Variable& a, const Variable& b) {
    return a.name == b.name && a.primed == b.primed;
  }
  friend bool operator<(const Variable& a, const Variable& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.primed < b.primed;
  }
};

using Value = std::variant<Rational, bool>;
using Assignment = std::map<Variable, Value>;

// Affine term: sum of coeff * var plus a constant, exact rationals.
class LinearTerm {
 public:
  LinearTerm() = default;
  explicit LinearTerm(Rational constant) : constant_(std::move(constant)) {}
  explicit LinearTerm(const Variable& v);

  static LinearTerm constant(long c) { return LinearTerm(Rational(c)); }

  const std::map<Variable, Rational>& coeffs() const { return coeffs_; }
  const Rational& constant_part() const { return constant_; }
  bool is_constant() const { return coeffs_.empty(); }

  LinearTerm& add(const Variable& v, const Rational& coeff);
  LinearTerm& add_constant(const Rational& c);

  friend LinearTerm operator+(const LinearTerm& a, const LinearTerm& b);
  friend LinearTerm operator-(const LinearTerm& a, const LinearTerm& b);
  LinearTerm scaled(const Rational& k) const;
  LinearTerm negated() const { return scaled(Rational(-1)); }

  Rational evaluate(const Assignment& nu) const;
  bool all_vars_integer() const;
  bool all_coeffs_integer() const;

  size_t hash() const;
  friend bool operator==(const LinearTerm& a, const LinearTerm& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }

  std::string display() const;

 private:
  std::map<Variable, Rational> coeffs_;  // no zero entries
  Rational constant_ = 0;
};

// Uninterpreted function used as a syntactic placeholder (e.g. next_l).
// No solver query may ever contain one.
struct PlaceholderSymbol {
  std::string name;
  std::vector<Sort> arg_sorts;

  size_t arity() const { return arg_sorts.size(); }
  friend bool operator==(const PlaceholderSymbol& a, const PlaceholderSymbol& b) {
    return a.name == b.name && a.arg_sorts == b.arg_sorts;
  }
  friend bool operator<(const PlaceholderSymbol& a, const PlaceholderSymbol& b) {
    return a.name < b.name;
  }
};

class Formula;
using TermOrFormula = std::variant<LinearTerm, Formula>;

class Formula {
 public:
  enum class Kind {
    True,
    False,
    BoolVar,
    Cmp,      // linear atom, stored as term REL 0 with REL in {Le, Lt, Eq}
    Opaque,   // unsupported solver output kept verbatim (bool-sorted)
    Not,
    And,
    Or,
    Implies,
    Exists,
    Forall,
    App,  // placeholder application
  };
  enum class Rel { Le, Lt, Eq };
  // Relation in user-facing constructors; Ge/Gt normalize by negating the term.
  enum class RelOp { Le, Lt, Eq, Ge, Gt };

  Formula() : Formula(fls()) {}

  static Formula tru();
  static Formula fls();
  static Formula boolean(bool b) { return b ? tru() : fls(); }
  static Formula var(const Variable& v);
  static Formula cmp(const LinearTerm& lhs, RelOp op, const LinearTerm& rhs);
  // A pre-normalized atom: term rel 0.
  static Formula atom(LinearTerm term, Rel rel);
  static Formula opaque(std::string smt_text, std::vector<Variable> free_vars);
  static Formula app(PlaceholderSymbol sym, std::vector<TermOrFormula> args);

  Kind kind() const;
  Rel rel() const;
  const LinearTerm& term() const;
  const Variable& variable() const;
  const std::vector<Formula>& children() const;
  const std::vector<Variable>& binders() const;
  const PlaceholderSymbol& symbol() const;
  const std::vector<TermOrFormula>& args() const;
  const std::string& opaque_text() const;
  const std::vector<Variable>& opaque_vars() const;

  size_t hash() const;
  size_t node_count() const;

  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

  std::string display() const;  // human-readable, for diagnostics

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend Formula f_not(const Formula&);
  friend Formula f_and(std::vector<Formula>);
  friend Formula f_or(std::vector<Formula>);
  friend Formula f_implies(const Formula&, const Formula&);
  friend Formula f_quant(Kind, std::vector<Variable>, const Formula&);
};

Formula f_not(const Formula& f);
Formula f_and(std::vector<Formula> kids);
Formula f_or(std::vector<Formula> kids);
Formula f_implies(const Formula& lhs, const Formula& rhs);
Formula f_quant(Formula::Kind q, std::vector<Variable> vars, const Formula& body);
inline Formula f_exists(std::vector<Variable> vars, const Formula& body) {
  return f_quant(Formula::Kind::Exists, std::move(vars), body);
}
inline Formula f_forall(std::vector<Variable> vars, const Formula& body) {
  return f_quant(Formula::Kind::Forall, std::move(vars), body);
}
inline Formula f_and(const Formula& a, const Formula& b) { return f_and(std::vector<Formula>{a, b}); }
inline Formula f_or(const Formula& a, const Formula& b) { return f_or(std::vector<Formula>{a, b}); }

// ---- queries ----

std::set<Variable> free_vars(const Formula& f);
bool has_placeholders(const Formula& f);
bool is_quantifier_free(const Formula& f);
bool is_ground(const Formula& f);

// ---- operations ----

using SubstMap = std::map<Variable, TermOrFormula>;

// Simultaneous, capture-avoiding substitution of free variables.
Formula substitute(const Formula& f, const SubstMap& map);
LinearTerm substitute(const LinearTerm& t, const SubstMap& map);

// prime: X -> X' on all free variables; fails if a primed free variable is
// present. unprime is the inverse.
Formula prime(const Formula& f);
Formula unprime(const Formula& f);
// Prime only the given variables (used by game operators; other free
// variables, e.g. frozen loop-step constants, stay untouched).
Formula prime_vars(const Formula& f, const std::vector<Variable>& vars);

struct PlaceholderDef {
  std::vector<Variable> formals;
  Formula body;
};
using PlaceholderMap = std::map<std::string, PlaceholderDef>;

// Replaces every application sym(t1..tm) by body[formals -> actuals].
Formula instantiate_placeholders(const Formula& f, const PlaceholderMap& map);

// Ground evaluation with exact rational arithmetic. Quantifier-free,
// placeholder-free formulas only; nu must cover all free variables.
bool evaluate(const Formula& f, const Assignment& nu);
Value evaluate_value(const TermOrFormula& t, const Assignment& nu);

// ---- polyhedral normalization ----

struct PolyhedralDisjunct {
  // Each entry t stands for the inequality t <= 0 (affine, numeric vars only).
  std::vector<LinearTerm> inequalities;
  Formula residual = Formula::tru();
};

// Rewrites a quantifier-free formula into a disjunction of polyhedra
// conjuncted with residual constraints. Returns nullopt if the number of
// disjuncts would exceed `max_disjuncts`.
std::optional<std::vector<PolyhedralDisjunct>> to_polyhedral_dnf(const Formula& f,
                                                                 size_t max_disjuncts = 64);

// Negation-normal form (placeholder-free, quantifier-free input).
Formula to_nnf(const Formula& f, bool negate = false);

}  // namespace galatt

#endif  // GALATT_FORMULA_HPP
