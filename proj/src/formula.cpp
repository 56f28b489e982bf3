// SPDX-License-Identifier: Apache-2.0

#include "formula.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

namespace galatt {

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Int: return "Int";
    case Sort::Real: return "Real";
    case Sort::Bool: return "Bool";
  }
  return "?";
}

Variable Variable::primed_version() const {
  if (primed) throw Error("variable already primed: " + display());
  Variable v = *this;
  v.primed = true;
  return v;
}

Variable Variable::unprimed_version() const {
  if (!primed) throw Error("variable not primed: " + display());
  Variable v = *this;
  v.primed = false;
  return v;
}

// ---- LinearTerm ----

LinearTerm::LinearTerm(const Variable& v) {
  if (!v.is_numeric()) throw SortError("boolean variable in linear term: " + v.display());
  coeffs_[v] = 1;
}

LinearTerm& LinearTerm::add(const Variable& v, const Rational& coeff) {
  if (!v.is_numeric()) throw SortError("boolean variable in linear term: " + v.display());
  auto it = coeffs_.find(v);
  if (it == coeffs_.end()) {
    if (coeff != 0) coeffs_[v] = coeff;
  } else {
    it->second += coeff;
    if (it->second == 0) coeffs_.erase(it);
  }
  return *this;
}

LinearTerm& LinearTerm::add_constant(const Rational& c) {
  constant_ += c;
  return *this;
}

LinearTerm operator+(const LinearTerm& a, const LinearTerm& b) {
  LinearTerm r = a;
  for (const auto& [v, c] : b.coeffs_) r.add(v, c);
  r.constant_ += b.constant_;
  return r;
}

LinearTerm operator-(const LinearTerm& a, const LinearTerm& b) { return a + b.negated(); }

LinearTerm LinearTerm::scaled(const Rational& k) const {
  LinearTerm r;
  if (k == 0) return r;
  for (const auto& [v, c] : coeffs_) r.coeffs_[v] = c * k;
  r.constant_ = constant_ * k;
  return r;
}

Rational LinearTerm::evaluate(const Assignment& nu) const {
  Rational acc = constant_;
  for (const auto& [v, c] : coeffs_) {
    auto it = nu.find(v);
    if (it == nu.end()) throw Error("evaluate: unassigned variable " + v.display());
    const Rational* val = std::get_if<Rational>(&it->second);
    if (!val) throw SortError("evaluate: boolean value for numeric variable " + v.display());
    acc += c * *val;
  }
  return acc;
}

bool LinearTerm::all_vars_integer() const {
  for (const auto& [v, c] : coeffs_)
    if (v.sort != Sort::Int) return false;
  return true;
}

bool LinearTerm::all_coeffs_integer() const {
  for (const auto& [v, c] : coeffs_)
    if (denominator(c) != 1) return false;
  return denominator(constant_) == 1;
}

static void hash_mix(size_t& h, size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

static size_t hash_rational(const Rational& r) {
  std::hash<std::string> hs;
  return hs(r.str());
}

size_t LinearTerm::hash() const {
  size_t h = hash_rational(constant_);
  for (const auto& [v, c] : coeffs_) {
    hash_mix(h, std::hash<std::string>{}(v.name));
    hash_mix(h, v.primed ? 7 : 3);
    hash_mix(h, hash_rational(c));
  }
  return h;
}

std::string LinearTerm::display() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : coeffs_) {
    if (c > 0 && !first) os << " + ";
    if (c < 0) os << (first ? "-" : " - ");
    Rational a = abs(c);
    if (a != 1) os << a.str() << "*";
    os << v.display();
    first = false;
  }
  if (first) {
    os << constant_.str();
  } else if (constant_ > 0) {
    os << " + " << constant_.str();
  } else if (constant_ < 0) {
    os << " - " << abs(constant_).str();
  }
  return os.str();
}

// ---- Formula nodes ----

struct Formula::Node {
  Kind kind;
  size_t hash = 0;
  size_t size = 1;
  Rel rel = Rel::Le;
  LinearTerm term;
  Variable var;
  std::vector<Formula> kids;
  std::vector<Variable> binders;
  PlaceholderSymbol sym;
  std::vector<TermOrFormula> args;
  std::string opaque_smt;
  std::vector<Variable> opaque_vars;
};

namespace {

size_t node_hash(const Formula::Node& n) {
  size_t h = static_cast<size_t>(n.kind) * 0x9e3779b97f4a7c15ULL + 0x51ed2701;
  switch (n.kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      break;
    case Formula::Kind::BoolVar:
      hash_mix(h, std::hash<std::string>{}(n.var.name));
      hash_mix(h, n.var.primed ? 7 : 3);
      break;
    case Formula::Kind::Cmp:
      hash_mix(h, static_cast<size_t>(n.rel));
      hash_mix(h, n.term.hash());
      break;
    case Formula::Kind::Opaque:
      hash_mix(h, std::hash<std::string>{}(n.opaque_smt));
      break;
    case Formula::Kind::App:
      hash_mix(h, std::hash<std::string>{}(n.sym.name));
      for (const auto& a : n.args) {
        if (const auto* t = std::get_if<LinearTerm>(&a))
          hash_mix(h, t->hash());
        else
          hash_mix(h, std::get<Formula>(a).hash());
      }
      break;
    default:
      for (const auto& v : n.binders) {
        hash_mix(h, std::hash<std::string>{}(v.name));
        hash_mix(h, v.primed ? 7 : 3);
      }
      for (const auto& k : n.kids) hash_mix(h, k.hash());
      break;
  }
  return h;
}

size_t node_size(const Formula::Node& n) {
  size_t s = 1;
  for (const auto& k : n.kids) s += k.node_count();
  return s;
}

std::shared_ptr<const Formula::Node> finish(Formula::Node n) {
  n.hash = node_hash(n);
  n.size = node_size(n);
  return std::make_shared<const Formula::Node>(std::move(n));
}

const std::shared_ptr<const Formula::Node>& true_node() {
  static const auto n = [] {
    Formula::Node k;
    k.kind = Formula::Kind::True;
    return finish(std::move(k));
  }();
  return n;
}

const std::shared_ptr<const Formula::Node>& false_node() {
  static const auto n = [] {
    Formula::Node k;
    k.kind = Formula::Kind::False;
    return finish(std::move(k));
  }();
  return n;
}

}  // namespace

Formula Formula::tru() { return Formula(true_node()); }
Formula Formula::fls() { return Formula(false_node()); }

Formula Formula::var(const Variable& v) {
  if (v.sort != Sort::Bool) throw SortError("non-boolean variable as formula: " + v.display());
  Node n;
  n.kind = Kind::BoolVar;
  n.var = v;
  return Formula(finish(std::move(n)));
}

// Canonical scale: integer coefficients with gcd 1; for Eq, first coefficient
// positive. Scaling the whole atom by a positive rational preserves meaning.
Formula Formula::atom(LinearTerm term, Rel rel) {
  BigInt den = 1;
  for (const auto& [v, c] : term.coeffs()) den = lcm(den, denominator(c));
  den = lcm(den, denominator(term.constant_part()));
  BigInt num = 0;
  for (const auto& [v, c] : term.coeffs()) num = gcd(num, BigInt(numerator(c) * (den / denominator(c))));
  num = gcd(num, BigInt(numerator(term.constant_part()) * (den / denominator(term.constant_part()))));
  Rational scale(den, num == 0 ? BigInt(1) : num);
  if (scale != 1) term = term.scaled(scale);
  if (rel == Rel::Eq && !term.coeffs().empty() && term.coeffs().begin()->second < 0)
    term = term.negated();
  Node n;
  n.kind = Kind::Cmp;
  n.rel = rel;
  n.term = std::move(term);
  return Formula(finish(std::move(n)));
}

Formula Formula::cmp(const LinearTerm& lhs, RelOp op, const LinearTerm& rhs) {
  LinearTerm d = lhs - rhs;
  switch (op) {
    case RelOp::Le: return atom(std::move(d), Rel::Le);
    case RelOp::Lt: return atom(std::move(d), Rel::Lt);
    case RelOp::Eq: return atom(std::move(d), Rel::Eq);
    case RelOp::Ge: return atom(d.negated(), Rel::Le);
    case RelOp::Gt: return atom(d.negated(), Rel::Lt);
  }
  throw Error("bad relation");
}

Formula Formula::opaque(std::string smt_text, std::vector<Variable> vars) {
  Node n;
  n.kind = Kind::Opaque;
  n.opaque_smt = std::move(smt_text);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  n.opaque_vars = std::move(vars);
  return Formula(finish(std::move(n)));
}

Formula Formula::app(PlaceholderSymbol sym, std::vector<TermOrFormula> args) {
  if (args.size() != sym.arity())
    throw Error("placeholder arity mismatch for " + sym.name + ": expected " +
                std::to_string(sym.arity()) + ", got " + std::to_string(args.size()));
  Node n;
  n.kind = Kind::App;
  n.sym = std::move(sym);
  n.args = std::move(args);
  return Formula(finish(std::move(n)));
}

Formula f_not(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::True: return Formula::fls();
    case Formula::Kind::False: return Formula::tru();
    case Formula::Kind::Not: return f.children()[0];
    default: break;
  }
  Formula::Node n;
  n.kind = Formula::Kind::Not;
  n.kids = {f};
  return Formula(finish(std::move(n)));
}

namespace {

Formula make_nary(Formula::Kind kind, std::vector<Formula> kids) {
  const bool is_and = kind == Formula::Kind::And;
  std::vector<Formula> flat;
  flat.reserve(kids.size());
  for (auto& k : kids) {
    if (is_and ? k.is_false() : k.is_true()) return is_and ? Formula::fls() : Formula::tru();
    if (is_and ? k.is_true() : k.is_false()) continue;
    if (k.kind() == kind) {
      for (const auto& g : k.children()) flat.push_back(g);
    } else {
      flat.push_back(std::move(k));
    }
  }
  // drop structural duplicates, keeping first occurrence order
  std::vector<Formula> uniq;
  uniq.reserve(flat.size());
  for (auto& k : flat) {
    bool dup = false;
    for (const auto& u : uniq)
      if (u == k) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(std::move(k));
  }
  if (uniq.empty()) return is_and ? Formula::tru() : Formula::fls();
  if (uniq.size() == 1) return uniq[0];
  Formula::Node n;
  n.kind = kind;
  n.kids = std::move(uniq);
  return Formula(finish(std::move(n)));
}

}  // namespace

Formula f_and(std::vector<Formula> kids) { return make_nary(Formula::Kind::And, std::move(kids)); }
Formula f_or(std::vector<Formula> kids) { return make_nary(Formula::Kind::Or, std::move(kids)); }

Formula f_implies(const Formula& lhs, const Formula& rhs) {
  if (lhs.is_true()) return rhs;
  if (lhs.is_false()) return Formula::tru();
  if (rhs.is_true()) return Formula::tru();
  if (rhs.is_false()) return f_not(lhs);
  Formula::Node n;
  n.kind = Formula::Kind::Implies;
  n.kids = {lhs, rhs};
  return Formula(finish(std::move(n)));
}

Formula f_quant(Formula::Kind q, std::vector<Variable> vars, const Formula& body) {
  if (q != Formula::Kind::Exists && q != Formula::Kind::Forall) throw Error("bad quantifier");
  auto fv = free_vars(body);
  std::vector<Variable> kept;
  for (auto& v : vars) {
    if (fv.count(v) && std::find(kept.begin(), kept.end(), v) == kept.end()) kept.push_back(v);
  }
  if (kept.empty()) return body;
  if (body.is_true() || body.is_false()) return body;
  Formula::Node n;
  n.kind = q;
  n.binders = std::move(kept);
  n.kids = {body};
  return Formula(finish(std::move(n)));
}

// ---- accessors ----

Formula::Kind Formula::kind() const { return node_->kind; }
Formula::Rel Formula::rel() const { return node_->rel; }
const LinearTerm& Formula::term() const { return node_->term; }
const Variable& Formula::variable() const { return node_->var; }
const std::vector<Formula>& Formula::children() const { return node_->kids; }
const std::vector<Variable>& Formula::binders() const { return node_->binders; }
const PlaceholderSymbol& Formula::symbol() const { return node_->sym; }
const std::vector<TermOrFormula>& Formula::args() const { return node_->args; }
const std::string& Formula::opaque_text() const { return node_->opaque_smt; }
const std::vector<Variable>& Formula::opaque_vars() const { return node_->opaque_vars; }
size_t Formula::hash() const { return node_->hash; }
size_t Formula::node_count() const { return node_->size; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash || a.node_->kind != b.node_->kind) return false;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  switch (x.kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return true;
    case Formula::Kind::BoolVar:
      return x.var == y.var;
    case Formula::Kind::Cmp:
      return x.rel == y.rel && x.term == y.term;
    case Formula::Kind::Opaque:
      return x.opaque_smt == y.opaque_smt;
    case Formula::Kind::App: {
      if (!(x.sym == y.sym) || x.args.size() != y.args.size()) return false;
      for (size_t i = 0; i < x.args.size(); ++i)
        if (x.args[i] != y.args[i]) return false;
      return true;
    }
    default: {
      if (x.binders != y.binders || x.kids.size() != y.kids.size()) return false;
      for (size_t i = 0; i < x.kids.size(); ++i)
        if (!(x.kids[i] == y.kids[i])) return false;
      return true;
    }
  }
}

std::string Formula::display() const {
  std::ostringstream os;
  switch (kind()) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::BoolVar: return variable().display();
    case Kind::Cmp: {
      const char* r = rel() == Rel::Le ? " <= " : rel() == Rel::Lt ? " < " : " = ";
      LinearTerm t = term();
      Rational c = -t.constant_part();
      t.add_constant(c);  // move constant to rhs
      os << t.display() << r << c.str();
      return os.str();
    }
    case Kind::Opaque: return "<" + opaque_text() + ">";
    case Kind::Not: return "!(" + children()[0].display() + ")";
    case Kind::And:
    case Kind::Or: {
      const char* sep = kind() == Kind::And ? " & " : " | ";
      os << "(";
      for (size_t i = 0; i < children().size(); ++i) {
        if (i) os << sep;
        os << children()[i].display();
      }
      os << ")";
      return os.str();
    }
    case Kind::Implies:
      return "(" + children()[0].display() + " -> " + children()[1].display() + ")";
    case Kind::Exists:
    case Kind::Forall: {
      os << (kind() == Kind::Exists ? "exists " : "forall ");
      for (size_t i = 0; i < binders().size(); ++i) {
        if (i) os << ",";
        os << binders()[i].display();
      }
      os << ". " << children()[0].display();
      return os.str();
    }
    case Kind::App: {
      os << symbol().name << "(";
      for (size_t i = 0; i < args().size(); ++i) {
        if (i) os << ",";
        if (const auto* t = std::get_if<LinearTerm>(&args()[i]))
          os << t->display();
        else
          os << std::get<Formula>(args()[i]).display();
      }
      os << ")";
      return os.str();
    }
  }
  return "?";
}

// ---- queries ----

namespace {

void collect_free(const Formula& f, std::set<Variable>& bound, std::set<Variable>& out) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return;
    case Formula::Kind::BoolVar:
      if (!bound.count(f.variable())) out.insert(f.variable());
      return;
    case Formula::Kind::Cmp:
      for (const auto& [v, c] : f.term().coeffs())
        if (!bound.count(v)) out.insert(v);
      return;
    case Formula::Kind::Opaque:
      for (const auto& v : f.opaque_vars())
        if (!bound.count(v)) out.insert(v);
      return;
    case Formula::Kind::App:
      for (const auto& a : f.args()) {
        if (const auto* t = std::get_if<LinearTerm>(&a)) {
          for (const auto& [v, c] : t->coeffs())
            if (!bound.count(v)) out.insert(v);
        } else {
          collect_free(std::get<Formula>(a), bound, out);
        }
      }
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      std::vector<Variable> added;
      for (const auto& v : f.binders())
        if (bound.insert(v).second) added.push_back(v);
      collect_free(f.children()[0], bound, out);
      for (const auto& v : added) bound.erase(v);
      return;
    }
    default:
      for (const auto& k : f.children()) collect_free(k, bound, out);
      return;
  }
}

}  // namespace

std::set<Variable> free_vars(const Formula& f) {
  std::set<Variable> bound, out;
  collect_free(f, bound, out);
  return out;
}

bool has_placeholders(const Formula& f) {
  if (f.kind() == Formula::Kind::App) return true;
  for (const auto& k : f.children())
    if (has_placeholders(k)) return true;
  return false;
}

bool is_quantifier_free(const Formula& f) {
  if (f.kind() == Formula::Kind::Exists || f.kind() == Formula::Kind::Forall) return false;
  for (const auto& k : f.children())
    if (!is_quantifier_free(k)) return false;
  return true;
}

bool is_ground(const Formula& f) { return free_vars(f).empty() && !has_placeholders(f); }

// ---- substitution ----

// Defined in smtlib.cpp: renames rewrite the captured text, compound terms
// wrap it in an SMT let binder.
Formula opaque_substitute(const Formula& opaque, const SubstMap& map);

namespace {

std::atomic<uint64_t> fresh_counter{0};

Variable fresh_variable(const Variable& like) {
  Variable v = like;
  v.name = like.name + "#" + std::to_string(fresh_counter.fetch_add(1));
  return v;
}

LinearTerm subst_term(const LinearTerm& t, const SubstMap& map) {
  LinearTerm r(t.constant_part());
  for (const auto& [v, c] : t.coeffs()) {
    auto it = map.find(v);
    if (it == map.end()) {
      r.add(v, c);
    } else {
      const auto* rep = std::get_if<LinearTerm>(&it->second);
      if (!rep) throw SortError("boolean substituted into numeric position: " + v.display());
      LinearTerm scaled = rep->scaled(c);
      for (const auto& [v2, c2] : scaled.coeffs()) r.add(v2, c2);
      r.add_constant(scaled.constant_part());
    }
  }
  return r;
}

std::set<Variable> range_vars(const SubstMap& map) {
  std::set<Variable> out;
  for (const auto& [v, rep] : map) {
    if (const auto* t = std::get_if<LinearTerm>(&rep)) {
      for (const auto& [v2, c] : t->coeffs()) out.insert(v2);
    } else {
      auto fv = free_vars(std::get<Formula>(rep));
      out.insert(fv.begin(), fv.end());
    }
  }
  return out;
}

Formula subst_rec(const Formula& f, const SubstMap& map) {
  if (map.empty()) return f;
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return f;
    case Formula::Kind::BoolVar: {
      auto it = map.find(f.variable());
      if (it == map.end()) return f;
      const auto* rep = std::get_if<Formula>(&it->second);
      if (!rep) throw SortError("numeric term substituted for boolean variable: " +
                                f.variable().display());
      return *rep;
    }
    case Formula::Kind::Cmp:
      return Formula::atom(subst_term(f.term(), map), f.rel());
    case Formula::Kind::Opaque: {
      SubstMap relevant;
      for (const auto& v : f.opaque_vars()) {
        auto it = map.find(v);
        if (it != map.end()) relevant.insert(*it);
      }
      if (relevant.empty()) return f;
      return opaque_substitute(f, relevant);
    }
    case Formula::Kind::App: {
      std::vector<TermOrFormula> args;
      args.reserve(f.args().size());
      for (const auto& a : f.args()) {
        if (const auto* t = std::get_if<LinearTerm>(&a))
          args.emplace_back(subst_term(*t, map));
        else
          args.emplace_back(subst_rec(std::get<Formula>(a), map));
      }
      return Formula::app(f.symbol(), std::move(args));
    }
    case Formula::Kind::Not:
      return f_not(subst_rec(f.children()[0], map));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> kids;
      kids.reserve(f.children().size());
      for (const auto& k : f.children()) kids.push_back(subst_rec(k, map));
      return f.kind() == Formula::Kind::And ? f_and(std::move(kids)) : f_or(std::move(kids));
    }
    case Formula::Kind::Implies:
      return f_implies(subst_rec(f.children()[0], map), subst_rec(f.children()[1], map));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      SubstMap inner = map;
      for (const auto& b : f.binders()) inner.erase(b);
      // rename binders that would capture substituted terms
      std::set<Variable> danger = range_vars(inner);
      std::vector<Variable> binders = f.binders();
      SubstMap renames;
      for (auto& b : binders) {
        if (danger.count(b)) {
          Variable nb = fresh_variable(b);
          if (b.sort == Sort::Bool)
            renames[b] = Formula::var(nb);
          else
            renames[b] = LinearTerm(nb);
          b = nb;
        }
      }
      Formula body = f.children()[0];
      if (!renames.empty()) body = subst_rec(body, renames);
      if (inner.empty()) return f_quant(f.kind(), std::move(binders), body);
      return f_quant(f.kind(), std::move(binders), subst_rec(body, inner));
    }
  }
  throw Error("unreachable");
}

}  // namespace

Formula substitute(const Formula& f, const SubstMap& map) {
  if (map.empty()) return f;
  return subst_rec(f, map);
}

LinearTerm substitute(const LinearTerm& t, const SubstMap& map) { return subst_term(t, map); }

Formula prime_vars(const Formula& f, const std::vector<Variable>& vars) {
  SubstMap map;
  for (const auto& v : vars) {
    if (v.primed) throw Error("prime_vars: variable already primed: " + v.display());
    if (v.sort == Sort::Bool)
      map[v] = Formula::var(v.primed_version());
    else
      map[v] = LinearTerm(v.primed_version());
  }
  return substitute(f, map);
}

Formula prime(const Formula& f) {
  SubstMap map;
  for (const auto& v : free_vars(f)) {
    if (v.primed) throw Error("prime: formula has primed free variable " + v.display());
    if (v.sort == Sort::Bool)
      map[v] = Formula::var(v.primed_version());
    else
      map[v] = LinearTerm(v.primed_version());
  }
  return substitute(f, map);
}

Formula unprime(const Formula& f) {
  SubstMap map;
  for (const auto& v : free_vars(f)) {
    if (!v.primed) throw Error("unprime: formula has unprimed free variable " + v.display());
    if (v.sort == Sort::Bool)
      map[v] = Formula::var(v.unprimed_version());
    else
      map[v] = LinearTerm(v.unprimed_version());
  }
  return substitute(f, map);
}

// ---- placeholder instantiation ----

namespace {

Formula inst_rec(const Formula& f, const PlaceholderMap& map) {
  switch (f.kind()) {
    case Formula::Kind::App: {
      auto it = map.find(f.symbol().name);
      if (it == map.end()) throw Error("unmapped placeholder: " + f.symbol().name);
      const PlaceholderDef& def = it->second;
      if (def.formals.size() != f.args().size())
        throw Error("placeholder arity mismatch in instantiation: " + f.symbol().name);
      SubstMap sub;
      for (size_t i = 0; i < def.formals.size(); ++i) sub[def.formals[i]] = f.args()[i];
      return substitute(def.body, sub);
    }
    case Formula::Kind::Not:
      return f_not(inst_rec(f.children()[0], map));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.children()) kids.push_back(inst_rec(k, map));
      return f.kind() == Formula::Kind::And ? f_and(std::move(kids)) : f_or(std::move(kids));
    }
    case Formula::Kind::Implies:
      return f_implies(inst_rec(f.children()[0], map), inst_rec(f.children()[1], map));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return f_quant(f.kind(), f.binders(), inst_rec(f.children()[0], map));
    default:
      return f;
  }
}

}  // namespace

Formula instantiate_placeholders(const Formula& f, const PlaceholderMap& map) {
  if (!has_placeholders(f)) return f;
  return inst_rec(f, map);
}

// ---- evaluation ----

bool evaluate(const Formula& f, const Assignment& nu) {
  switch (f.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::BoolVar: {
      auto it = nu.find(f.variable());
      if (it == nu.end()) throw Error("evaluate: unassigned variable " + f.variable().display());
      const bool* b = std::get_if<bool>(&it->second);
      if (!b) throw SortError("evaluate: numeric value for boolean variable");
      return *b;
    }
    case Formula::Kind::Cmp: {
      Rational v = f.term().evaluate(nu);
      switch (f.rel()) {
        case Formula::Rel::Le: return v <= 0;
        case Formula::Rel::Lt: return v < 0;
        case Formula::Rel::Eq: return v == 0;
      }
      throw Error("bad rel");
    }
    case Formula::Kind::Opaque:
      throw Error("evaluate: opaque atom cannot be evaluated: " + f.opaque_text());
    case Formula::Kind::App:
      throw Error("evaluate: formula contains placeholder " + f.symbol().name);
    case Formula::Kind::Not:
      return !evaluate(f.children()[0], nu);
    case Formula::Kind::And:
      for (const auto& k : f.children())
        if (!evaluate(k, nu)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& k : f.children())
        if (evaluate(k, nu)) return true;
      return false;
    case Formula::Kind::Implies:
      return !evaluate(f.children()[0], nu) || evaluate(f.children()[1], nu);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      throw Error("evaluate: quantified formula (finite-domain evaluation lives in the oracle)");
  }
  throw Error("unreachable");
}

Value evaluate_value(const TermOrFormula& t, const Assignment& nu) {
  if (const auto* lt = std::get_if<LinearTerm>(&t)) return lt->evaluate(nu);
  return evaluate(std::get<Formula>(t), nu);
}

// ---- NNF and polyhedral DNF ----

Formula to_nnf(const Formula& f, bool negate) {
  switch (f.kind()) {
    case Formula::Kind::True: return negate ? Formula::fls() : Formula::tru();
    case Formula::Kind::False: return negate ? Formula::tru() : Formula::fls();
    case Formula::Kind::BoolVar:
    case Formula::Kind::Opaque:
    case Formula::Kind::App:
      return negate ? f_not(f) : f;
    case Formula::Kind::Cmp: {
      if (!negate) return f;
      switch (f.rel()) {
        case Formula::Rel::Le:  // !(t<=0) == -t<0
          return Formula::atom(f.term().negated(), Formula::Rel::Lt);
        case Formula::Rel::Lt:  // !(t<0) == -t<=0
          return Formula::atom(f.term().negated(), Formula::Rel::Le);
        case Formula::Rel::Eq:  // !(t=0) == t<0 | -t<0
          return f_or(Formula::atom(f.term(), Formula::Rel::Lt),
                      Formula::atom(f.term().negated(), Formula::Rel::Lt));
      }
      throw Error("bad rel");
    }
    case Formula::Kind::Not:
      return to_nnf(f.children()[0], !negate);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.children()) kids.push_back(to_nnf(k, negate));
      bool mk_and = (f.kind() == Formula::Kind::And) != negate;
      return mk_and ? f_and(std::move(kids)) : f_or(std::move(kids));
    }
    case Formula::Kind::Implies:
      // a -> b == !a | b
      if (!negate) return f_or(to_nnf(f.children()[0], true), to_nnf(f.children()[1], false));
      return f_and(to_nnf(f.children()[0], false), to_nnf(f.children()[1], true));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      throw Error("to_nnf: quantified formula");
  }
  throw Error("unreachable");
}

namespace {

struct DnfCap : Error {
  DnfCap() : Error("dnf cap") {}
};

// disjuncts are conjunctions (literal lists)
std::vector<std::vector<Formula>> dnf_rec(const Formula& f, size_t cap) {
  switch (f.kind()) {
    case Formula::Kind::False:
      return {};
    case Formula::Kind::True:
      return {{}};
    case Formula::Kind::Or: {
      std::vector<std::vector<Formula>> out;
      for (const auto& k : f.children()) {
        auto sub = dnf_rec(k, cap);
        for (auto& d : sub) {
          out.push_back(std::move(d));
          if (out.size() > cap) throw DnfCap();
        }
      }
      return out;
    }
    case Formula::Kind::And: {
      std::vector<std::vector<Formula>> acc = {{}};
      for (const auto& k : f.children()) {
        auto sub = dnf_rec(k, cap);
        std::vector<std::vector<Formula>> next;
        for (const auto& a : acc)
          for (const auto& b : sub) {
            std::vector<Formula> merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            next.push_back(std::move(merged));
            if (next.size() > cap) throw DnfCap();
          }
        acc = std::move(next);
      }
      return acc;
    }
    default:
      return {{f}};
  }
}

}  // namespace

std::optional<std::vector<PolyhedralDisjunct>> to_polyhedral_dnf(const Formula& f,
                                                                 size_t max_disjuncts) {
  if (!is_quantifier_free(f)) throw Error("to_polyhedral_dnf: quantified input");
  Formula nnf = to_nnf(f);
  std::vector<std::vector<Formula>> raw;
  try {
    raw = dnf_rec(nnf, max_disjuncts);
  } catch (const DnfCap&) {
    return std::nullopt;
  }
  std::vector<PolyhedralDisjunct> out;
  for (auto& lits : raw) {
    PolyhedralDisjunct d;
    std::vector<Formula> residual;
    bool dead = false;
    for (auto& lit : lits) {
      if (lit.kind() == Formula::Kind::Cmp) {
        const LinearTerm& t = lit.term();
        switch (lit.rel()) {
          case Formula::Rel::Le:
            if (t.is_constant()) {
              if (t.constant_part() > 0) dead = true;
            } else {
              d.inequalities.push_back(t);
            }
            break;
          case Formula::Rel::Lt:
            if (t.is_constant()) {
              if (t.constant_part() >= 0) dead = true;
            } else if (t.all_vars_integer() && t.all_coeffs_integer()) {
              LinearTerm u = t;
              u.add_constant(1);  // t < 0 over ints: t + 1 <= 0
              d.inequalities.push_back(u);
            } else {
              residual.push_back(lit);  // strict over reals stays residual
            }
            break;
          case Formula::Rel::Eq:
            if (t.is_constant()) {
              if (t.constant_part() != 0) dead = true;
            } else {
              d.inequalities.push_back(t);
              d.inequalities.push_back(t.negated());
            }
            break;
        }
      } else {
        residual.push_back(lit);
      }
    }
    if (dead) continue;
    d.residual = f_and(std::move(residual));
    if (d.residual.is_false()) continue;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace galatt
