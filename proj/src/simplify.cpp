// SPDX-License-Identifier: Apache-2.0

#include "simplify.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace galatt {

namespace {

using Rel = Formula::Rel;
using Kind = Formula::Kind;

bool is_int_valued(const LinearTerm& t) {
  return t.all_vars_integer() && t.all_coeffs_integer();
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

Rational floor_rat(const Rational& r) { return Rational(floor_div(numerator(r), denominator(r))); }
Rational ceil_rat(const Rational& r) { return -floor_rat(-r); }

// Atom-level rewriting: fold ground atoms, tighten integer atoms.
Formula simplify_atom(const Formula& f) {
  const LinearTerm& t = f.term();
  if (t.is_constant()) {
    switch (f.rel()) {
      case Rel::Le: return Formula::boolean(t.constant_part() <= 0);
      case Rel::Lt: return Formula::boolean(t.constant_part() < 0);
      case Rel::Eq: return Formula::boolean(t.constant_part() == 0);
    }
  }
  if (!is_int_valued(t)) return f;
  // canonical form has integer coefficients; g = gcd of variable coefficients
  BigInt g = 0;
  for (const auto& [v, c] : t.coeffs()) g = gcd(g, numerator(c));
  if (g < 0) g = -g;
  const Rational c = t.constant_part();
  if (f.rel() == Rel::Eq) {
    if (numerator(c) % g != 0) return Formula::fls();
    if (g == 1) return f;
    return Formula::atom(t.scaled(Rational(1, g)), Rel::Eq);
  }
  // t' = sum(a_i/g v_i); t <= 0  <=>  t' <= floor(-c/g)
  LinearTerm unit;
  for (const auto& [v, c2] : t.coeffs()) unit.add(v, c2 / g);
  Rational bound = -c / g;
  if (f.rel() == Rel::Lt) bound = (denominator(bound) == 1) ? bound - 1 : floor_rat(bound);
  else bound = floor_rat(bound);
  unit.add_constant(-bound);
  return Formula::atom(unit, Rel::Le);
}

// literal complement for contradiction/tautology detection
std::optional<Formula> literal_complement(const Formula& f) {
  switch (f.kind()) {
    case Kind::Cmp:
      switch (f.rel()) {
        case Rel::Le: return Formula::atom(f.term().negated(), Rel::Lt);
        case Rel::Lt: return Formula::atom(f.term().negated(), Rel::Le);
        case Rel::Eq: return f_not(f);
      }
      return std::nullopt;
    case Kind::BoolVar:
    case Kind::Opaque:
      return f_not(f);
    case Kind::Not:
      return f.children()[0];
    default:
      return std::nullopt;
  }
}

struct Bound {
  Rational value;
  bool strict = false;
  bool present = false;
};

// slope key: variable coefficients scaled to gcd 1 with positive leading sign
struct Slope {
  std::map<Variable, Rational> unit;
  friend bool operator<(const Slope& a, const Slope& b) { return a.unit < b.unit; }
};

struct SlopeInfo {
  LinearTerm term;  // the unit term s (no constant)
  bool int_valued = false;
  Bound upper, lower;       // s <= u, s >= l
  bool contradictory = false;
};

// decomposes a canonical atom into (slope, is_upper, bound)
struct AtomBound {
  Slope slope;
  LinearTerm unit_term;
  bool int_valued;
  bool upper;
  Rational bound;
  bool strict;
  bool eq;
};

AtomBound decompose(const Formula& atom) {
  const LinearTerm& t = atom.term();
  BigInt g = 0;
  bool ints = is_int_valued(t);
  for (const auto& [v, c] : t.coeffs()) g = gcd(g, numerator(c));
  if (g < 0) g = -g;
  if (g == 0) g = 1;
  bool flip = t.coeffs().begin()->second < 0;
  LinearTerm unit;
  for (const auto& [v, c] : t.coeffs()) unit.add(v, flip ? -c / g : c / g);
  // t rel 0 where t = g'*s + c with g' = +-g
  Rational bound = -t.constant_part() / g;  // s <= bound (if not flipped)
  AtomBound ab;
  ab.slope.unit = unit.coeffs();
  ab.unit_term = unit;
  ab.int_valued = ints;
  ab.eq = atom.rel() == Rel::Eq;
  ab.strict = atom.rel() == Rel::Lt;
  if (flip) {
    ab.upper = false;
    ab.bound = -bound;
  } else {
    ab.upper = true;
    ab.bound = bound;
  }
  return ab;
}

Formula emit_upper(const LinearTerm& s, const Rational& u, bool strict) {
  LinearTerm t = s;
  t.add_constant(-u);
  return Formula::atom(t, strict ? Rel::Lt : Rel::Le);
}
Formula emit_lower(const LinearTerm& s, const Rational& l, bool strict) {
  LinearTerm t = s.negated();
  t.add_constant(l);
  return Formula::atom(t, strict ? Rel::Lt : Rel::Le);
}
Formula emit_eq(const LinearTerm& s, const Rational& v) {
  LinearTerm t = s;
  t.add_constant(-v);
  return Formula::atom(t, Rel::Eq);
}

// Tighten a bound for integer-valued terms; returns (value, strict=false).
Rational int_upper(const Rational& u, bool strict) {
  if (denominator(u) == 1) return strict ? u - 1 : u;
  return floor_rat(u);
}
Rational int_lower(const Rational& l, bool strict) {
  if (denominator(l) == 1) return strict ? l + 1 : l;
  return ceil_rat(l);
}

// Merge linear bounds inside an And (conj=true) or Or (conj=false).
std::optional<std::vector<Formula>> merge_bounds(const std::vector<Formula>& kids, bool conj) {
  std::map<Slope, SlopeInfo> groups;
  std::vector<Formula> others;
  std::vector<const Formula*> eq_atoms_or;
  for (const auto& k : kids) {
    if (k.kind() != Kind::Cmp || k.term().is_constant()) {
      others.push_back(k);
      continue;
    }
    if (!conj && k.rel() == Rel::Eq) {
      others.push_back(k);  // equalities do not merge disjunctively
      continue;
    }
    AtomBound ab = decompose(k);
    auto& info = groups[ab.slope];
    if (!info.upper.present && !info.lower.present) {
      info.term = ab.unit_term;
      info.int_valued = ab.int_valued;
    }
    auto apply = [&](bool upper, Rational val, bool strict) {
      if (ab.int_valued) {
        val = upper ? int_upper(val, strict) : int_lower(val, strict);
        strict = false;
      }
      Bound& b = upper ? info.upper : info.lower;
      if (!b.present) {
        b = {val, strict, true};
        return;
      }
      // conj: keep tightest; disj: keep loosest
      bool tighter = upper ? (val < b.value || (val == b.value && strict && !b.strict))
                           : (val > b.value || (val == b.value && strict && !b.strict));
      if (conj == tighter) b = {val, strict, true};
    };
    if (ab.eq) {
      apply(true, ab.bound, false);
      apply(false, ab.bound, false);
    } else {
      apply(ab.upper, ab.bound, ab.strict);
    }
  }
  if (groups.empty()) return std::nullopt;
  std::vector<Formula> out = others;
  bool changed = false;
  size_t atom_count = 0;
  for (const auto& k : kids)
    if (k.kind() == Kind::Cmp && !k.term().is_constant() && (conj || k.rel() != Rel::Eq))
      ++atom_count;
  size_t emitted = 0;
  for (auto& [slope, info] : groups) {
    const Bound& u = info.upper;
    const Bound& l = info.lower;
    if (conj && u.present && l.present) {
      if (u.value < l.value || (u.value == l.value && (u.strict || l.strict)))
        return std::vector<Formula>{Formula::fls()};
      if (u.value == l.value) {
        out.push_back(emit_eq(info.term, u.value));
        emitted += 1;
        continue;
      }
    }
    if (!conj && u.present && l.present) {
      bool total = l.value < u.value ||
                   (l.value == u.value && !(l.strict && u.strict)) ||
                   (info.int_valued && l.value <= u.value + 1);
      if (total) return std::vector<Formula>{Formula::tru()};
    }
    if (u.present) {
      out.push_back(emit_upper(info.term, u.value, u.strict));
      ++emitted;
    }
    if (l.present) {
      out.push_back(emit_lower(info.term, l.value, l.strict));
      ++emitted;
    }
  }
  if (emitted == atom_count) return std::nullopt;  // nothing merged
  (void)changed;
  return out;
}

Formula simp(const Formula& f);

Formula simp_nary(Kind kind, std::vector<Formula> kids) {
  const bool conj = kind == Kind::And;
  Formula base = conj ? f_and(std::move(kids)) : f_or(std::move(kids));
  if (base.kind() != kind) return base;
  const auto& ks = base.children();
  // complementary literal check
  if (ks.size() <= 128) {
    for (const auto& k : ks) {
      auto comp = literal_complement(k);
      if (!comp) continue;
      for (const auto& other : ks) {
        if (other == *comp) return conj ? Formula::fls() : Formula::tru();
      }
    }
  }
  auto merged = merge_bounds(ks, conj);
  if (merged) {
    Formula r = conj ? f_and(std::move(*merged)) : f_or(std::move(*merged));
    return r;
  }
  return base;
}

// one-point rule inside exists: body conjunct x = t with x a binder
std::optional<std::pair<Variable, LinearTerm>> one_point_candidate(
    const Formula& eq_atom, const std::vector<Variable>& binders) {
  if (eq_atom.kind() != Kind::Cmp || eq_atom.rel() != Rel::Eq) return std::nullopt;
  const LinearTerm& t = eq_atom.term();
  for (const auto& b : binders) {
    auto it = t.coeffs().find(b);
    if (it == t.coeffs().end()) continue;
    const Rational a = it->second;
    // x = -(t - a*x)/a
    LinearTerm rest = t;
    rest.add(b, -a);
    LinearTerm sol = rest.scaled(Rational(-1) / a);
    if (b.sort == Sort::Int && !(sol.all_coeffs_integer() && sol.all_vars_integer())) continue;
    return std::make_pair(b, sol);
  }
  return std::nullopt;
}

Formula quantifier_body_rewrite(Kind q, std::vector<Variable> binders, Formula body);

Formula simp_quant(Kind q, std::vector<Variable> binders, Formula body) {
  body = simp(body);
  // distribute exists over or / forall over and
  Kind dist = q == Kind::Exists ? Kind::Or : Kind::And;
  if (body.kind() == dist) {
    std::vector<Formula> parts;
    for (const auto& k : body.children())
      parts.push_back(simp_quant(q, binders, k));
    return dist == Kind::Or ? f_or(std::move(parts)) : f_and(std::move(parts));
  }
  return quantifier_body_rewrite(q, std::move(binders), std::move(body));
}

Formula quantifier_body_rewrite(Kind q, std::vector<Variable> binders, Formula body) {
  // scope shrink: pull out children not mentioning any binder
  Kind inner = q == Kind::Exists ? Kind::And : Kind::Or;
  if (body.kind() == inner) {
    std::vector<Formula> in, out;
    for (const auto& k : body.children()) {
      auto fv = free_vars(k);
      bool touches = false;
      for (const auto& b : binders)
        if (fv.count(b)) {
          touches = true;
          break;
        }
      (touches ? in : out).push_back(k);
    }
    if (!out.empty()) {
      Formula boxed = simp_quant(q, binders, inner == Kind::And ? f_and(std::move(in))
                                                                : f_or(std::move(in)));
      out.push_back(boxed);
      return inner == Kind::And ? f_and(std::move(out)) : f_or(std::move(out));
    }
  }
  // one-point elimination
  if (q == Kind::Exists && body.kind() == Kind::And) {
    const auto& ks = body.children();
    for (size_t i = 0; i < ks.size(); ++i) {
      auto cand = one_point_candidate(ks[i], binders);
      if (!cand) continue;
      SubstMap sub;
      sub[cand->first] = cand->second;
      std::vector<Formula> rest;
      for (size_t j = 0; j < ks.size(); ++j)
        if (j != i) rest.push_back(substitute(ks[j], sub));
      std::vector<Variable> remaining;
      for (const auto& b : binders)
        if (!(b == cand->first)) remaining.push_back(b);
      return simp_quant(q, std::move(remaining), simp(f_and(std::move(rest))));
    }
  }
  if (q == Kind::Exists && one_point_candidate(body, binders)) {
    return Formula::tru();  // exists x. x = t with t free of x
  }
  if (q == Kind::Forall) {
    // forall x. (... | !(x = t) | ...)  ==  body[x -> t] without the literal
    std::vector<Formula> ks;
    if (body.kind() == Kind::Or)
      ks = body.children();
    else
      ks = {body};
    for (size_t i = 0; i < ks.size(); ++i) {
      Formula lit = ks[i];
      Formula eq = Formula::tru();
      if (lit.kind() == Kind::Not)
        eq = lit.children()[0];
      else
        continue;
      auto cand = one_point_candidate(eq, binders);
      if (!cand) continue;
      SubstMap sub;
      sub[cand->first] = cand->second;
      std::vector<Formula> rest;
      for (size_t j = 0; j < ks.size(); ++j)
        if (j != i) rest.push_back(substitute(ks[j], sub));
      std::vector<Variable> remaining;
      for (const auto& b : binders)
        if (!(b == cand->first)) remaining.push_back(b);
      return simp_quant(q, std::move(remaining), simp(f_or(std::move(rest))));
    }
  }
  return f_quant(q, std::move(binders), body);
}

// push negation towards literals; keeps !(t = 0) and !bool and !opaque
Formula push_not(const Formula& f) {
  switch (f.kind()) {
    case Kind::True: return Formula::fls();
    case Kind::False: return Formula::tru();
    case Kind::Cmp:
      switch (f.rel()) {
        case Rel::Le: return Formula::atom(f.term().negated(), Rel::Lt);
        case Rel::Lt: return Formula::atom(f.term().negated(), Rel::Le);
        case Rel::Eq: return f_not(f);
      }
      return f_not(f);
    case Kind::Not:
      return f.children()[0];
    case Kind::And:
    case Kind::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.children()) kids.push_back(push_not(k));
      return f.kind() == Kind::And ? f_or(std::move(kids)) : f_and(std::move(kids));
    }
    case Kind::Implies:
      return f_and(f.children()[0], push_not(f.children()[1]));
    case Kind::Exists:
    case Kind::Forall:
      return f_quant(f.kind() == Kind::Exists ? Kind::Forall : Kind::Exists, f.binders(),
                     push_not(f.children()[0]));
    default:
      return f_not(f);
  }
}

Formula simp(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::BoolVar:
    case Kind::Opaque:
    case Kind::App:
      return f;
    case Kind::Cmp:
      return simplify_atom(f);
    case Kind::Not: {
      Formula inner = simp(f.children()[0]);
      Formula pushed = push_not(inner);
      // avoid keeping double negations or trivialities
      return pushed;
    }
    case Kind::And:
    case Kind::Or: {
      std::vector<Formula> kids;
      kids.reserve(f.children().size());
      for (const auto& k : f.children()) kids.push_back(simp(k));
      return simp_nary(f.kind(), std::move(kids));
    }
    case Kind::Implies: {
      Formula a = simp(f.children()[0]);
      Formula b = simp(f.children()[1]);
      if (a == b) return Formula::tru();
      return f_implies(a, b);
    }
    case Kind::Exists:
    case Kind::Forall:
      return simp_quant(f.kind(), f.binders(), f.children()[0]);
  }
  throw Error("unreachable");
}

}  // namespace

Formula simplify_syntactic(const Formula& f) {
  Formula cur = f;
  for (int round = 0; round < 4; ++round) {
    Formula next = simp(cur);
    if (next == cur) return next;
    cur = next;
  }
  return cur;
}

}  // namespace galatt
