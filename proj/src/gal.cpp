// SPDX-License-Identifier: Apache-2.0

#include "gal.hpp"

#include <algorithm>
#include <sstream>

namespace galatt {

namespace {

std::vector<Variable> sorted_vars(std::vector<Variable> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void require_same_vars(const Gal& a, const Gal& b) {
  if (a.vars != b.vars) throw Error("GAL composition over different variable sets");
}

Formula primed(const Formula& f, const std::vector<Variable>& vars) {
  return prime_vars(f, vars);
}

}  // namespace

Gal Gal::with_vars(std::vector<Variable> v) const {
  Gal g = *this;
  v.insert(v.end(), vars.begin(), vars.end());
  g.vars = sorted_vars(std::move(v));
  return g;
}

std::string Gal::display() const {
  std::ostringstream os;
  os << "base: " << base.display() << "\nstay: " << stay.display()
     << "\nstep: " << step.display() << "\nconc: " << conc.display();
  return os.str();
}

Gal trivial_gal(std::vector<Variable> vars) {
  Gal g;
  g.base = g.stay = g.step = g.conc = Formula::tru();
  g.vars = sorted_vars(std::move(vars));
  return g;
}

Gal base_gal(const LinearTerm& t, const std::optional<Rational>& lower,
             const std::optional<Rational>& upper, const Rational& eps, bool strict) {
  if (eps <= 0) throw Error("base_gal: eps must be positive");
  if (lower && upper && *lower > *upper) throw Error("base_gal: lower bound exceeds upper bound");
  if (t.is_constant()) throw Error("base_gal: constant term");
  for (const auto& [v, c] : t.coeffs())
    if (!v.is_numeric()) throw SortError("base_gal: non-numeric variable " + v.display());

  std::vector<Variable> vars;
  for (const auto& [v, c] : t.coeffs()) vars.push_back(v);
  SubstMap to_primed;
  for (const auto& v : vars) to_primed[v] = LinearTerm(v.primed_version());
  LinearTerm tp = substitute(t, to_primed);

  const auto le = Formula::RelOp::Le;
  const auto lt = Formula::RelOp::Lt;
  const auto ge = Formula::RelOp::Ge;
  const auto gt = Formula::RelOp::Gt;
  auto bound = [&](const LinearTerm& term, Formula::RelOp op, const Rational& c) {
    return Formula::cmp(term, op, LinearTerm(c));
  };

  // in-range condition for a given copy of the term
  auto in_range = [&](const LinearTerm& term) {
    std::vector<Formula> conj;
    if (lower) conj.push_back(bound(term, strict ? gt : ge, *lower));
    if (upper) conj.push_back(bound(term, strict ? lt : le, *upper));
    return f_and(std::move(conj));
  };

  Gal g;
  g.vars = sorted_vars(std::move(vars));
  g.base = in_range(t);
  g.conc = Formula::tru();

  std::vector<Formula> stay_cases{in_range(tp)};
  std::vector<Formula> step_cases{in_range(tp)};
  if (lower) {
    // below the range: do not decrease (stay) / increase by eps (step),
    // never overshooting the upper bound
    std::vector<Formula> stay_c{bound(t, strict ? le : lt, *lower),
                                Formula::cmp(t, le, tp)};
    std::vector<Formula> step_c{bound(t, strict ? le : lt, *lower),
                                Formula::cmp(t + LinearTerm(eps), le, tp)};
    if (upper) {
      stay_c.push_back(bound(tp, strict ? lt : le, *upper));
      step_c.push_back(bound(tp, strict ? lt : le, *upper));
    }
    stay_cases.push_back(f_and(std::move(stay_c)));
    step_cases.push_back(f_and(std::move(step_c)));
  }
  if (upper) {
    std::vector<Formula> stay_c{bound(t, strict ? ge : gt, *upper),
                                Formula::cmp(t, ge, tp)};
    std::vector<Formula> step_c{bound(t, strict ? ge : gt, *upper),
                                Formula::cmp(t - LinearTerm(eps), ge, tp)};
    if (lower) {
      stay_c.push_back(bound(tp, strict ? gt : ge, *lower));
      step_c.push_back(bound(tp, strict ? gt : ge, *lower));
    }
    stay_cases.push_back(f_and(std::move(stay_c)));
    step_cases.push_back(f_and(std::move(step_c)));
  }
  g.stay = f_or(std::move(stay_cases));
  g.step = f_or(std::move(step_cases));
  return g;
}

Gal intersect(const Gal& g0, const Gal& g1) {
  require_same_vars(g0, g1);
  const auto& V = g0.vars;
  Formula stay_base =
      f_and(f_implies(f_and(g0.base, f_not(g1.base)), primed(g0.base, V)),
            f_implies(f_and(g1.base, f_not(g0.base)), primed(g1.base, V)));
  Formula step = f_and(
      stay_base,
      f_or(f_and({g0.step, f_not(g0.base), g1.stay}),
           f_and({g1.step, f_not(g1.base), g0.stay})));
  Gal g;
  g.vars = V;
  g.base = f_and(g0.base, g1.base);
  g.stay = f_and({g0.stay, g1.stay, stay_base});
  g.step = step;
  g.conc = f_and(g0.conc, g1.conc);
  return g;
}

Gal lex_union(const Gal& g0, const Gal& g1) {
  require_same_vars(g0, g1);
  Gal g;
  g.vars = g0.vars;
  g.base = f_or(g0.base, g1.base);
  g.stay = f_and(g0.stay, g1.stay);
  g.step = f_or(f_and(g0.conc, g0.step), f_and({g1.conc, g1.step, g0.stay}));
  g.conc = f_or(g0.conc, g1.conc);
  return g;
}

Gal chain(const Gal& g0, const Gal& g1) {
  require_same_vars(g0, g1);
  const auto& V = g0.vars;
  Gal g;
  g.vars = V;
  g.base = g0.base;
  g.stay = f_and({g0.stay, g1.stay, f_implies(g1.base, primed(g1.base, V))});
  g.step = f_or(g0.step, f_and({g1.conc, f_not(g1.base), g1.step, g0.stay}));
  g.conc = g0.conc;
  return g;
}

Gal strengthen(const Gal& g, const Formula& inv) {
  for (const auto& v : free_vars(inv))
    if (v.primed || std::find(g.vars.begin(), g.vars.end(), v) == g.vars.end())
      throw Error("strengthen: invariant variable outside the GAL's variables: " + v.display());
  Formula inv_primed = primed(inv, g.vars);
  Gal out;
  out.vars = g.vars;
  out.base = f_and(g.base, inv);
  out.stay = f_and(g.stay, inv_primed);
  out.step = f_and(g.step, inv_primed);
  out.conc = f_and(g.conc, inv);
  return out;
}

}  // namespace galatt
