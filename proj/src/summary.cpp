// SPDX-License-Identifier: Apache-2.0

#include "summary.hpp"

#include <algorithm>

#include "simplify.hpp"

namespace galatt {

namespace {

Formula var_equals(const Variable& a, const Variable& b) {
  if (a.sort == Sort::Bool) {
    Formula fa = Formula::var(a), fb = Formula::var(b);
    return f_and(f_implies(fa, fb), f_implies(fb, fa));
  }
  return Formula::cmp(LinearTerm(a), Formula::RelOp::Eq, LinearTerm(b));
}

}  // namespace

std::string EnforcementSummary::placeholder_name(const SymbolicGame& g, LocId l) const {
  return "next$" + g.location_name(l);
}

bool point_enforceable(const SymbolicGame& g, Player p, const Variable& x,
                       const std::vector<LocId>& support_set, SmtBackend& smt) {
  Variable k{"m$pe$" + x.name, x.sort, false};
  SymbolicGame lifted = lift(g, {k});
  for (LocId l : support_set) {
    SymbolicState target(lifted.size());
    for (LocId to : g.successors(l)) target[to] = var_equals(x, k);
    CpreOptions opts;
    opts.apply_qelim = false;  // the surrounding quantifiers are checked whole
    Formula pre = cpre_at(lifted, p, target, l, smt, opts);
    std::vector<Variable> others;
    for (const auto& v : g.vars())
      if (!(v == x)) others.push_back(v);
    Formula cond = f_exists(others, f_forall({k}, f_exists({x}, pre)));
    if (smt.check_valid(simplify_syntactic(cond)) != Validity::Valid) return false;
  }
  return true;
}

SummaryTemplate derive_template(const SymbolicGame& g, Player p, LocId l_s,
                                const SymbolicState& a, const std::vector<LocId>& support_set,
                                const std::vector<Variable>& gvars, SmtBackend& smt) {
  (void)p;
  SummaryTemplate t;
  t.support_loc = l_s;
  t.support_set = support_set;
  t.gvars = gvars;
  t.tau = SymbolicState(g.size());
  for (LocId l : support_set) {
    if (l == l_s) continue;
    Formula general = a[l];
    if (!gvars.empty()) {
      Formula quantified = f_exists(gvars, a[l]);
      general = simplify_syntactic(quantified);
      if (!is_quantifier_free(general)) {
        if (auto qf = smt.qelim(general)) general = *qf;
        // on QE failure the quantified prefix stays (support checks remain
        // validity queries)
      }
    }
    std::vector<Formula> conj{general};
    for (const auto& x : gvars) {
      Variable m{"m$" + x.name + "$" + g.location_name(l), x.sort, false};
      t.meta.push_back(m);
      conj.push_back(var_equals(x, m));
    }
    if (a[l].is_true()) {
      for (const auto& x : g.vars()) {
        if (std::find(gvars.begin(), gvars.end(), x) != gvars.end()) continue;
        Variable m{"m$" + x.name + "$" + g.location_name(l), x.sort, false};
        t.meta.push_back(m);
        conj.push_back(var_equals(x, m));
      }
    }
    t.tau[l] = f_and(std::move(conj));
  }
  return t;
}

std::optional<EnforcementSummary> compute_summary(const SymbolicGame& g, Player p, LocId l_s,
                                                  const SummaryTemplate& tmpl,
                                                  const LiftedAttractorFn& attractor,
                                                  SmtBackend& smt) {
  SymbolicGame lifted = lift(g, tmpl.meta);
  AttractorResult res = attractor(lifted, p, tmpl.tau);
  Formula psi = res.a[l_s];
  if (smt.check_sat(psi) != SolverVerdict::Sat) return std::nullopt;

  EnforcementSummary s;
  s.player = p;
  s.support_loc = l_s;
  s.tmpl = tmpl;
  s.game_vars = g.vars();

  std::vector<Formula> conj{psi};
  for (size_t l = 0; l < g.size(); ++l) {
    const Formula& tau_l = tmpl.tau[static_cast<LocId>(l)];
    if (tau_l.is_false()) continue;  // forall X. (false -> next_l) is trivial
    std::vector<Sort> arg_sorts;
    std::vector<TermOrFormula> args;
    for (const auto& x : g.vars()) {
      arg_sorts.push_back(x.sort);
      if (x.sort == Sort::Bool)
        args.emplace_back(Formula::var(x));
      else
        args.emplace_back(LinearTerm(x));
    }
    PlaceholderSymbol sym{s.placeholder_name(g, static_cast<LocId>(l)), arg_sorts};
    Formula next = Formula::app(sym, std::move(args));
    conj.push_back(f_forall(g.vars(), f_implies(tau_l, next)));
  }
  s.statement = f_exists(tmpl.meta, f_and(std::move(conj)));
  return s;
}

bool in_support(const SymbolicGame& g, const EnforcementSummary& s, const SymbolicState& a,
                SmtBackend& smt) {
  std::vector<Formula> conj;
  for (size_t l = 0; l < g.size(); ++l) {
    const Formula& tau_l = s.tmpl.tau[static_cast<LocId>(l)];
    if (tau_l.is_false()) continue;
    conj.push_back(f_forall(g.vars(), f_implies(tau_l, a[static_cast<LocId>(l)])));
  }
  Formula cond = simplify_syntactic(f_and(std::move(conj)));
  return smt.check_sat(cond) == SolverVerdict::Sat;
}

Formula apply_summary(const SymbolicGame& g, const EnforcementSummary& s,
                      const SymbolicState& a, SmtBackend& smt) {
  PlaceholderMap map;
  for (size_t l = 0; l < g.size(); ++l)
    map[s.placeholder_name(g, static_cast<LocId>(l))] =
        PlaceholderDef{s.game_vars, a[static_cast<LocId>(l)]};
  Formula inst = instantiate_placeholders(s.statement, map);
  inst = simplify_syntactic(inst);
  if (!is_quantifier_free(inst)) {
    if (auto qf = smt.qelim(inst)) inst = *qf;  // QE failure keeps quantifiers (legal)
  }
  return smt.simplify(inst);
}

}  // namespace galatt
