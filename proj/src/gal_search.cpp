// SPDX-License-Identifier: Apache-2.0

#include "gal_search.hpp"

#include <algorithm>

#include "simplify.hpp"

namespace galatt {

namespace {

std::vector<Variable> ambient_vars(const SymbolicGame& g) {
  std::vector<Variable> v = g.vars();
  std::sort(v.begin(), v.end());
  return v;
}

Formula disjunct_rest(const PolyhedralDisjunct& d, const std::vector<size_t>& used) {
  std::vector<Formula> conj;
  for (size_t i = 0; i < d.inequalities.size(); ++i) {
    if (std::find(used.begin(), used.end(), i) != used.end()) continue;
    conj.push_back(Formula::atom(d.inequalities[i], Formula::Rel::Le));
  }
  if (!d.residual.is_true()) conj.push_back(d.residual);
  return f_and(std::move(conj));
}

// base lemma for inequality t <= 0: ranking term is the variable part,
// bounded above by -constant
Gal ineq_base_gal(const LinearTerm& ineq, const std::vector<Variable>& ambient) {
  LinearTerm term = ineq;
  Rational c = term.constant_part();
  term.add_constant(-c);
  return base_gal(term, std::nullopt, -c, Rational(1)).with_vars(ambient);
}

// Candidate lemma built from a single polyhedral disjunct: selected
// inequalities become intersected ranking bases, everything else an
// invariant.
std::optional<Gal> disjunct_candidate(const PolyhedralDisjunct& d,
                                      const std::vector<size_t>& selection,
                                      const std::vector<Variable>& ambient) {
  Gal g = trivial_gal(ambient);
  bool first = true;
  for (size_t idx : selection) {
    Gal b = ineq_base_gal(d.inequalities[idx], ambient);
    g = first ? b : intersect(g, b);
    first = false;
  }
  Formula rest = disjunct_rest(d, selection);
  if (!rest.is_true()) {
    try {
      g = strengthen(g, rest);
    } catch (const Error&) {
      return std::nullopt;  // residual over variables outside the game
    }
  }
  return g;
}

struct Candidate {
  Gal gal;
  const char* origin;
};

// Deterministic, cheapest-first candidate enumeration per the target's
// polyhedral form: single-inequality bases, pairwise intersections, full
// per-disjunct intersections, then lexicographic unions over disjunct orders.
std::vector<Candidate> enumerate_candidates(const std::vector<PolyhedralDisjunct>& dnf,
                                            const std::vector<Variable>& ambient,
                                            int max_candidates) {
  std::vector<Candidate> out;
  auto add = [&](std::optional<Gal> g, const char* origin) {
    if (!g) return;
    if (static_cast<int>(out.size()) >= max_candidates) return;
    for (const auto& c : out)
      if (c.gal.base == g->base && c.gal.step == g->step && c.gal.conc == g->conc) return;
    out.push_back({std::move(*g), origin});
  };

  for (const auto& d : dnf) {
    if (d.inequalities.empty()) add(disjunct_candidate(d, {}, ambient), "residual");
    for (size_t i = 0; i < d.inequalities.size(); ++i)
      add(disjunct_candidate(d, {i}, ambient), "single");
  }
  for (const auto& d : dnf) {
    if (d.inequalities.size() < 3) continue;  // pairs of 2 equal the full one
    for (size_t i = 0; i < d.inequalities.size(); ++i)
      for (size_t j = i + 1; j < d.inequalities.size(); ++j)
        add(disjunct_candidate(d, {i, j}, ambient), "pair");
  }
  std::vector<std::optional<Gal>> full;
  for (const auto& d : dnf) {
    std::vector<size_t> all(d.inequalities.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    full.push_back(disjunct_candidate(d, all, ambient));
    if (d.inequalities.size() >= 2) add(full.back(), "full");
  }
  if (dnf.size() >= 2) {
    auto fold = [&](bool reversed) -> std::optional<Gal> {
      std::optional<Gal> acc;
      for (size_t k = 0; k < full.size(); ++k) {
        const auto& g = full[reversed ? full.size() - 1 - k : k];
        if (!g) return std::nullopt;
        acc = acc ? lex_union(*acc, *g) : *g;
      }
      return acc;
    };
    add(fold(false), "lex");
    add(fold(true), "lex-rev");
  }
  return out;
}

struct SearchState {
  const SymbolicGame& g;
  Player p;
  LocId l;
  GalSearchContext& ctx;
};

std::optional<Gal> search(SearchState& st, const SymbolicState& target, int depth);

// One candidate through the iterate/recurse loop of Alg. 3. Returns the
// refined lemma when its step enforcement condition is implied by
// conc /\ !base /\ dom(l).
std::optional<Gal> refine_candidate(SearchState& st, const SymbolicState& target, Gal cand,
                                    int depth) {
  auto& ctx = st.ctx;
  for (int iter = 0; iter < ctx.budget.max_iterations; ++iter) {
    if (ctx.deadline_expired && ctx.deadline_expired()) return std::nullopt;
    Formula need = simplify_syntactic(f_and({cand.conc, f_not(cand.base), st.g.dom(st.l)}));
    if (need.is_false()) return cand;  // base covers conc, nothing to enforce
    Formula pre = loop_step(st.g, st.p, target, st.l, cand.step, ctx);
    if (ctx.smt.implies(need, pre) == Validity::Valid) return cand;
    bool recurse = depth < ctx.budget.max_recursion && !(pre == target[st.l]) &&
                   ctx.smt.check_sat(pre) == SolverVerdict::Sat;
    if (recurse) {
      SymbolicState sub_target(st.g.size());
      sub_target[st.l] = pre;
      auto sub = search(st, sub_target, depth + 1);
      if (sub) {
        cand = chain(cand, *sub);
        continue;
      }
    }
    // fall back to making the enforcement condition an invariant
    Formula inv = simplify_syntactic(pre);
    if (inv.is_false() || inv.is_true()) return std::nullopt;
    try {
      cand = strengthen(cand, inv);
    } catch (const Error&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<Gal> search(SearchState& st, const SymbolicState& target, int depth) {
  auto& ctx = st.ctx;
  if (ctx.stats) ++ctx.stats->searches;
  Formula goal = simplify_syntactic(target[st.l]);
  if (goal.is_false()) return std::nullopt;
  if (!is_quantifier_free(goal) || has_placeholders(goal)) return std::nullopt;
  auto dnf = to_polyhedral_dnf(goal, ctx.dnf_cap);
  if (!dnf || dnf->empty()) return std::nullopt;
  auto candidates = enumerate_candidates(*dnf, ambient_vars(st.g), ctx.budget.max_candidates);
  for (auto& cand : candidates) {
    if (ctx.deadline_expired && ctx.deadline_expired()) return std::nullopt;
    if (ctx.stats) ++ctx.stats->candidates;
    auto refined = refine_candidate(st, target, std::move(cand.gal), depth);
    if (refined) return refined;
  }
  return std::nullopt;
}

}  // namespace

Formula loop_step(const SymbolicGame& g, Player p, const SymbolicState& target, LocId l,
                  const Formula& step, GalSearchContext& ctx) {
  if (ctx.stats) ++ctx.stats->loop_steps;
  if (step.is_false()) {
    bool all_bottom = true;
    for (size_t i = 0; i < target.size(); ++i)
      if (!target[static_cast<LocId>(i)].is_false()) all_bottom = false;
    if (all_bottom) return Formula::fls();
  }
  std::string end_name = "$loop$" + g.location_name(l);
  SymbolicGame loop = loop_game(g, l, end_name);
  const LocId l_end = static_cast<LocId>(loop.size() - 1);

  // frozen copies of the program variables: step[X -> E, X' -> X]
  SubstMap swap;
  for (const auto& x : g.vars()) {
    Variable e{"e$" + x.name, x.sort, false};
    if (x.sort == Sort::Bool) {
      swap[x] = Formula::var(e);
      swap[x.primed_version()] = Formula::var(x);
    } else {
      swap[x] = LinearTerm(e);
      swap[x.primed_version()] = LinearTerm(x);
    }
  }
  SymbolicState loop_target(loop.size());
  for (size_t i = 0; i < g.size(); ++i)
    loop_target[static_cast<LocId>(i)] = target[static_cast<LocId>(i)];
  loop_target[l_end] = substitute(step, swap);

  AttractorHooks hooks;
  hooks.deadline_expired = ctx.deadline_expired;
  auto res = attractor_fixpoint(loop, p, loop_target, ctx.smt, ctx.budget.loopstep_iter_cap,
                                hooks);
  // under-approximation is sound here, completion is not required
  SubstMap back;
  for (const auto& x : g.vars()) {
    Variable e{"e$" + x.name, x.sort, false};
    if (x.sort == Sort::Bool)
      back[e] = Formula::var(x);
    else
      back[e] = LinearTerm(x);
  }
  return ctx.smt.simplify(substitute(res.a[l], back));
}

std::optional<Gal> get_gal(const SymbolicGame& g, Player p, LocId l,
                           const SymbolicState& target, GalSearchContext& ctx) {
  SearchState st{g, p, l, ctx};
  return search(st, target, 0);
}

Formula accelerate(const SymbolicGame& g, Player p, const SymbolicState& target, LocId l,
                   GalSearchContext& ctx) {
  auto gal = get_gal(g, p, l, target, ctx);
  if (!gal) return Formula::fls();
  // Alg. 2 line 4: base must be contained in the target at l, and the step
  // must be enforceable from every conc /\ !base state.
  if (ctx.smt.implies(f_and(gal->base, g.dom(l)), target[l]) != Validity::Valid)
    return Formula::fls();
  Formula psi = loop_step(g, p, target, l, gal->step, ctx);
  if (ctx.smt.implies(f_and({gal->conc, f_not(gal->base), g.dom(l)}), psi) != Validity::Valid)
    return Formula::fls();
  if (ctx.on_accepted) ctx.on_accepted(*gal);
  return ctx.smt.simplify(f_and(gal->conc, g.dom(l)));
}

}  // namespace galatt
