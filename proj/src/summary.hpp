// SPDX-License-Identifier: Apache-2.0
//
// Enforcement summaries: target-parameterized enforcement statements with
// placeholder symbols next_l, their templates over meta-variables,
// point-enforceable variable detection, and summary application.

#ifndef GALATT_SUMMARY_HPP
#define GALATT_SUMMARY_HPP

#include <functional>
#include <optional>

#include "game.hpp"

namespace galatt {

struct SummaryTemplate {
  std::vector<Variable> meta;   // all meta-variables, disjoint from X and I
  SymbolicState tau;            // L -> Formula over X + Meta; bottom outside L_S\{l_s}
  LocId support_loc = 0;
  std::vector<LocId> support_set;  // L_S
  std::vector<Variable> gvars;     // generalized variables G
};

struct EnforcementSummary {
  Player player = Player::Sys;
  LocId support_loc = 0;
  Formula statement;  // phi over X, with placeholders next$<loc>(X)
  SummaryTemplate tmpl;
  std::vector<Variable> game_vars;  // X (placeholder formals)

  std::string placeholder_name(const SymbolicGame& g, LocId l) const;
};

// x is point-enforceable by p in L_S when, at every l in L_S, some state lets
// p force x onto any prescribed constant within one step into a successor.
bool point_enforceable(const SymbolicGame& g, Player p, const Variable& x,
                       const std::vector<LocId>& support_set, SmtBackend& smt);

// Template derived by generalizing the attractor iterate `a` over gvars:
// tau(l) = QELIM(exists G. a(l)) /\ /\_{x in G} x = m^l_x on L_S \ {l_s};
// remaining variables get equality meta-variables where a(l) is trivially
// true. QE failures keep the quantified prefix (sound).
SummaryTemplate derive_template(const SymbolicGame& g, Player p, LocId l_s,
                                const SymbolicState& a, const std::vector<LocId>& support_set,
                                const std::vector<Variable>& gvars, SmtBackend& smt);

using LiftedAttractorFn =
    std::function<AttractorResult(const SymbolicGame&, Player, const SymbolicState&)>;

// Runs the (possibly accelerated) attractor towards tau in the lifted game
// and assembles phi := exists Meta. psi /\ /\_l forall X. (tau(l) -> next_l).
// none when the attractor value at l_s is unsatisfiable.
std::optional<EnforcementSummary> compute_summary(const SymbolicGame& g, Player p, LocId l_s,
                                                  const SummaryTemplate& tmpl,
                                                  const LiftedAttractorFn& attractor,
                                                  SmtBackend& smt);

// Support membership: sat of the Meta-Skolemized conditions
// /\_l forall X. (tau(l) -> a(l)); unknown is treated as false.
bool in_support(const SymbolicGame& g, const EnforcementSummary& s, const SymbolicState& a,
                SmtBackend& smt);

// phi with next_l instantiated by a(l), quantifier-eliminated when possible.
Formula apply_summary(const SymbolicGame& g, const EnforcementSummary& s,
                      const SymbolicState& a, SmtBackend& smt);

}  // namespace galatt

#endif
