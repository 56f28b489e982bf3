// SPDX-License-Identifier: Apache-2.0
//
// LoopStep / Accelerate and the GAL search: candidate lemmas derived from the
// polyhedral form of the target, refined by iteration (invariants) and
// recursion (chained sub-lemmas).

#ifndef GALATT_GAL_SEARCH_HPP
#define GALATT_GAL_SEARCH_HPP

#include <functional>
#include <optional>

#include "gal.hpp"
#include "game.hpp"

namespace galatt {

struct GalBudget {
  int max_iterations = 4;
  int max_recursion = 2;
  int max_candidates = 32;
  int loopstep_iter_cap = 8;

  GalBudget doubled() const {
    return GalBudget{max_iterations * 2, max_recursion, max_candidates * 2,
                     loopstep_iter_cap * 2};
  }
};

struct GalSearchStats {
  uint64_t searches = 0;       // get_gal invocations (top-level and recursive)
  uint64_t candidates = 0;     // candidate lemmas tried
  uint64_t loop_steps = 0;     // LoopStep evaluations
};

struct GalSearchContext {
  SmtBackend& smt;
  GalBudget budget;
  size_t dnf_cap = 64;
  std::function<bool()> deadline_expired;
  std::function<void(const Gal&)> on_accepted;  // every accepted lemma
  GalSearchStats* stats = nullptr;
};

// Enforcement condition for one step of `step` at location l (Alg. 2
// LoopStep): the loop-game attractor value at l with the frozen pre-state
// constants substituted back.
Formula loop_step(const SymbolicGame& g, Player p, const SymbolicState& target, LocId l,
                  const Formula& step, GalSearchContext& ctx);

// Alg. 3: search for a GAL whose step is enforceable towards target at l.
std::optional<Gal> get_gal(const SymbolicGame& g, Player p, LocId l,
                           const SymbolicState& target, GalSearchContext& ctx);

// Alg. 2: returns conc /\ dom(l) for a GAL passing both validity checks,
// bottom otherwise. Every non-bottom result is sound: its states lie inside
// the player-p attractor of the target.
Formula accelerate(const SymbolicGame& g, Player p, const SymbolicState& target, LocId l,
                   GalSearchContext& ctx);

}  // namespace galatt

#endif
