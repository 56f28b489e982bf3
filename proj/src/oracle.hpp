// SPDX-License-Identifier: Apache-2.0
//
// Ground-truth machinery for tests: explicit-state game solving on finite
// domains, bounded GAL condition checking, and the random game generator
// behind the differential harness.

#ifndef GALATT_ORACLE_HPP
#define GALATT_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <set>

#include "gal.hpp"
#include "game.hpp"

namespace galatt {

struct FiniteDomain {
  // inclusive integer ranges; boolean variables implicitly range over {0,1}
  std::map<Variable, std::pair<long, long>> ranges;

  std::pair<long, long> range_of(const Variable& v) const;
};

// Formula compiled against a fixed variable slot layout for fast repeated
// ground evaluation. Falls back on exact rationals only at compile time.
class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const std::vector<Variable>& slots);
  bool eval(const int64_t* values) const;

 private:
  struct Node;
  std::vector<Node> nodes_;  // nodes_[0] is the root
  friend struct CompiledEval;
};

using StateId = uint32_t;

class ExplicitGame {
 public:
  ExplicitGame(const SymbolicGame& g, FiniteDomain dom, size_t state_cap = 1000000);

  const SymbolicGame& game() const { return *game_; }
  const FiniteDomain& domain() const { return dom_; }

  size_t num_states() const { return states_.size(); }           // dom-satisfying only
  const std::vector<StateId>& states() const { return states_; }  // packed ids
  size_t num_inputs() const { return num_ivals_; }

  LocId state_location(StateId s) const;
  Assignment state_assignment(StateId s) const;
  bool is_state(LocId l, const Assignment& nu) const;
  StateId pack(LocId l, const Assignment& nu) const;

  bool input_valid(StateId s, size_t input) const;
  const std::vector<StateId>& successors(StateId s, size_t input) const;

  // one-step enforceable predecessors of S for player p
  std::set<StateId> one_step_pred(Player p, const std::set<StateId>& S) const;
  // player-p attractor of targets (backward fixpoint, exact)
  std::set<StateId> attractor(Player p, const std::set<StateId>& targets) const;
  // exact Buchi winning states for p (visit `accepting` locations infinitely often)
  std::set<StateId> buchi_winning(Player p, const std::vector<LocId>& accepting) const;

  std::set<StateId> states_where(const SymbolicState& d) const;  // evaluates d /\ dom
  std::set<StateId> states_at(const std::vector<LocId>& locs) const;

  bool all_initial_in(const std::set<StateId>& w) const;

 private:
  const SymbolicGame* game_;
  FiniteDomain dom_;
  std::vector<Variable> xvars_, ivars_;
  std::vector<long> xlo_, xspan_, ilo_, ispan_;
  size_t num_xvals_ = 1, num_ivals_ = 1;
  std::vector<StateId> states_;
  std::vector<uint8_t> ok_;                        // loc * num_xvals + xval
  std::vector<std::vector<StateId>> succ_;         // (stateIndex * num_ivals + input)
  std::vector<uint8_t> valid_in_;
  std::vector<uint32_t> dense_index_;              // packed id -> state index
  void decode_x(size_t xval, int64_t* out) const;
};

// ---- bounded GAL refutation ----

struct GalCounterexample {
  enum class Kind { ConcNotInvariant, Lasso, StuckPath };
  Kind kind;
  std::vector<Assignment> trace;
  std::string description;
};

// Bounded search for refutations of Def.-1 conditions on a finite domain.
// none = no refutation found (not a proof). Only variables occurring in the
// lemma are enumerated.
std::optional<GalCounterexample> check_gal_bounded(const Gal& gal, const FiniteDomain& dom,
                                                   int max_len, int window);

// ---- random games ----

struct RandomGameSpec {
  int min_locations = 2, max_locations = 4;
  int min_vars = 2, max_vars = 3;
  long lo = 0, hi = 3;
  int num_inputs = 1;
};

struct RandomGame {
  SymbolicGame game;
  FiniteDomain domain;
  WinningCondition reach;
  WinningCondition buchi;
};

RandomGame random_game(uint64_t seed, const RandomGameSpec& spec = {});

// random symbolic target over the game's variables (seeded)
SymbolicState random_target(const SymbolicGame& g, std::mt19937_64& rng);

}  // namespace galatt

#endif
