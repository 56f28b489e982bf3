// SPDX-License-Identifier: Apache-2.0
//
// Symbolic game structures (L, l_init, I, X, dom, delta), symbolic state
// sets, the enforceable predecessor operator for both players, loop-game
// construction and meta-variable lifting.

#ifndef GALATT_GAME_HPP
#define GALATT_GAME_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "formula.hpp"
#include "smt_backend.hpp"

namespace galatt {

enum class Player { Sys, Env };

inline Player opponent(Player p) { return p == Player::Sys ? Player::Env : Player::Sys; }
inline const char* player_name(Player p) { return p == Player::Sys ? "Sys" : "Env"; }

using LocId = int;

struct WinningCondition {
  enum class Kind { Reach, Safety, Buchi, CoBuchi };
  Kind kind = Kind::Reach;
  std::vector<LocId> locations;
};

class SymbolicGame {
 public:
  SymbolicGame(std::vector<std::string> locations, LocId initial, std::vector<Variable> inputs,
               std::vector<Variable> vars);

  size_t size() const { return locations_.size(); }
  const std::vector<std::string>& locations() const { return locations_; }
  const std::string& location_name(LocId l) const { return locations_.at(l); }
  std::optional<LocId> find_location(const std::string& name) const;
  LocId initial() const { return initial_; }
  const std::vector<Variable>& inputs() const { return inputs_; }
  const std::vector<Variable>& vars() const { return vars_; }

  const Formula& dom(LocId l) const { return dom_.at(l); }
  void set_dom(LocId l, Formula f) { dom_.at(l) = std::move(f); }
  const Formula& delta(LocId from, LocId to) const { return delta_.at(from * size() + to); }
  void set_delta(LocId from, LocId to, Formula f);

  std::vector<LocId> successors(LocId l) const;
  std::vector<LocId> predecessors(LocId l) const;
  // locations that lie on a cycle of the location graph
  std::vector<bool> cyclic_locations() const;

  bool non_blocking_verified() const { return non_blocking_verified_; }
  void set_non_blocking_verified(bool v) { non_blocking_verified_ = v; }

 private:
  std::vector<std::string> locations_;
  LocId initial_;
  std::vector<Variable> inputs_;
  std::vector<Variable> vars_;
  std::vector<Formula> dom_;
  std::vector<Formula> delta_;  // dense LxL, bottom by default
  bool non_blocking_verified_ = false;
};

// Map L -> Formula over X; unmentioned locations are bottom.
class SymbolicState {
 public:
  SymbolicState() = default;
  explicit SymbolicState(size_t n) : at_(n, Formula::fls()) {}
  SymbolicState(size_t n, const Formula& f) : at_(n, f) {}

  size_t size() const { return at_.size(); }
  const Formula& operator[](LocId l) const { return at_.at(l); }
  Formula& operator[](LocId l) { return at_.at(l); }

  bool structurally_equal(const SymbolicState& o) const;
  std::string display(const SymbolicGame& g) const;

 private:
  std::vector<Formula> at_;
};

// ValidIn(l) := exists X'. \/_{l'} delta(l,l') /\ dom(l')'
Formula valid_input_formula(const SymbolicGame& g, LocId l);

// Warn-only well-formedness check: every dom(l)-state admits a valid input.
// Unknown verdicts are reported as unverified (nullopt).
std::optional<bool> check_non_blocking(const SymbolicGame& g, SmtBackend& smt);

struct CpreOptions {
  bool apply_qelim = true;
  bool apply_simplify = true;
};

// Symbolic enforceable predecessor (one move of each player).
SymbolicState cpre(const SymbolicGame& g, Player p, const SymbolicState& d, SmtBackend& smt,
                   const CpreOptions& opts = {});
Formula cpre_at(const SymbolicGame& g, Player p, const SymbolicState& d, LocId l,
                SmtBackend& smt, const CpreOptions& opts = {});

// Loop game: adds l_end with dom(l_split); edges into l_split are redirected
// to l_end; l_end has only a frozen self loop.
SymbolicGame loop_game(const SymbolicGame& g, LocId l_split, const std::string& l_end_name);

// G lifted by meta-variables kept constant by every transition.
SymbolicGame lift(const SymbolicGame& g, const std::vector<Variable>& meta);

// ---- basic attractor fixpoint (no acceleration) ----

struct AttractorHooks {
  // called after the equivalence check of each iteration; may extend `a`
  std::function<void(SymbolicState& a, int iteration)> extend;
  std::function<bool()> deadline_expired;
};

struct AttractorResult {
  SymbolicState a;
  bool completed = false;
  int iterations = 0;
  bool unknown_equivalence = false;
};

AttractorResult attractor_fixpoint(const SymbolicGame& g, Player p, const SymbolicState& target,
                                   SmtBackend& smt, int max_iter,
                                   const AttractorHooks& hooks = {},
                                   const CpreOptions& cpre_opts = {});

}  // namespace galatt

#endif
