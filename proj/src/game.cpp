// SPDX-License-Identifier: Apache-2.0

#include "game.hpp"

#include <algorithm>
#include <sstream>

#include "simplify.hpp"

namespace galatt {

SymbolicGame::SymbolicGame(std::vector<std::string> locations, LocId initial,
                           std::vector<Variable> inputs, std::vector<Variable> vars)
    : locations_(std::move(locations)),
      initial_(initial),
      inputs_(std::move(inputs)),
      vars_(std::move(vars)) {
  if (locations_.empty()) throw Error("game needs at least one location");
  if (initial_ < 0 || static_cast<size_t>(initial_) >= locations_.size())
    throw Error("initial location out of range");
  for (const auto& i : inputs_)
    for (const auto& x : vars_)
      if (i.name == x.name) throw Error("variable declared as both input and program: " + i.name);
  dom_.assign(locations_.size(), Formula::tru());
  delta_.assign(locations_.size() * locations_.size(), Formula::fls());
}

std::optional<LocId> SymbolicGame::find_location(const std::string& name) const {
  for (size_t i = 0; i < locations_.size(); ++i)
    if (locations_[i] == name) return static_cast<LocId>(i);
  return std::nullopt;
}

void SymbolicGame::set_delta(LocId from, LocId to, Formula f) {
  delta_.at(from * size() + to) = std::move(f);
}

std::vector<LocId> SymbolicGame::successors(LocId l) const {
  std::vector<LocId> out;
  for (size_t to = 0; to < size(); ++to)
    if (!delta(l, static_cast<LocId>(to)).is_false()) out.push_back(static_cast<LocId>(to));
  return out;
}

std::vector<LocId> SymbolicGame::predecessors(LocId l) const {
  std::vector<LocId> out;
  for (size_t from = 0; from < size(); ++from)
    if (!delta(static_cast<LocId>(from), l).is_false()) out.push_back(static_cast<LocId>(from));
  return out;
}

std::vector<bool> SymbolicGame::cyclic_locations() const {
  // l is cyclic iff l reaches itself through at least one edge
  const size_t n = size();
  std::vector<bool> out(n, false);
  for (size_t l = 0; l < n; ++l) {
    std::vector<bool> seen(n, false);
    std::vector<LocId> stack = successors(static_cast<LocId>(l));
    while (!stack.empty()) {
      LocId cur = stack.back();
      stack.pop_back();
      if (cur == static_cast<LocId>(l)) {
        out[l] = true;
        break;
      }
      if (seen[cur]) continue;
      seen[cur] = true;
      for (LocId nxt : successors(cur)) stack.push_back(nxt);
    }
  }
  return out;
}

bool SymbolicState::structurally_equal(const SymbolicState& o) const {
  if (at_.size() != o.at_.size()) return false;
  for (size_t i = 0; i < at_.size(); ++i)
    if (!(at_[i] == o.at_[i])) return false;
  return true;
}

std::string SymbolicState::display(const SymbolicGame& g) const {
  std::ostringstream os;
  for (size_t l = 0; l < at_.size(); ++l)
    os << g.location_name(static_cast<LocId>(l)) << " -> " << at_[l].display() << "\n";
  return os.str();
}

Formula valid_input_formula(const SymbolicGame& g, LocId l) {
  std::vector<Formula> moves;
  for (LocId to : g.successors(l)) {
    Formula dom_next = prime_vars(g.dom(to), g.vars());
    moves.push_back(f_and(g.delta(l, to), dom_next));
  }
  std::vector<Variable> primed;
  for (const auto& x : g.vars()) primed.push_back(x.primed_version());
  return f_exists(std::move(primed), f_or(std::move(moves)));
}

std::optional<bool> check_non_blocking(const SymbolicGame& g, SmtBackend& smt) {
  bool all_valid = true;
  for (size_t l = 0; l < g.size(); ++l) {
    Formula vi = valid_input_formula(g, static_cast<LocId>(l));
    Formula cond = f_implies(g.dom(static_cast<LocId>(l)),
                             f_exists(g.inputs(), vi));
    switch (smt.check_valid(simplify_syntactic(cond))) {
      case Validity::Valid: break;
      case Validity::Invalid: return false;
      case Validity::Unknown: all_valid = false; break;
    }
  }
  if (!all_valid) return std::nullopt;
  return true;
}

Formula cpre_at(const SymbolicGame& g, Player p, const SymbolicState& d, LocId l,
                SmtBackend& smt, const CpreOptions& opts) {
  // Fast path: with all-bottom targets the result is bottom for verified
  // non-blocking games (forall I. ValidIn -> false is unsatisfiable there).
  bool all_bottom = true;
  for (LocId to : g.successors(l))
    if (!d[to].is_false()) all_bottom = false;
  if (all_bottom && g.non_blocking_verified()) return Formula::fls();

  std::vector<Variable> primed;
  for (const auto& x : g.vars()) primed.push_back(x.primed_version());

  Formula vi = valid_input_formula(g, l);
  Formula result;
  if (p == Player::Sys) {
    std::vector<Formula> moves;
    for (LocId to : g.successors(l)) {
      if (d[to].is_false()) continue;
      moves.push_back(f_and({g.delta(l, to), prime_vars(g.dom(to), g.vars()),
                             prime_vars(d[to], g.vars())}));
    }
    Formula step = f_exists(primed, f_or(std::move(moves)));
    result = f_and(g.dom(l), f_forall(g.inputs(), f_implies(vi, step)));
  } else {
    std::vector<Formula> reqs;
    for (LocId to : g.successors(l)) {
      reqs.push_back(f_implies(
          f_and(g.delta(l, to), prime_vars(g.dom(to), g.vars())),
          prime_vars(d[to], g.vars())));
    }
    Formula step = f_forall(primed, f_and(std::move(reqs)));
    result = f_and(g.dom(l), f_exists(g.inputs(), f_and(vi, step)));
  }
  if (opts.apply_simplify) result = simplify_syntactic(result);
  if (opts.apply_qelim && !is_quantifier_free(result)) {
    if (auto qf = smt.qelim(result)) result = *qf;
  }
  if (opts.apply_simplify) result = smt.simplify(result);
  return result;
}

SymbolicState cpre(const SymbolicGame& g, Player p, const SymbolicState& d, SmtBackend& smt,
                   const CpreOptions& opts) {
  SymbolicState out(g.size());
  for (size_t l = 0; l < g.size(); ++l)
    out[static_cast<LocId>(l)] = cpre_at(g, p, d, static_cast<LocId>(l), smt, opts);
  return out;
}

SymbolicGame loop_game(const SymbolicGame& g, LocId l_split, const std::string& l_end_name) {
  if (g.find_location(l_end_name))
    throw Error("loop game end location collides with existing location: " + l_end_name);
  std::vector<std::string> locs = g.locations();
  locs.push_back(l_end_name);
  SymbolicGame out(std::move(locs), g.initial(), g.inputs(), g.vars());
  const LocId l_end = static_cast<LocId>(out.size() - 1);
  for (size_t l = 0; l < g.size(); ++l) out.set_dom(static_cast<LocId>(l), g.dom(static_cast<LocId>(l)));
  out.set_dom(l_end, g.dom(l_split));
  for (size_t from = 0; from < g.size(); ++from) {
    for (size_t to = 0; to < g.size(); ++to) {
      const Formula& f = g.delta(static_cast<LocId>(from), static_cast<LocId>(to));
      if (f.is_false()) continue;
      if (static_cast<LocId>(to) == l_split) {
        out.set_delta(static_cast<LocId>(from), l_end, f);  // redirected
      } else {
        out.set_delta(static_cast<LocId>(from), static_cast<LocId>(to), f);
      }
    }
  }
  std::vector<Formula> frozen;
  for (const auto& x : g.vars()) {
    if (x.sort == Sort::Bool) {
      Formula xe = Formula::var(x);
      Formula xp = Formula::var(x.primed_version());
      frozen.push_back(f_and(f_implies(xe, xp), f_implies(xp, xe)));
    } else {
      frozen.push_back(Formula::cmp(LinearTerm(x.primed_version()), Formula::RelOp::Eq,
                                    LinearTerm(x)));
    }
  }
  out.set_delta(l_end, l_end, f_and(std::move(frozen)));
  out.set_non_blocking_verified(g.non_blocking_verified());
  return out;
}

SymbolicGame lift(const SymbolicGame& g, const std::vector<Variable>& meta) {
  for (const auto& m : meta) {
    for (const auto& x : g.vars())
      if (x.name == m.name) throw Error("meta variable clashes with program variable: " + m.name);
    for (const auto& i : g.inputs())
      if (i.name == m.name) throw Error("meta variable clashes with input variable: " + m.name);
  }
  std::vector<Variable> vars = g.vars();
  vars.insert(vars.end(), meta.begin(), meta.end());
  SymbolicGame out(g.locations(), g.initial(), g.inputs(), std::move(vars));
  for (size_t l = 0; l < g.size(); ++l) out.set_dom(static_cast<LocId>(l), g.dom(static_cast<LocId>(l)));
  std::vector<Formula> keep;
  for (const auto& m : meta) {
    if (m.sort == Sort::Bool) {
      Formula me = Formula::var(m);
      Formula mp = Formula::var(m.primed_version());
      keep.push_back(f_and(f_implies(me, mp), f_implies(mp, me)));
    } else {
      keep.push_back(
          Formula::cmp(LinearTerm(m), Formula::RelOp::Eq, LinearTerm(m.primed_version())));
    }
  }
  Formula keep_all = f_and(keep);
  for (size_t from = 0; from < g.size(); ++from)
    for (size_t to = 0; to < g.size(); ++to) {
      const Formula& f = g.delta(static_cast<LocId>(from), static_cast<LocId>(to));
      if (f.is_false()) continue;
      out.set_delta(static_cast<LocId>(from), static_cast<LocId>(to), f_and(f, keep_all));
    }
  out.set_non_blocking_verified(g.non_blocking_verified());
  return out;
}

AttractorResult attractor_fixpoint(const SymbolicGame& g, Player p, const SymbolicState& target,
                                   SmtBackend& smt, int max_iter, const AttractorHooks& hooks,
                                   const CpreOptions& cpre_opts) {
  AttractorResult res;
  const size_t n = g.size();
  SymbolicState a(n);
  for (size_t l = 0; l < n; ++l) a[static_cast<LocId>(l)] = smt.simplify(target[static_cast<LocId>(l)]);
  SymbolicState prev(n);
  std::vector<int> unknown_streak(n, 0);
  bool first = true;
  for (int iter = 1; iter <= max_iter; ++iter) {
    res.iterations = iter;
    if (hooks.deadline_expired && hooks.deadline_expired()) {
      res.a = a;
      return res;
    }
    if (!first) {
      bool equal = true;
      for (size_t l = 0; l < n && equal; ++l) {
        if (a[static_cast<LocId>(l)] == prev[static_cast<LocId>(l)]) continue;
        switch (smt.equivalent(a[static_cast<LocId>(l)], prev[static_cast<LocId>(l)])) {
          case Validity::Valid:
            unknown_streak[l] = 0;
            break;
          case Validity::Invalid:
            unknown_streak[l] = 0;
            equal = false;
            break;
          case Validity::Unknown:
            equal = false;
            if (++unknown_streak[l] >= 3) {
              res.a = a;
              res.unknown_equivalence = true;
              return res;
            }
            break;
        }
      }
      if (equal) {
        res.a = a;
        res.completed = true;
        return res;
      }
    }
    first = false;
    if (hooks.extend) hooks.extend(a, iter);
    prev = a;
    SymbolicState pre = cpre(g, p, a, smt, cpre_opts);
    for (size_t l = 0; l < n; ++l) {
      LocId li = static_cast<LocId>(l);
      if (pre[li].is_false()) continue;
      a[li] = smt.simplify(f_or(a[li], pre[li]));
    }
  }
  res.a = a;
  return res;
}

}  // namespace galatt
