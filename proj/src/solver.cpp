// SPDX-License-Identifier: Apache-2.0

#include "solver.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "simplify.hpp"
#include "smtlib.hpp"

namespace galatt {

std::string SolveStats::to_json(const char* verdict) const {
  nlohmann::json j;
  j["verdict"] = verdict;
  j["cpre_calls"] = cpre_calls;
  j["attractor_iterations"] = attractor_iterations;
  j["acceleration"] = {{"attempts", accel_attempts}, {"successes", accel_successes}};
  j["gal_searches"] = gal_searches;
  j["gal_candidates"] = gal_candidates;
  j["summaries"] = {{"computed", summaries_computed}, {"applied", summary_applications}};
  j["smt_queries"] = smt_queries;
  j["buchi_outer_iterations"] = buchi_outer_iterations;
  j["wall_seconds"] = wall_seconds;
  nlohmann::json fa = nlohmann::json::object();
  for (const auto& [loc, f] : final_attractor) fa[loc] = f;
  j["final_attractor"] = fa;
  return j.dump(2);
}

// per-solve bookkeeping: acceleration streaks, budget doublings, summaries
struct Solver::Family {
  std::map<std::pair<int, LocId>, int> accel_success_count;
  std::map<std::pair<int, LocId>, int> budget_doublings;
  std::map<std::pair<int, LocId>, bool> summary_attempted;
  std::vector<EnforcementSummary> summaries;
  std::vector<size_t> summary_fingerprints;

  GalBudget budget_for(const GalBudget& base, Player p, LocId l) const {
    auto it = budget_doublings.find({static_cast<int>(p), l});
    GalBudget b = base;
    if (it != budget_doublings.end())
      for (int i = 0; i < it->second; ++i) b = b.doubled();
    return b;
  }
};

Solver::Solver(const SymbolicGame& g, SolveOptions opts, SmtBackend& smt)
    : g_(g), opts_(std::move(opts)), smt_(smt) {
  cyclic_ = g_.cyclic_locations();
  deadline_ = std::chrono::steady_clock::now() +
              std::chrono::milliseconds(static_cast<long>(opts_.timeout_sec * 1000));
  family_ = std::make_unique<Family>();
}

bool Solver::deadline_expired() const { return std::chrono::steady_clock::now() >= deadline_; }

std::vector<Gal> Solver::take_collected_gals() { return std::move(gals_); }

void Solver::maybe_compute_summary(Family& fam, Player p, LocId l, const SymbolicState& a) {
  auto key = std::make_pair(static_cast<int>(p), l);
  if (fam.summary_attempted[key]) return;
  if (fam.accel_success_count[key] < 2) return;
  fam.summary_attempted[key] = true;

  // L_S starts local ({l} plus successors) and grows one BFS ring per retry.
  std::vector<LocId> support{l};
  auto grow = [&]() {
    std::vector<LocId> next = support;
    for (LocId s : support)
      for (LocId to : g_.successors(s))
        if (std::find(next.begin(), next.end(), to) == next.end()) next.push_back(to);
    support = next;
  };
  grow();
  for (int attempt = 0; attempt <= 2; ++attempt) {
    if (deadline_expired()) return;
    std::vector<Variable> gvars;
    for (const auto& x : g_.vars())
      if (point_enforceable(g_, p, x, support, smt_)) gvars.push_back(x);
    SummaryTemplate tmpl = derive_template(g_, p, l, a, support, gvars, smt_);
    LiftedAttractorFn fn = [this, &fam](const SymbolicGame& lifted, Player pp,
                                        const SymbolicState& target) {
      return attractor_in(lifted, pp, target, fam, opts_.summary_iter_cap,
                          opts_.accel == AccelMode::Gal, false);
    };
    auto summary = compute_summary(g_, p, l, tmpl, fn, smt_);
    if (summary) {
      ++stats_.summaries_computed;
      if (opts_.dump_summaries) {
        std::cerr << "; summary at " << g_.location_name(l) << " for " << player_name(p)
                  << "\n; phi = " << to_smt(summary->statement, {true}) << "\n";
        for (size_t i = 0; i < g_.size(); ++i)
          if (!summary->tmpl.tau[static_cast<LocId>(i)].is_false())
            std::cerr << "; tau(" << g_.location_name(static_cast<LocId>(i))
                      << ") = " << to_smt(summary->tmpl.tau[static_cast<LocId>(i)], {true})
                      << "\n";
      }
      fam.summaries.push_back(std::move(*summary));
      fam.summary_fingerprints.push_back(0);
      return;
    }
    grow();
  }
}

AttractorResult Solver::attractor_in(const SymbolicGame& g, Player p,
                                     const SymbolicState& target, Family& fam, int max_iter,
                                     bool allow_accel, bool allow_summaries) {
  const size_t n = g.size();
  AttractorResult res;
  SymbolicState a(n);
  for (size_t l = 0; l < n; ++l)
    a[static_cast<LocId>(l)] = smt_.simplify(target[static_cast<LocId>(l)]);
  SymbolicState prev(n);
  std::vector<int> change_streak(n, 0);
  std::vector<int> unknown_streak(n, 0);
  int rr_pointer = 0;
  bool first = true;

  GalSearchContext gal_ctx{smt_, opts_.gal_budget, opts_.dnf_cap,
                           [this] { return deadline_expired(); },
                           nullptr, nullptr};
  GalSearchStats gal_stats;
  gal_ctx.stats = &gal_stats;
  gal_ctx.on_accepted = [this](const Gal& gal) {
    if (opts_.dump_gals) {
      std::cerr << "; accepted GAL\n; base: " << to_smt(gal.base, {true})
                << "\n; stay: " << to_smt(gal.stay, {true})
                << "\n; step: " << to_smt(gal.step, {true})
                << "\n; conc: " << to_smt(gal.conc, {true}) << "\n";
    }
    gals_.push_back(gal);
  };

  for (int iter = 1; iter <= max_iter; ++iter) {
    ++stats_.attractor_iterations;
    if (deadline_expired()) {
      res.a = a;
      break;
    }
    if (!first) {
      bool equal = true;
      for (size_t l = 0; l < n; ++l) {
        LocId li = static_cast<LocId>(l);
        bool loc_equal;
        if (a[li] == prev[li]) {
          loc_equal = true;
        } else {
          switch (smt_.equivalent(a[li], prev[li])) {
            case Validity::Valid: loc_equal = true; break;
            case Validity::Invalid: loc_equal = false; unknown_streak[l] = 0; break;
            default:
              loc_equal = false;
              if (++unknown_streak[l] >= 3) {
                res.a = a;
                res.unknown_equivalence = true;
                stats_.gal_searches += gal_stats.searches;
                stats_.gal_candidates += gal_stats.candidates;
                return res;
              }
              break;
          }
        }
        change_streak[l] = loc_equal ? 0 : change_streak[l] + 1;
        if (!loc_equal) equal = false;
      }
      if (equal) {
        res.a = a;
        res.completed = true;
        res.iterations = iter;
        stats_.gal_searches += gal_stats.searches;
        stats_.gal_candidates += gal_stats.candidates;
        return res;
      }
    }
    first = false;

    if (allow_summaries && summaries_active_) {
      for (size_t si = 0; si < fam.summaries.size(); ++si) {
        const EnforcementSummary& s = fam.summaries[si];
        if (s.player != p) continue;
        size_t fp = 0;
        for (size_t l = 0; l < n; ++l) fp ^= a[static_cast<LocId>(l)].hash() + 31 * l;
        if (fam.summary_fingerprints[si] == fp) continue;  // same iterate as last time
        fam.summary_fingerprints[si] = fp;
        if (!in_support(g, s, a, smt_)) continue;
        Formula add = apply_summary(g, s, a, smt_);
        ++stats_.summary_applications;
        if (!add.is_false()) {
          a[s.support_loc] = smt_.simplify(f_or(a[s.support_loc], add));
        }
      }
    }

    if (allow_accel) {
      int chosen = -1;
      for (size_t off = 0; off < n; ++off) {
        int l = (rr_pointer + static_cast<int>(off)) % static_cast<int>(n);
        if (static_cast<size_t>(l) < cyclic_.size() && !cyclic_[static_cast<size_t>(l)])
          continue;  // acceleration helps only where the location graph loops
        if (change_streak[static_cast<size_t>(l)] >= opts_.accel_change_streak) {
          chosen = l;
          break;
        }
      }
      if (chosen >= 0) {
        rr_pointer = (chosen + 1) % static_cast<int>(n);
        change_streak[static_cast<size_t>(chosen)] = 0;
        ++stats_.accel_attempts;
        gal_ctx.budget = fam.budget_for(opts_.gal_budget, p, static_cast<LocId>(chosen));
        Formula r = accelerate(g, p, a, static_cast<LocId>(chosen), gal_ctx);
        auto key = std::make_pair(static_cast<int>(p), static_cast<LocId>(chosen));
        if (!r.is_false()) {
          ++stats_.accel_successes;
          a[chosen] = smt_.simplify(f_or(a[chosen], r));
          fam.accel_success_count[key] += 1;
          if (allow_summaries && summaries_active_ && &g == &g_)
            maybe_compute_summary(fam, p, static_cast<LocId>(chosen), a);
        } else {
          int& d = fam.budget_doublings[key];
          if (d < 2) ++d;  // retry failed accelerations with doubled budgets
        }
      }
    }

    prev = a;
    ++stats_.cpre_calls;
    SymbolicState pre = cpre(g, p, a, smt_);
    for (size_t l = 0; l < n; ++l) {
      LocId li = static_cast<LocId>(l);
      if (pre[li].is_false()) continue;
      a[li] = smt_.simplify(f_or(a[li], pre[li]));
    }
    res.iterations = iter;
  }
  res.a = a;
  stats_.gal_searches += gal_stats.searches;
  stats_.gal_candidates += gal_stats.candidates;
  return res;
}

AttractorResult Solver::attractor(Player p, const SymbolicState& target) {
  return attractor_in(g_, p, target, *family_, opts_.max_iter, opts_.accel == AccelMode::Gal,
                      true);
}

bool Solver::covers_initial(const Formula& f) {
  return smt_.implies(g_.dom(g_.initial()), f) == Validity::Valid;
}

SolveResult Solver::finish(SolveResult r) {
  r.stats = stats_;
  r.stats.smt_queries = smt_.query_count();
  r.collected_gals = gals_;
  return r;
}

// greatest fixpoint: largest Z with Z <= allowed-locations and Z <= cpre(Z)
SymbolicState Solver::gfp_confine(Player p, const std::vector<LocId>& allowed,
                                  bool& completed) {
  const size_t n = g_.size();
  completed = false;
  SymbolicState z(n);
  for (size_t l = 0; l < n; ++l) {
    bool ok = std::find(allowed.begin(), allowed.end(), static_cast<LocId>(l)) != allowed.end();
    z[static_cast<LocId>(l)] = ok ? g_.dom(static_cast<LocId>(l)) : Formula::fls();
  }
  for (int iter = 0; iter < opts_.max_iter; ++iter) {
    if (deadline_expired()) return z;
    ++stats_.cpre_calls;
    SymbolicState pre = cpre(g_, p, z, smt_);
    SymbolicState next(n);
    bool equal = true;
    for (size_t l = 0; l < n; ++l) {
      LocId li = static_cast<LocId>(l);
      next[li] = z[li].is_false() ? Formula::fls() : smt_.simplify(f_and(z[li], pre[li]));
      if (next[li] == z[li]) continue;
      switch (smt_.equivalent(next[li], z[li])) {
        case Validity::Valid: break;
        default: equal = false; break;
      }
    }
    if (equal) {
      completed = true;
      return z;
    }
    z = next;
  }
  return z;
}

SolveResult Solver::solve(const WinningCondition& w) {
  summaries_active_ = opts_.summaries_enabled(w.kind);
  switch (w.kind) {
    case WinningCondition::Kind::Reach: return solve_reachability(w.locations);
    case WinningCondition::Kind::Safety: return solve_safety(w.locations);
    case WinningCondition::Kind::Buchi: return solve_buchi(w.locations);
    case WinningCondition::Kind::CoBuchi: return solve_cobuchi(w.locations);
  }
  return SolveResult{};
}

namespace {

SymbolicState goal_target(const SymbolicGame& g, const std::vector<LocId>& locs) {
  SymbolicState t(g.size());
  for (LocId l : locs) t[l] = Formula::tru();
  return t;
}

void record_final(SolveStats& stats, const SymbolicGame& g, const SymbolicState& a) {
  stats.final_attractor.clear();
  for (size_t l = 0; l < g.size(); ++l)
    stats.final_attractor.emplace_back(g.location_name(static_cast<LocId>(l)),
                                       a[static_cast<LocId>(l)].display());
}

}  // namespace

SolveResult Solver::solve_reachability(const std::vector<LocId>& goals) {
  SolveResult r;
  SymbolicState target = goal_target(g_, goals);
  AttractorResult attr = attractor(Player::Sys, target);
  record_final(stats_, g_, attr.a);
  if (covers_initial(attr.a[g_.initial()])) {
    r.verdict = Verdict3::Realizable;
    if (attr.completed)
      r.certificates.push_back({Player::Sys, false, attr.a, target});
    else
      r.partial = true;
    return finish(std::move(r));
  }
  r.partial = !attr.completed;
  // Unrealizability needs a completed argument for the opponent: the set of
  // states from which Env confines the play to non-goal locations forever.
  std::vector<LocId> non_goals;
  for (size_t l = 0; l < g_.size(); ++l)
    if (std::find(goals.begin(), goals.end(), static_cast<LocId>(l)) == goals.end())
      non_goals.push_back(static_cast<LocId>(l));
  bool gfp_complete = false;
  SymbolicState avoid = gfp_confine(Player::Env, non_goals, gfp_complete);
  if (gfp_complete &&
      smt_.check_sat(f_and(g_.dom(g_.initial()), avoid[g_.initial()])) == SolverVerdict::Sat) {
    r.verdict = Verdict3::Unrealizable;
    SymbolicState bound(g_.size());
    for (LocId l : non_goals) bound[l] = g_.dom(l);
    r.certificates.push_back({Player::Env, true, avoid, bound});
    return finish(std::move(r));
  }
  r.verdict = Verdict3::Unknown;
  r.partial = true;
  return finish(std::move(r));
}

SolveResult Solver::solve_safety(const std::vector<LocId>& safe) {
  SolveResult r;
  std::vector<LocId> unsafe;
  for (size_t l = 0; l < g_.size(); ++l)
    if (std::find(safe.begin(), safe.end(), static_cast<LocId>(l)) == safe.end())
      unsafe.push_back(static_cast<LocId>(l));
  SymbolicState target = goal_target(g_, unsafe);
  AttractorResult attr = attractor(Player::Env, target);
  record_final(stats_, g_, attr.a);
  if (smt_.check_sat(f_and(g_.dom(g_.initial()), attr.a[g_.initial()])) ==
      SolverVerdict::Sat) {
    // sound even for a partial attractor: it under-approximates
    r.verdict = Verdict3::Unrealizable;
    if (attr.completed) r.certificates.push_back({Player::Env, false, attr.a, target});
    r.partial = !attr.completed;
    return finish(std::move(r));
  }
  if (attr.completed) {
    r.verdict = Verdict3::Realizable;
    r.certificates.push_back({Player::Env, false, attr.a, target});
    return finish(std::move(r));
  }
  bool gfp_complete = false;
  SymbolicState stay = gfp_confine(Player::Sys, safe, gfp_complete);
  if (gfp_complete && covers_initial(stay[g_.initial()])) {
    r.verdict = Verdict3::Realizable;
    SymbolicState bound(g_.size());
    for (LocId l : safe) bound[l] = g_.dom(l);
    r.certificates.push_back({Player::Sys, true, stay, bound});
    return finish(std::move(r));
  }
  r.verdict = Verdict3::Unknown;
  r.partial = true;
  return finish(std::move(r));
}

SolveResult Solver::solve_buchi(const std::vector<LocId>& accepting) {
  SolveResult r;
  const size_t n = g_.size();
  SymbolicState z(n);
  for (size_t l = 0; l < n; ++l) z[static_cast<LocId>(l)] = g_.dom(static_cast<LocId>(l));
  bool all_inner_complete = true;
  for (int outer = 1; outer <= opts_.buchi_outer_cap; ++outer) {
    ++stats_.buchi_outer_iterations;
    if (deadline_expired()) break;
    ++stats_.cpre_calls;
    SymbolicState pre = cpre(g_, Player::Sys, z, smt_);
    SymbolicState target(n);
    for (LocId l : accepting) target[l] = pre[l];
    AttractorResult attr = attractor(Player::Sys, target);
    all_inner_complete = all_inner_complete && attr.completed;
    bool stable = true;
    for (size_t l = 0; l < n && stable; ++l) {
      LocId li = static_cast<LocId>(l);
      if (attr.a[li] == z[li]) continue;
      if (smt_.equivalent(attr.a[li], z[li]) != Validity::Valid) stable = false;
    }
    z = attr.a;
    if (stable) {
      record_final(stats_, g_, z);
      if (attr.completed) r.certificates.push_back({Player::Sys, false, attr.a, target});
      if (covers_initial(z[g_.initial()])) {
        r.verdict = Verdict3::Realizable;
        r.partial = !all_inner_complete;
        return finish(std::move(r));
      }
      if (all_inner_complete) {
        r.verdict = Verdict3::Unrealizable;
        return finish(std::move(r));
      }
      r.verdict = Verdict3::Unknown;
      r.partial = true;
      return finish(std::move(r));
    }
  }
  record_final(stats_, g_, z);
  r.verdict = Verdict3::Unknown;
  r.partial = true;
  return finish(std::move(r));
}

SolveResult Solver::solve_cobuchi(const std::vector<LocId>& confined) {
  // dual: Env plays Buchi on the complement locations
  SolveResult r;
  const size_t n = g_.size();
  std::vector<LocId> acc_env;
  for (size_t l = 0; l < n; ++l)
    if (std::find(confined.begin(), confined.end(), static_cast<LocId>(l)) == confined.end())
      acc_env.push_back(static_cast<LocId>(l));
  SymbolicState z(n);
  for (size_t l = 0; l < n; ++l) z[static_cast<LocId>(l)] = g_.dom(static_cast<LocId>(l));
  bool all_inner_complete = true;
  for (int outer = 1; outer <= opts_.buchi_outer_cap; ++outer) {
    ++stats_.buchi_outer_iterations;
    if (deadline_expired()) break;
    ++stats_.cpre_calls;
    SymbolicState pre = cpre(g_, Player::Env, z, smt_);
    SymbolicState target(n);
    for (LocId l : acc_env) target[l] = pre[l];
    AttractorResult attr = attractor(Player::Env, target);
    all_inner_complete = all_inner_complete && attr.completed;
    bool stable = true;
    for (size_t l = 0; l < n && stable; ++l) {
      LocId li = static_cast<LocId>(l);
      if (attr.a[li] == z[li]) continue;
      if (smt_.equivalent(attr.a[li], z[li]) != Validity::Valid) stable = false;
    }
    z = attr.a;
    if (stable) {
      record_final(stats_, g_, z);
      if (attr.completed) r.certificates.push_back({Player::Env, false, attr.a, target});
      Formula env_wins_initially = f_and(g_.dom(g_.initial()), z[g_.initial()]);
      if (smt_.check_sat(env_wins_initially) == SolverVerdict::Sat) {
        // the stabilized set is a sound under-approximation of Env's
        // Buchi-winning region
        r.verdict = Verdict3::Unrealizable;
        r.partial = !all_inner_complete;
        return finish(std::move(r));
      }
      if (all_inner_complete &&
          smt_.check_valid(f_implies(g_.dom(g_.initial()), f_not(z[g_.initial()]))) ==
              Validity::Valid) {
        r.verdict = Verdict3::Realizable;
        return finish(std::move(r));
      }
      r.verdict = Verdict3::Unknown;
      r.partial = true;
      return finish(std::move(r));
    }
  }
  record_final(stats_, g_, z);
  r.verdict = Verdict3::Unknown;
  r.partial = true;
  return finish(std::move(r));
}

bool verify_certificates(const SymbolicGame& g, const SolveResult& r, SmtBackend& smt,
                         std::string* detail) {
  for (const auto& cert : r.certificates) {
    SymbolicState pre = cpre(g, cert.player, cert.attractor, smt);
    for (size_t l = 0; l < g.size(); ++l) {
      LocId li = static_cast<LocId>(l);
      Validity inductive = cert.greatest
                               ? smt.implies(cert.attractor[li], pre[li])
                               : smt.implies(pre[li], cert.attractor[li]);
      Validity contains = cert.greatest
                              ? smt.implies(cert.attractor[li], cert.target[li])
                              : smt.implies(cert.target[li], cert.attractor[li]);
      if (inductive != Validity::Valid || contains != Validity::Valid) {
        if (detail)
          *detail = "certificate failed at location " + g.location_name(li) +
                    (inductive != Validity::Valid ? " (inductiveness)" : " (containment)");
        return false;
      }
    }
  }
  return true;
}

}  // namespace galatt
