// SPDX-License-Identifier: Apache-2.0
//
// Accelerated attractor fixpoint (acceleration at scheduled locations plus
// enforcement-summary application) and realizability drivers for the four
// supported winning-condition shapes.

#ifndef GALATT_SOLVER_HPP
#define GALATT_SOLVER_HPP

#include <chrono>
#include <map>
#include <memory>

#include "gal_search.hpp"
#include "game.hpp"
#include "summary.hpp"

namespace galatt {

enum class AccelMode { Off, Gal };
enum class SummaryMode { On, Off, Auto };
enum class Verdict3 { Realizable, Unrealizable, Unknown };

inline const char* verdict_name(Verdict3 v) {
  switch (v) {
    case Verdict3::Realizable: return "REALIZABLE";
    case Verdict3::Unrealizable: return "UNREALIZABLE";
    case Verdict3::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

struct SolveOptions {
  AccelMode accel = AccelMode::Gal;
  SummaryMode summaries = SummaryMode::Auto;
  GalBudget gal_budget;
  int max_iter = 64;          // per attractor
  int buchi_outer_cap = 64;
  double timeout_sec = 1200;
  uint64_t seed = 0;
  int accel_change_streak = 3;  // attempt acceleration after this many changes
  int summary_iter_cap = 16;    // lifted-game attractor budget
  size_t dnf_cap = 64;
  bool dump_gals = false;
  bool dump_summaries = false;

  bool summaries_enabled(WinningCondition::Kind k) const {
    switch (summaries) {
      case SummaryMode::On: return true;
      case SummaryMode::Off: return false;
      case SummaryMode::Auto:
        return k == WinningCondition::Kind::Buchi || k == WinningCondition::Kind::CoBuchi;
    }
    return false;
  }
};

struct SolveStats {
  uint64_t cpre_calls = 0;
  uint64_t attractor_iterations = 0;
  uint64_t accel_attempts = 0;
  uint64_t accel_successes = 0;
  uint64_t gal_searches = 0;
  uint64_t gal_candidates = 0;
  uint64_t summaries_computed = 0;
  uint64_t summary_applications = 0;
  uint64_t smt_queries = 0;
  uint64_t buchi_outer_iterations = 0;
  double wall_seconds = 0;
  std::vector<std::pair<std::string, std::string>> final_attractor;  // location -> formula

  std::string to_json(const char* verdict) const;
};

// A fixpoint the verdict rests on, re-checkable by validity queries:
// least fixpoints: cpre(a) <= a and target <= a;
// greatest fixpoints: a <= cpre(a) and a <= bound.
struct CertificateObligation {
  Player player = Player::Sys;
  bool greatest = false;
  SymbolicState attractor;
  SymbolicState target;
};

struct SolveResult {
  Verdict3 verdict = Verdict3::Unknown;
  SolveStats stats;
  std::vector<CertificateObligation> certificates;
  std::vector<Gal> collected_gals;
  bool partial = false;  // some budget or unknown verdict forced an early exit
};

class Solver {
 public:
  Solver(const SymbolicGame& g, SolveOptions opts, SmtBackend& smt);

  SolveResult solve(const WinningCondition& w);

  SolveResult solve_reachability(const std::vector<LocId>& goals);
  SolveResult solve_safety(const std::vector<LocId>& safe);
  SolveResult solve_buchi(const std::vector<LocId>& accepting);
  SolveResult solve_cobuchi(const std::vector<LocId>& confined);

  // The accelerated attractor (Alg. 1 with the summary hook); exposed for
  // tests and for summary computation.
  AttractorResult attractor(Player p, const SymbolicState& target);

  const SolveStats& stats() const { return stats_; }
  std::vector<Gal> take_collected_gals();

 private:
  struct Family;  // per-solve acceleration/summary bookkeeping

  AttractorResult attractor_in(const SymbolicGame& g, Player p, const SymbolicState& target,
                               Family& fam, int max_iter, bool allow_accel,
                               bool allow_summaries);
  void maybe_compute_summary(Family& fam, Player p, LocId l, const SymbolicState& a);
  SymbolicState gfp_confine(Player p, const std::vector<LocId>& allowed, bool& completed);
  bool deadline_expired() const;
  bool covers_initial(const Formula& f);
  SolveResult finish(SolveResult r);

  const SymbolicGame& g_;
  SolveOptions opts_;
  SmtBackend& smt_;
  SolveStats stats_;
  std::vector<Gal> gals_;
  std::vector<bool> cyclic_;
  std::chrono::steady_clock::time_point deadline_;
  std::unique_ptr<Family> family_;
  bool summaries_active_ = false;
};

// Re-checks every certificate with fresh validity queries.
bool verify_certificates(const SymbolicGame& g, const SolveResult& r, SmtBackend& smt,
                         std::string* detail = nullptr);

}  // namespace galatt

#endif
