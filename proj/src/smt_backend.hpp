// SPDX-License-Identifier: Apache-2.0
//
// Client for an external SMT-LIB2 solver process (stdin/stdout). One handle
// owns one persistent child process with incremental push/pop; the process is
// restarted on crash. A handle is not shareable between threads.

#ifndef GALATT_SMT_BACKEND_HPP
#define GALATT_SMT_BACKEND_HPP

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "formula.hpp"

namespace galatt {

enum class SolverVerdict { Sat, Unsat, Unknown };
enum class Validity { Valid, Invalid, Unknown };

struct SolverTransportError : Error {
  using Error::Error;
};

struct SolverConfig {
  std::vector<std::string> command;  // argv; empty -> discover (env/z3/node shim)
  int timeout_ms = 10000;            // per query
  bool enable_qe = true;
  uint64_t seed = 0;
  std::string log_path;              // mirror all queries when non-empty
  size_t simplify_call_threshold = 48;  // solver-side simplify only above this size
  double simplify_growth_cap = 4.0;
};

// Resolves the solver command line: GALATT_SMT_SOLVER, then z3 on PATH, then
// the bundled node shim. Throws SolverTransportError when nothing is found.
std::vector<std::string> discover_solver_command();

class SmtBackend {
 public:
  explicit SmtBackend(SolverConfig cfg = {});
  ~SmtBackend();

  SmtBackend(const SmtBackend&) = delete;
  SmtBackend& operator=(const SmtBackend&) = delete;

  SolverVerdict check_sat(const Formula& f);
  Validity check_valid(const Formula& f);

  // Quantifier elimination; nullopt means unavailable (callers keep the
  // quantified formula and fall back to sat/validity queries).
  std::optional<Formula> qelim(const Formula& f);

  // T-equivalent simplification; returns the input on any failure.
  Formula simplify(const Formula& f);

  // valid(a -> b) with syntactic fast paths.
  Validity implies(const Formula& a, const Formula& b);
  Validity equivalent(const Formula& a, const Formula& b);

  uint64_t query_count() const { return queries_; }
  uint64_t unknown_count() const { return unknowns_; }
  void set_query_hook(std::function<void(const std::string&)> hook) { hook_ = std::move(hook); }

  const SolverConfig& config() const { return cfg_; }

 private:
  struct Process;
  void ensure_process();
  void restart();
  // executes commands, returns output lines up to the sentinel
  std::vector<std::string> exec(const std::string& cmds, bool& timed_out);
  void declare_for(const Formula& f, std::string& out);
  void guard_placeholders(const Formula& f) const;

  SolverConfig cfg_;
  std::unique_ptr<Process> proc_;
  std::set<Variable> declared_;
  uint64_t queries_ = 0;
  uint64_t unknowns_ = 0;
  std::function<void(const std::string&)> hook_;
};

}  // namespace galatt

#endif
