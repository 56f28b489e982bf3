// SPDX-License-Identifier: Apache-2.0

#include "smt_backend.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "simplify.hpp"
#include "smtlib.hpp"

namespace galatt {

namespace {

constexpr const char* kSentinel = "@GALATT_DONE@";

std::optional<std::string> which(const std::string& exe) {
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    std::filesystem::path p = std::filesystem::path(dir) / exe;
    std::error_code ec;
    if (std::filesystem::exists(p, ec) && ::access(p.c_str(), X_OK) == 0) return p.string();
  }
  return std::nullopt;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

std::vector<std::string> discover_solver_command() {
  if (const char* env = std::getenv("GALATT_SMT_SOLVER")) {
    auto cmd = split_ws(env);
    if (!cmd.empty()) return cmd;
  }
  if (auto z3 = which("z3")) return {*z3, "-in"};
  std::vector<std::string> shim_candidates;
  if (const char* env = std::getenv("GALATT_Z3_SHIM")) shim_candidates.push_back(env);
#ifdef GALATT_DEFAULT_SHIM
  shim_candidates.push_back(GALATT_DEFAULT_SHIM);
#endif
  if (auto node = which("node")) {
    for (const auto& shim : shim_candidates) {
      std::error_code ec;
      if (std::filesystem::exists(shim, ec)) return {*node, shim};
    }
  }
  throw SolverTransportError(
      "no SMT solver found: set GALATT_SMT_SOLVER to an SMT-LIB2 solver command "
      "(e.g. \"z3 -in\"), or install z3 on PATH, or install the z3 wasm shim "
      "(node + `npm install z3-solver` next to tools/z3smt2_shim.js)");
}

struct SmtBackend::Process {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;

  ~Process() { stop(); }

  void start(const std::vector<std::string>& argv) {
    int in_pipe[2], out_pipe[2];
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0)
      throw SolverTransportError("pipe() failed");
    pid = ::fork();
    if (pid < 0) throw SolverTransportError("fork() failed");
    if (pid == 0) {
      ::dup2(in_pipe[0], STDIN_FILENO);
      ::dup2(out_pipe[1], STDOUT_FILENO);
      int devnull = ::open("/dev/null", O_WRONLY);
      if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      ::close(out_pipe[0]);
      ::close(out_pipe[1]);
      std::vector<char*> args;
      for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
      args.push_back(nullptr);
      ::execvp(args[0], args.data());
      ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child = in_pipe[1];
    from_child = out_pipe[0];
  }

  void stop() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    to_child = from_child = -1;
    if (pid > 0) {
      ::kill(pid, SIGKILL);
      int status = 0;
      ::waitpid(pid, &status, 0);
      pid = -1;
    }
    buffer.clear();
  }

  bool alive() const { return pid > 0; }

  bool write_all(const std::string& data) {
    size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::write(to_child, data.data() + off, data.size() - off);
      if (n <= 0) return false;
      off += static_cast<size_t>(n);
    }
    return true;
  }

  // Reads lines until the sentinel line; returns false on timeout/EOF.
  enum class ReadResult { Ok, Timeout, Eof };
  ReadResult read_until(const std::string& sentinel, int deadline_ms,
                        std::vector<std::string>& lines) {
    auto t0 = std::chrono::steady_clock::now();
    std::string cur;
    size_t scan = 0;
    while (true) {
      // consume buffered lines
      size_t nl;
      while ((nl = buffer.find('\n', scan)) != std::string::npos) {
        std::string line = buffer.substr(scan, nl - scan);
        scan = nl + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == sentinel) {
          buffer.erase(0, scan);
          return ReadResult::Ok;
        }
        lines.push_back(std::move(line));
      }
      buffer.erase(0, scan);
      scan = 0;
      int elapsed =
          static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - t0)
                               .count());
      int remain = deadline_ms - elapsed;
      if (remain <= 0) return ReadResult::Timeout;
      struct pollfd pfd{from_child, POLLIN, 0};
      int pr = ::poll(&pfd, 1, remain);
      if (pr <= 0) return ReadResult::Timeout;
      char chunk[4096];
      ssize_t n = ::read(from_child, chunk, sizeof chunk);
      if (n <= 0) return ReadResult::Eof;
      buffer.append(chunk, static_cast<size_t>(n));
    }
  }
};

SmtBackend::SmtBackend(SolverConfig cfg) : cfg_(std::move(cfg)) {
  ignore_sigpipe();
  if (cfg_.command.empty()) cfg_.command = discover_solver_command();
  if (cfg_.timeout_ms <= 0) throw Error("solver timeout must be positive");
  ensure_process();
}

SmtBackend::~SmtBackend() = default;

void SmtBackend::ensure_process() {
  if (proc_ && proc_->alive()) return;
  proc_ = std::make_unique<Process>();
  proc_->start(cfg_.command);
  declared_.clear();
  std::ostringstream init;
  init << "(set-option :print-success false)\n"
       << "(set-option :pp.min-alias-size 1000000)\n"
       << "(set-option :pp.max-depth 1000000)\n"
       << "(set-option :timeout " << cfg_.timeout_ms << ")\n"
       << "(set-option :smt.random_seed " << (cfg_.seed & 0xffff) << ")\n";
  bool timed_out = false;
  auto lines = exec(init.str(), timed_out);
  if (timed_out)
    throw SolverTransportError("solver did not answer the initial handshake: " +
                               cfg_.command[0]);
}

void SmtBackend::restart() {
  if (proc_) proc_->stop();
  proc_.reset();
  ensure_process();
}

std::vector<std::string> SmtBackend::exec(const std::string& cmds, bool& timed_out) {
  timed_out = false;
  std::string payload = cmds;
  payload += "(echo \"";
  payload += kSentinel;
  payload += "\")\n";
  if (hook_) hook_(cmds);
  if (!cfg_.log_path.empty()) {
    std::ofstream log(cfg_.log_path, std::ios::app);
    log << cmds;
  }
  if (!proc_->write_all(payload)) throw SolverTransportError("write to solver failed");
  std::vector<std::string> lines;
  auto r = proc_->read_until(kSentinel, cfg_.timeout_ms + 5000, lines);
  if (r == Process::ReadResult::Timeout) {
    proc_->stop();
    timed_out = true;
    return lines;
  }
  if (r == Process::ReadResult::Eof) throw SolverTransportError("solver process exited");
  return lines;
}

void SmtBackend::guard_placeholders(const Formula& f) const {
  if (has_placeholders(f))
    throw Error("solver query would contain a placeholder symbol");
}

void SmtBackend::declare_for(const Formula& f, std::string& out) {
  for (const auto& v : free_vars(f)) {
    if (declared_.insert(v).second) {
      out += "(declare-const ";
      out += smt_symbol(v);
      out += " ";
      out += sort_name(v.sort);
      out += ")\n";
    }
  }
}

SolverVerdict SmtBackend::check_sat(const Formula& f) {
  guard_placeholders(f);
  if (f.is_true()) return SolverVerdict::Sat;
  if (f.is_false()) return SolverVerdict::Unsat;
  ++queries_;
  for (int attempt = 0; attempt < 2; ++attempt) {
    ensure_process();
    std::string cmds;
    declare_for(f, cmds);
    cmds += "(push 1)\n(assert ";
    cmds += to_smt(f);
    cmds += ")\n(check-sat)\n(pop 1)\n";
    bool timed_out = false;
    std::vector<std::string> lines;
    try {
      lines = exec(cmds, timed_out);
    } catch (const SolverTransportError&) {
      if (attempt == 0) {
        restart();
        continue;
      }
      throw;
    }
    if (timed_out) {
      ++unknowns_;
      return SolverVerdict::Unknown;
    }
    for (const auto& line : lines) {
      if (line == "sat") return SolverVerdict::Sat;
      if (line == "unsat") return SolverVerdict::Unsat;
      if (line == "unknown") {
        ++unknowns_;
        return SolverVerdict::Unknown;
      }
      if (line.rfind("(error", 0) == 0)
        throw SolverTransportError("solver error: " + line + " for query: " + to_smt(f));
    }
    if (attempt == 0) {
      restart();
      continue;
    }
    throw SolverTransportError("no verdict line from solver");
  }
  throw SolverTransportError("unreachable");
}

Validity SmtBackend::check_valid(const Formula& f) {
  if (f.is_true()) return Validity::Valid;
  if (f.is_false()) return Validity::Invalid;
  switch (check_sat(f_not(f))) {
    case SolverVerdict::Unsat: return Validity::Valid;
    case SolverVerdict::Sat: return Validity::Invalid;
    case SolverVerdict::Unknown: return Validity::Unknown;
  }
  return Validity::Unknown;
}

Validity SmtBackend::implies(const Formula& a, const Formula& b) {
  if (a.is_false() || b.is_true()) return Validity::Valid;
  if (a == b) return Validity::Valid;
  return check_valid(f_implies(a, b));
}

Validity SmtBackend::equivalent(const Formula& a, const Formula& b) {
  if (a == b) return Validity::Valid;
  Validity ab = implies(a, b);
  if (ab == Validity::Invalid) return Validity::Invalid;
  Validity ba = implies(b, a);
  if (ba == Validity::Invalid) return Validity::Invalid;
  if (ab == Validity::Valid && ba == Validity::Valid) return Validity::Valid;
  return Validity::Unknown;
}

std::optional<Formula> SmtBackend::qelim(const Formula& f) {
  guard_placeholders(f);
  if (!cfg_.enable_qe) return std::nullopt;
  if (is_quantifier_free(f)) return f;
  ++queries_;
  ensure_process();
  std::string cmds;
  declare_for(f, cmds);
  cmds += "(push 1)\n(assert ";
  cmds += to_smt(f);
  cmds += ")\n(apply qe)\n(pop 1)\n";
  bool timed_out = false;
  std::vector<std::string> lines;
  try {
    lines = exec(cmds, timed_out);
  } catch (const SolverTransportError&) {
    restart();
    return std::nullopt;
  }
  if (timed_out) {
    ++unknowns_;
    return std::nullopt;
  }
  std::string joined;
  for (const auto& l : lines) {
    if (l.rfind("(error", 0) == 0) return std::nullopt;
    joined += l;
    joined += "\n";
  }
  try {
    auto exprs = parse_sexprs(joined);
    if (exprs.size() != 1 || exprs[0].kind != SExpr::Kind::List || exprs[0].items.empty() ||
        !exprs[0].items[0].is_sym("goals"))
      return std::nullopt;
    SmtSymbolTable symtab;
    symtab.add_all(free_vars(f));
    std::vector<Formula> goals;
    for (size_t gi = 1; gi < exprs[0].items.size(); ++gi) {
      const SExpr& goal = exprs[0].items[gi];
      if (goal.kind != SExpr::Kind::List || goal.items.empty() ||
          !goal.items[0].is_sym("goal"))
        return std::nullopt;
      std::vector<Formula> conj;
      for (size_t i = 1; i < goal.items.size(); ++i) {
        const SExpr& item = goal.items[i];
        if (item.kind == SExpr::Kind::Symbol && !item.text.empty() && item.text[0] == ':') {
          ++i;  // skip attribute value
          continue;
        }
        conj.push_back(smt_to_formula(item, symtab));
      }
      goals.push_back(f_and(std::move(conj)));
    }
    Formula out = f_or(std::move(goals));
    if (!is_quantifier_free(out)) return std::nullopt;
    return simplify_syntactic(out);
  } catch (const ParseError&) {
    return std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }
}

Formula SmtBackend::simplify(const Formula& f) {
  if (has_placeholders(f)) return simplify_syntactic(f);
  Formula syn = simplify_syntactic(f);
  if (syn.node_count() <= cfg_.simplify_call_threshold) return syn;
  ++queries_;
  ensure_process();
  std::string cmds;
  declare_for(syn, cmds);
  cmds += "(simplify ";
  cmds += to_smt(syn);
  cmds += ")\n";
  bool timed_out = false;
  std::vector<std::string> lines;
  try {
    lines = exec(cmds, timed_out);
  } catch (const SolverTransportError&) {
    restart();
    return syn;
  }
  if (timed_out) return syn;
  std::string joined;
  for (const auto& l : lines) {
    if (l.rfind("(error", 0) == 0) return syn;
    joined += l;
    joined += "\n";
  }
  try {
    auto exprs = parse_sexprs(joined);
    if (exprs.size() != 1) return syn;
    SmtSymbolTable symtab;
    symtab.add_all(free_vars(syn));
    Formula out = simplify_syntactic(smt_to_formula(exprs[0], symtab));
    if (static_cast<double>(out.node_count()) >
        cfg_.simplify_growth_cap * static_cast<double>(syn.node_count()))
      return syn;
    return out.node_count() <= syn.node_count() ? out : syn;
  } catch (const ParseError&) {
    return syn;
  } catch (const Error&) {
    return syn;
  }
}

}  // namespace galatt
