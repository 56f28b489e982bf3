// SPDX-License-Identifier: Apache-2.0

#include "game_parser.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "sexpr.hpp"
#include "smtlib.hpp"

namespace galatt {

namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

Sort parse_sort(const SExpr& e) {
  if (e.is_sym("Int")) return Sort::Int;
  if (e.is_sym("Real")) return Sort::Real;
  if (e.is_sym("Bool")) return Sort::Bool;
  throw ParseError("expected sort Int/Real/Bool", e.line, e.col);
}

std::vector<Variable> parse_decls(const SExpr& list, std::set<std::string>& names) {
  std::vector<Variable> out;
  for (size_t i = 1; i < list.items.size(); ++i) {
    const SExpr& d = list.items[i];
    if (d.kind != SExpr::Kind::List || d.items.size() != 2 ||
        d.items[0].kind != SExpr::Kind::Symbol)
      throw ParseError("expected (name Sort)", d.line, d.col);
    const std::string& name = d.items[0].text;
    if (!valid_identifier(name))
      throw ParseError("invalid variable name '" + name + "'", d.line, d.col);
    if (!names.insert(name).second)
      throw ParseError("duplicate variable '" + name + "'", d.line, d.col);
    out.push_back(Variable{name, parse_sort(d.items[1]), false});
  }
  return out;
}

void reject_unsupported(const Formula& f, int line, int col) {
  if (f.kind() == Formula::Kind::Opaque)
    throw ParseError("unsupported construct in formula: " + f.opaque_text(), line, col);
  for (const auto& k : f.children()) reject_unsupported(k, line, col);
}

Formula read_formula(const SExpr& e, const SmtSymbolTable& symtab) {
  Formula f = smt_to_formula(e, symtab);
  if (!is_quantifier_free(f))
    throw ParseError("quantifiers are not allowed in game formulas", e.line, e.col);
  reject_unsupported(f, e.line, e.col);
  return f;
}

}  // namespace

ParsedGame parse_game(const std::string& text) {
  auto top = parse_sexprs(text);
  if (top.size() != 1 || top[0].kind != SExpr::Kind::List || top[0].items.empty() ||
      !top[0].items[0].is_sym("game"))
    throw ParseError("expected a single (game ...) document", 1, 1);
  const SExpr& doc = top[0];

  size_t idx = 1;
  auto section = [&](const char* name, bool required) -> const SExpr* {
    if (idx < doc.items.size() && doc.items[idx].kind == SExpr::Kind::List &&
        !doc.items[idx].items.empty() && doc.items[idx].items[0].is_sym(name))
      return &doc.items[idx++];
    if (required) {
      int line = idx < doc.items.size() ? doc.items[idx].line : doc.line;
      int col = idx < doc.items.size() ? doc.items[idx].col : doc.col;
      throw ParseError(std::string("expected (") + name + " ...) section", line, col);
    }
    return nullptr;
  };

  std::set<std::string> var_names;
  const SExpr* inputs_sec = section("inputs", true);
  std::vector<Variable> inputs = parse_decls(*inputs_sec, var_names);
  const SExpr* vars_sec = section("vars", true);
  std::vector<Variable> vars = parse_decls(*vars_sec, var_names);

  const SExpr* locs_sec = section("locations", true);
  std::vector<std::string> loc_names;
  std::vector<const SExpr*> loc_doms(0);
  for (size_t i = 1; i < locs_sec->items.size(); ++i) {
    const SExpr& ld = locs_sec->items[i];
    std::string name;
    const SExpr* dom = nullptr;
    if (ld.kind == SExpr::Kind::Symbol) {
      name = ld.text;
    } else if (ld.kind == SExpr::Kind::List && !ld.items.empty() &&
               ld.items[0].kind == SExpr::Kind::Symbol) {
      name = ld.items[0].text;
      for (size_t j = 1; j < ld.items.size(); ++j) {
        const SExpr& a = ld.items[j];
        if (a.kind == SExpr::Kind::List && a.items.size() == 2 && a.items[0].is_sym("dom")) {
          dom = &a.items[1];
        } else {
          throw ParseError("expected (dom formula)", a.line, a.col);
        }
      }
    } else {
      throw ParseError("expected location declaration", ld.line, ld.col);
    }
    if (!valid_identifier(name))
      throw ParseError("invalid location name '" + name + "'", ld.line, ld.col);
    if (name.rfind("$loop$", 0) == 0)
      throw ParseError("location name uses the reserved $loop$ prefix", ld.line, ld.col);
    if (var_names.count(name))
      throw ParseError("location name collides with a variable: " + name, ld.line, ld.col);
    for (const auto& existing : loc_names)
      if (existing == name)
        throw ParseError("duplicate location '" + name + "'", ld.line, ld.col);
    loc_names.push_back(name);
    loc_doms.push_back(dom);
  }
  if (loc_names.empty())
    throw ParseError("game needs at least one location", locs_sec->line, locs_sec->col);

  const SExpr* init_sec = section("init", true);
  if (init_sec->items.size() != 2 || init_sec->items[1].kind != SExpr::Kind::Symbol)
    throw ParseError("expected (init location)", init_sec->line, init_sec->col);
  const std::string& init_name = init_sec->items[1].text;
  int init_idx = -1;
  for (size_t i = 0; i < loc_names.size(); ++i)
    if (loc_names[i] == init_name) init_idx = static_cast<int>(i);
  if (init_idx < 0)
    throw ParseError("unknown initial location '" + init_name + "'", init_sec->line,
                     init_sec->col);

  SymbolicGame game(loc_names, init_idx, inputs, vars);

  SmtSymbolTable dom_tab;
  for (const auto& v : vars) dom_tab.vars[v.name] = v;
  SmtSymbolTable trans_tab = dom_tab;
  for (const auto& v : inputs) trans_tab.vars[v.name] = v;
  for (const auto& v : vars) trans_tab.vars[v.name + "'"] = v.primed_version();

  for (size_t i = 0; i < loc_names.size(); ++i) {
    if (loc_doms[i]) game.set_dom(static_cast<LocId>(i), read_formula(*loc_doms[i], dom_tab));
  }

  std::set<std::pair<int, int>> seen_trans;
  while (idx < doc.items.size() && doc.items[idx].kind == SExpr::Kind::List &&
         !doc.items[idx].items.empty() && doc.items[idx].items[0].is_sym("trans")) {
    const SExpr& tr = doc.items[idx++];
    if (tr.items.size() != 4 || tr.items[1].kind != SExpr::Kind::Symbol ||
        tr.items[2].kind != SExpr::Kind::Symbol)
      throw ParseError("expected (trans from to formula)", tr.line, tr.col);
    auto from = game.find_location(tr.items[1].text);
    auto to = game.find_location(tr.items[2].text);
    if (!from) throw ParseError("unknown location '" + tr.items[1].text + "'", tr.line, tr.col);
    if (!to) throw ParseError("unknown location '" + tr.items[2].text + "'", tr.line, tr.col);
    if (!seen_trans.insert({*from, *to}).second)
      throw ParseError("duplicate (trans " + tr.items[1].text + " " + tr.items[2].text + ")",
                       tr.line, tr.col);
    game.set_delta(*from, *to, read_formula(tr.items[3], trans_tab));
  }

  const SExpr* win_sec = section("winning", true);
  if (win_sec->items.size() != 2 || win_sec->items[1].kind != SExpr::Kind::List ||
      win_sec->items[1].items.empty() || win_sec->items[1].items[0].kind != SExpr::Kind::Symbol)
    throw ParseError("expected (winning (reach|safety|buchi|cobuchi loc ...))", win_sec->line,
                     win_sec->col);
  const SExpr& w = win_sec->items[1];
  WinningCondition cond;
  const std::string& kind = w.items[0].text;
  if (kind == "reach") cond.kind = WinningCondition::Kind::Reach;
  else if (kind == "safety") cond.kind = WinningCondition::Kind::Safety;
  else if (kind == "buchi") cond.kind = WinningCondition::Kind::Buchi;
  else if (kind == "cobuchi") cond.kind = WinningCondition::Kind::CoBuchi;
  else throw ParseError("unknown winning condition '" + kind + "'", w.line, w.col);
  for (size_t i = 1; i < w.items.size(); ++i) {
    if (w.items[i].kind != SExpr::Kind::Symbol)
      throw ParseError("expected location name", w.items[i].line, w.items[i].col);
    auto l = game.find_location(w.items[i].text);
    if (!l)
      throw ParseError("unknown location '" + w.items[i].text + "'", w.items[i].line,
                       w.items[i].col);
    cond.locations.push_back(*l);
  }

  if (idx != doc.items.size())
    throw ParseError("unexpected trailing content", doc.items[idx].line, doc.items[idx].col);

  return ParsedGame{std::move(game), std::move(cond)};
}

ParsedGame parse_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open game file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_game(ss.str());
}

std::string print_game(const SymbolicGame& g, const WinningCondition& w) {
  SmtPrintOptions fopts;
  fopts.prime_suffix = "'";
  std::ostringstream os;
  os << "(game\n  (inputs";
  for (const auto& v : g.inputs()) os << " (" << v.name << " " << sort_name(v.sort) << ")";
  os << ")\n  (vars";
  for (const auto& v : g.vars()) os << " (" << v.name << " " << sort_name(v.sort) << ")";
  os << ")\n  (locations";
  for (size_t l = 0; l < g.size(); ++l) {
    os << "\n    (" << g.location_name(static_cast<LocId>(l));
    os << " (dom " << to_smt(g.dom(static_cast<LocId>(l)), fopts) << "))";
  }
  os << ")\n  (init " << g.location_name(g.initial()) << ")\n";
  for (size_t from = 0; from < g.size(); ++from)
    for (size_t to = 0; to < g.size(); ++to) {
      const Formula& f = g.delta(static_cast<LocId>(from), static_cast<LocId>(to));
      if (f.is_false()) continue;
      os << "  (trans " << g.location_name(static_cast<LocId>(from)) << " "
         << g.location_name(static_cast<LocId>(to)) << " " << to_smt(f, fopts) << ")\n";
    }
  const char* kind = nullptr;
  switch (w.kind) {
    case WinningCondition::Kind::Reach: kind = "reach"; break;
    case WinningCondition::Kind::Safety: kind = "safety"; break;
    case WinningCondition::Kind::Buchi: kind = "buchi"; break;
    case WinningCondition::Kind::CoBuchi: kind = "cobuchi"; break;
  }
  os << "  (winning (" << kind;
  for (LocId l : w.locations) os << " " << g.location_name(l);
  os << ")))\n";
  return os.str();
}

}  // namespace galatt
