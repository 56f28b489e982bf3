// SPDX-License-Identifier: Apache-2.0

#include "smtlib.hpp"

#include <algorithm>
#include <sstream>

namespace galatt {

std::string smt_symbol(const Variable& v) { return v.primed ? v.name + "!p" : v.name; }

namespace {

void print_rational(std::ostringstream& os, const Rational& r, Sort sort) {
  if (r < 0) {
    os << "(- ";
    print_rational(os, -r, sort);
    os << ")";
    return;
  }
  if (denominator(r) == 1) {
    os << numerator(r).str();
    if (sort == Sort::Real) os << ".0";
  } else {
    os << "(/ " << numerator(r).str();
    if (sort == Sort::Real) os << ".0";
    os << " " << denominator(r).str();
    if (sort == Sort::Real) os << ".0";
    os << ")";
  }
}

Sort term_context_sort(const LinearTerm& t) {
  bool has_real = false;
  for (const auto& [v, c] : t.coeffs())
    if (v.sort == Sort::Real) has_real = true;
  if (has_real) return Sort::Real;
  return Sort::Int;
}

void print_term(std::ostringstream& os, const LinearTerm& t, Sort ctx,
                const SmtPrintOptions& opts) {
  // Integer context: scale away rational coefficients (sound, term is
  // compared against 0 by every caller).
  LinearTerm u = t;
  if (ctx == Sort::Int && !u.all_coeffs_integer()) {
    BigInt den = 1;
    for (const auto& [v, c] : u.coeffs()) den = lcm(den, denominator(c));
    den = lcm(den, denominator(u.constant_part()));
    u = u.scaled(Rational(den));
  }
  std::vector<std::string> parts;
  for (const auto& [v, c] : u.coeffs()) {
    std::ostringstream p;
    std::string sym = v.primed ? v.name + opts.prime_suffix : v.name;
    if (ctx == Sort::Real && v.sort == Sort::Int) sym = "(to_real " + sym + ")";
    if (c == 1) {
      p << sym;
    } else {
      p << "(* ";
      print_rational(p, c, ctx);
      p << " " << sym << ")";
    }
    parts.push_back(p.str());
  }
  if (u.constant_part() != 0 || parts.empty()) {
    std::ostringstream p;
    print_rational(p, u.constant_part(), ctx);
    parts.push_back(p.str());
  }
  if (parts.size() == 1) {
    os << parts[0];
    return;
  }
  os << "(+";
  for (const auto& p : parts) os << " " << p;
  os << ")";
}

void print_formula(std::ostringstream& os, const Formula& f, const SmtPrintOptions& opts) {
  switch (f.kind()) {
    case Formula::Kind::True:
      os << "true";
      return;
    case Formula::Kind::False:
      os << "false";
      return;
    case Formula::Kind::BoolVar:
      os << (f.variable().primed ? f.variable().name + opts.prime_suffix : f.variable().name);
      return;
    case Formula::Kind::Cmp: {
      Sort ctx = term_context_sort(f.term());
      const char* op = f.rel() == Formula::Rel::Le ? "<="
                       : f.rel() == Formula::Rel::Lt ? "<"
                                                     : "=";
      os << "(" << op << " ";
      print_term(os, f.term(), ctx, opts);
      os << " " << (ctx == Sort::Real ? "0.0" : "0") << ")";
      return;
    }
    case Formula::Kind::Opaque:
      os << f.opaque_text();
      return;
    case Formula::Kind::Not:
      os << "(not ";
      print_formula(os, f.children()[0], opts);
      os << ")";
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      os << (f.kind() == Formula::Kind::And ? "(and" : "(or");
      for (const auto& k : f.children()) {
        os << " ";
        print_formula(os, k, opts);
      }
      os << ")";
      return;
    }
    case Formula::Kind::Implies:
      os << "(=> ";
      print_formula(os, f.children()[0], opts);
      os << " ";
      print_formula(os, f.children()[1], opts);
      os << ")";
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      os << (f.kind() == Formula::Kind::Exists ? "(exists (" : "(forall (");
      for (size_t i = 0; i < f.binders().size(); ++i) {
        const auto& v = f.binders()[i];
        if (i) os << " ";
        os << "(" << (v.primed ? v.name + opts.prime_suffix : v.name) << " " << sort_name(v.sort) << ")";
      }
      os << ") ";
      print_formula(os, f.children()[0], opts);
      os << ")";
      return;
    }
    case Formula::Kind::App: {
      if (!opts.allow_placeholders)
        throw Error("placeholder symbol in solver-bound formula: " + f.symbol().name);
      os << "(" << f.symbol().name;
      for (const auto& a : f.args()) {
        os << " ";
        if (const auto* t = std::get_if<LinearTerm>(&a))
          print_term(os, *t, term_context_sort(*t), opts);
        else
          print_formula(os, std::get<Formula>(a), opts);
      }
      os << ")";
      return;
    }
  }
}

}  // namespace

std::string to_smt(const Formula& f, const SmtPrintOptions& opts) {
  std::ostringstream os;
  print_formula(os, f, opts);
  return os.str();
}

std::string to_smt(const LinearTerm& t, Sort ctx) {
  std::ostringstream os;
  print_term(os, t, ctx, SmtPrintOptions{});
  return os.str();
}

// substitute into an opaque atom: renames rewrite the text; compound terms
// wrap the text in an SMT let binder
Formula opaque_substitute(const Formula& opaque, const SubstMap& map) {
  std::vector<Variable> vars;
  std::vector<std::pair<std::string, std::string>> lets;
  bool pure_rename = true;
  for (const auto& [v, rep] : map) {
    if (const auto* t = std::get_if<LinearTerm>(&rep)) {
      if (t->coeffs().size() == 1 && t->constant_part() == 0 &&
          t->coeffs().begin()->second == 1)
        continue;
      pure_rename = false;
    } else {
      const Formula& g = std::get<Formula>(rep);
      if (g.kind() == Formula::Kind::BoolVar) continue;
      pure_rename = false;
    }
  }
  auto rename_text = [](const std::string& text, const std::string& from,
                        const std::string& to) {
    std::string out;
    size_t i = 0;
    auto is_sym = [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) ||
             std::strchr("~!@$%^&*_-+=<>.?/", c) != nullptr;
    };
    while (i < text.size()) {
      if (text.compare(i, from.size(), from) == 0 &&
          (i == 0 || !is_sym(text[i - 1])) &&
          (i + from.size() >= text.size() || !is_sym(text[i + from.size()]))) {
        out += to;
        i += from.size();
      } else {
        out += text[i++];
      }
    }
    return out;
  };
  if (pure_rename) {
    std::string text = opaque.opaque_text();
    std::vector<Variable> new_vars;
    for (const auto& v : opaque.opaque_vars()) {
      auto it = map.find(v);
      if (it == map.end()) {
        new_vars.push_back(v);
        continue;
      }
      Variable target = v;
      if (const auto* t = std::get_if<LinearTerm>(&it->second))
        target = t->coeffs().begin()->first;
      else
        target = std::get<Formula>(it->second).variable();
      text = rename_text(text, smt_symbol(v), smt_symbol(target));
      new_vars.push_back(target);
    }
    return Formula::opaque(std::move(text), std::move(new_vars));
  }
  std::ostringstream os;
  os << "(let (";
  std::set<Variable> new_free;
  bool first = true;
  for (const auto& v : opaque.opaque_vars()) {
    auto it = map.find(v);
    if (it == map.end()) {
      new_free.insert(v);
      continue;
    }
    if (!first) os << " ";
    first = false;
    os << "(" << smt_symbol(v) << " ";
    if (const auto* t = std::get_if<LinearTerm>(&it->second)) {
      os << to_smt(*t, v.sort == Sort::Real ? Sort::Real : Sort::Int);
      for (const auto& [v2, c] : t->coeffs()) new_free.insert(v2);
    } else {
      os << to_smt(std::get<Formula>(it->second));
      auto fv = free_vars(std::get<Formula>(it->second));
      new_free.insert(fv.begin(), fv.end());
    }
    os << ")";
  }
  os << ") " << opaque.opaque_text() << ")";
  return Formula::opaque(os.str(), std::vector<Variable>(new_free.begin(), new_free.end()));
}

// ---- reader ----

namespace {

struct Unsupported {
  const SExpr* at;
};

struct Reader {
  const SmtSymbolTable& symtab;

  std::optional<Variable> lookup(const std::string& name) const {
    auto it = symtab.vars.find(name);
    if (it == symtab.vars.end()) return std::nullopt;
    return it->second;
  }

  // numeric term; throws Unsupported for non-affine constructs
  LinearTerm term(const SExpr& e, const std::map<std::string, SExpr>& lets) const {
    switch (e.kind) {
      case SExpr::Kind::Number: {
        auto dot = e.text.find('.');
        if (dot == std::string::npos) return LinearTerm(Rational(BigInt(e.text)));
        std::string ip = e.text.substr(0, dot), fp = e.text.substr(dot + 1);
        BigInt num(ip.empty() ? "0" : ip);
        BigInt den = 1;
        for (char c : fp) {
          num = num * 10 + (c - '0');
          den *= 10;
        }
        return LinearTerm(Rational(num, den));
      }
      case SExpr::Kind::Symbol: {
        auto li = lets.find(e.text);
        if (li != lets.end()) return term(li->second, {});
        auto v = lookup(e.text);
        if (!v) throw ParseError("unknown symbol '" + e.text + "'", e.line, e.col);
        if (!v->is_numeric()) throw ParseError("boolean symbol in numeric term", e.line, e.col);
        return LinearTerm(*v);
      }
      case SExpr::Kind::List: {
        if (e.items.empty() || e.items[0].kind != SExpr::Kind::Symbol) throw Unsupported{&e};
        const std::string& op = e.items[0].text;
        if (op == "+") {
          LinearTerm acc;
          for (size_t i = 1; i < e.items.size(); ++i) acc = acc + term(e.items[i], lets);
          return acc;
        }
        if (op == "-") {
          if (e.items.size() == 2) return term(e.items[1], lets).negated();
          LinearTerm acc = term(e.items[1], lets);
          for (size_t i = 2; i < e.items.size(); ++i) acc = acc - term(e.items[i], lets);
          return acc;
        }
        if (op == "*") {
          LinearTerm acc(Rational(1));
          bool seen_var = false;
          Rational scale = 1;
          LinearTerm varpart;
          for (size_t i = 1; i < e.items.size(); ++i) {
            LinearTerm t = term(e.items[i], lets);
            if (t.is_constant()) {
              scale *= t.constant_part();
            } else if (!seen_var) {
              seen_var = true;
              varpart = t;
            } else {
              throw Unsupported{&e};  // nonlinear
            }
          }
          return seen_var ? varpart.scaled(scale) : LinearTerm(scale);
        }
        if (op == "/") {
          LinearTerm num = term(e.items[1], lets);
          LinearTerm den = term(e.items[2], lets);
          if (!den.is_constant() || den.constant_part() == 0) throw Unsupported{&e};
          return num.scaled(Rational(1) / den.constant_part());
        }
        if (op == "to_real" && e.items.size() == 2) return term(e.items[1], lets);
        throw Unsupported{&e};
      }
      default:
        throw Unsupported{&e};
    }
  }

  Formula formula(const SExpr& e, std::map<std::string, SExpr> lets) const {
    try {
      return formula_inner(e, lets);
    } catch (const Unsupported& u) {
      // capture the whole boolean subterm verbatim
      return make_opaque(e, lets);
    }
  }

  Formula make_opaque(const SExpr& e, const std::map<std::string, SExpr>& lets) const {
    // inline lets textually to keep the captured text self-contained
    SExpr resolved = resolve_lets(e, lets);
    std::vector<Variable> vars;
    collect_vars(resolved, vars);
    return Formula::opaque(resolved.to_string(), std::move(vars));
  }

  SExpr resolve_lets(const SExpr& e, const std::map<std::string, SExpr>& lets) const {
    if (lets.empty()) return e;
    if (e.kind == SExpr::Kind::Symbol) {
      auto it = lets.find(e.text);
      if (it != lets.end()) return it->second;
      return e;
    }
    if (e.kind != SExpr::Kind::List) return e;
    SExpr out = e;
    for (auto& k : out.items) k = resolve_lets(k, lets);
    return out;
  }

  void collect_vars(const SExpr& e, std::vector<Variable>& out) const {
    if (e.kind == SExpr::Kind::Symbol) {
      auto v = lookup(e.text);
      if (v) out.push_back(*v);
      return;
    }
    for (const auto& k : e.items) collect_vars(k, out);
  }

  Formula formula_inner(const SExpr& e, std::map<std::string, SExpr>& lets) const {
    if (e.kind == SExpr::Kind::Symbol) {
      if (e.text == "true") return Formula::tru();
      if (e.text == "false") return Formula::fls();
      auto li = lets.find(e.text);
      if (li != lets.end()) {
        std::map<std::string, SExpr> none;
        return formula(li->second, none);
      }
      auto v = lookup(e.text);
      if (!v) throw ParseError("unknown symbol '" + e.text + "'", e.line, e.col);
      if (v->sort != Sort::Bool)
        throw ParseError("numeric symbol used as formula: " + e.text, e.line, e.col);
      return Formula::var(*v);
    }
    if (e.kind != SExpr::Kind::List || e.items.empty() ||
        e.items[0].kind != SExpr::Kind::Symbol)
      throw Unsupported{&e};
    const std::string& op = e.items[0].text;
    auto sub = [&](size_t i) { return formula(e.items[i], lets); };
    if (op == "and" || op == "or") {
      std::vector<Formula> kids;
      for (size_t i = 1; i < e.items.size(); ++i) kids.push_back(sub(i));
      return op == "and" ? f_and(std::move(kids)) : f_or(std::move(kids));
    }
    if (op == "not" && e.items.size() == 2) return f_not(sub(1));
    if (op == "=>" && e.items.size() >= 3) {
      Formula acc = sub(e.items.size() - 1);
      for (size_t i = e.items.size() - 1; i-- > 1;) acc = f_implies(sub(i), acc);
      return acc;
    }
    if (op == "ite" && e.items.size() == 4) {
      // boolean ite only; numeric ite is unsupported and becomes opaque
      Formula c = sub(1), a = sub(2), b = sub(3);
      return f_or(f_and(c, a), f_and(f_not(c), b));
    }
    if (op == "<=" || op == "<" || op == ">=" || op == ">") {
      if (e.items.size() != 3) throw Unsupported{&e};
      LinearTerm a = term(e.items[1], lets), b = term(e.items[2], lets);
      Formula::RelOp r = op == "<=" ? Formula::RelOp::Le
                         : op == "<" ? Formula::RelOp::Lt
                         : op == ">=" ? Formula::RelOp::Ge
                                      : Formula::RelOp::Gt;
      return Formula::cmp(a, r, b);
    }
    if (op == "=") {
      if (e.items.size() != 3) throw Unsupported{&e};
      // boolean or numeric equality; try numeric first
      bool numeric = true;
      try {
        LinearTerm a = term(e.items[1], lets), b = term(e.items[2], lets);
        return Formula::cmp(a, Formula::RelOp::Eq, b);
      } catch (const ParseError&) {
        numeric = false;
      } catch (const Unsupported&) {
        numeric = false;
      }
      (void)numeric;
      Formula a = sub(1), b = sub(2);
      return f_and(f_implies(a, b), f_implies(b, a));
    }
    if (op == "distinct" && e.items.size() == 3) {
      LinearTerm a = term(e.items[1], lets), b = term(e.items[2], lets);
      return f_not(Formula::cmp(a, Formula::RelOp::Eq, b));
    }
    if (op == "let" && e.items.size() == 3 && e.items[1].kind == SExpr::Kind::List) {
      std::map<std::string, SExpr> inner = lets;
      for (const auto& binding : e.items[1].items) {
        if (binding.kind != SExpr::Kind::List || binding.items.size() != 2 ||
            binding.items[0].kind != SExpr::Kind::Symbol)
          throw ParseError("malformed let", binding.line, binding.col);
        inner[binding.items[0].text] = resolve_lets(binding.items[1], lets);
      }
      return formula(e.items[2], inner);
    }
    if ((op == "exists" || op == "forall") && e.items.size() == 3 &&
        e.items[1].kind == SExpr::Kind::List) {
      SmtSymbolTable extended = symtab;
      std::vector<Variable> binders;
      for (const auto& b : e.items[1].items) {
        if (b.kind != SExpr::Kind::List || b.items.size() != 2)
          throw ParseError("malformed binder", b.line, b.col);
        const std::string& name = b.items[0].text;
        const std::string& sort = b.items[1].kind == SExpr::Kind::Symbol ? b.items[1].text : "";
        Sort s;
        if (sort == "Int") s = Sort::Int;
        else if (sort == "Real") s = Sort::Real;
        else if (sort == "Bool") s = Sort::Bool;
        else throw ParseError("unsupported sort '" + sort + "'", b.line, b.col);
        Variable v{name, s, false};
        // strip the prime suffix if the binder shadows a primed symbol
        if (name.size() > 2 && name.substr(name.size() - 2) == "!p") {
          v.name = name.substr(0, name.size() - 2);
          v.primed = true;
        }
        extended.vars[name] = v;
        binders.push_back(v);
      }
      Reader inner{extended};
      Formula body = inner.formula(e.items[2], lets);
      return f_quant(op == "exists" ? Formula::Kind::Exists : Formula::Kind::Forall,
                     std::move(binders), body);
    }
    throw Unsupported{&e};
  }
};

}  // namespace

Formula smt_to_formula(const SExpr& e, const SmtSymbolTable& symtab) {
  Reader r{symtab};
  std::map<std::string, SExpr> lets;
  return r.formula(e, lets);
}

}  // namespace galatt
