#include "rw/rules.hpp"

#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace rw {

bool is_wildcard_like(const Pattern& p) { return p.k == Pattern::Wildcard || p.k == Pattern::ConstVar; }

namespace {

void each_node(const ExprP& root, const std::function<void(const Expr*)>& f) {
  std::vector<const Expr*> stack{root.get()};
  while (!stack.empty()) {
    const Expr* e = stack.back();
    stack.pop_back();
    f(e);
    if (e->a) stack.push_back(e->a.get());
    if (e->b) stack.push_back(e->b.get());
  }
}

void collect_tvars(Type t, std::unordered_set<int>& out) {
  if (!t->has_tvar) return;
  if (t->kind == TK::TVar) {
    out.insert(t->var);
    return;
  }
  if (t->a) collect_tvars(t->a, out);
  if (t->b) collect_tvars(t->b, out);
}

struct PendingBinder {
  std::string name;
  TypeSynP type;
  bool is_const = false;
};

struct LhsBuilder {
  RewriteRule& rule;
  int line, col;
  std::vector<bool> seen;

  [[noreturn]] void fail(const std::string& kind, const std::string& msg) { throw ParseError(kind, line, col, msg); }

  int var_index(const Expr* e) {
    for (size_t k = 0; k < rule.vars.size(); ++k)
      if (rule.vars[k].id == e->binder) return static_cast<int>(k);
    fail("SyntaxError", "patterns cannot refer to bound variables");
  }

  int use_var(const Expr* e) {
    int k = var_index(e);
    if (seen[k]) fail("NonlinearPattern", "pattern variable '" + rule.vars[k].name + "' occurs more than once");
    seen[k] = true;
    return k;
  }

  PatternP conv(const ExprP& e) {
    auto p = std::make_shared<Pattern>();
    p->type = e->type;
    switch (e->kind) {
      case EK::Var: {
        int k = use_var(e.get());
        p->k = rule.vars[k].is_const ? Pattern::ConstVar : Pattern::Wildcard;
        p->var = k;
        if (p->k == Pattern::ConstVar && !is_base(rule.vars[k].type))
          fail("SyntaxError", "constant pattern variable '" + rule.vars[k].name + "' must have a base type");
        return p;
      }
      case EK::Literal:
        p->k = Pattern::Literal;
        p->lit = e->lit;
        return p;
      case EK::IdentRef:
        if (e->eager) fail("SyntaxError", "'eagerly' is not allowed in patterns");
        if (e->ident->fam == idents::clip_dyn()) fail("SyntaxError", "clip in a pattern needs its argument");
        p->k = Pattern::Ident;
        p->fam = e->ident->fam;
        p->targs = e->ident->targs;
        p->lo = e->ident->lo;
        p->hi = e->ident->hi;
        return p;
      case EK::App: {
        const Ident* h = head_ident(e.get());
        auto args = spine_args(e);
        if (h && h->fam == idents::clip_dyn() && args.size() == 3) {
          auto clip = std::make_shared<Pattern>();
          clip->k = Pattern::Ident;
          clip->fam = idents::clip_family();
          clip->type = ty::arrow(ty::Int(), ty::Int());
          auto bound = [&](const ExprP& b, int& var, Int& fixed) {
            if (b->kind == EK::Literal) {
              fixed = b->lit;
              return;
            }
            if (b->kind != EK::Var) fail("SyntaxError", "clip bounds in a pattern must be constants or variables");
            int k = use_var(b.get());
            if (!rule.vars[k].is_const) rule.vars[k].is_const = true;
            var = k;
          };
          bound(args[0], clip->lo_var, clip->lo);
          bound(args[1], clip->hi_var, clip->hi);
          p->k = Pattern::App;
          p->fn = clip;
          p->arg = conv(args[2]);
          return p;
        }
        p->k = Pattern::App;
        p->fn = conv(e->a);
        p->arg = conv(e->b);
        if (!is_base(p->arg->type) && p->arg->k != Pattern::Wildcard)
          fail("SyntaxError", "only variables may appear at function-typed pattern positions");
        return p;
      }
      default: fail("SyntaxError", "patterns cannot contain binders");
    }
  }
};

const Pattern* pattern_head(const Pattern* p) {
  while (p->k == Pattern::App) p = p->fn.get();
  return p;
}

Registry universe_registry() {
  Registry r;
  for (const IdentFamily* f : idents::all()) r.add(f);
  return r;
}

RewriteRule elaborate_rule(const std::string& name, int index, const Token& at, std::vector<PendingBinder>& binders,
                           const SNodeP& cond, const SNodeP& lhs, const SNodeP& rhs, bool again) {
  RewriteRule r;
  r.name = name;
  r.index = index;
  r.again = again;
  r.line = at.line;
  std::vector<PatternVarDecl> decls;
  for (const auto& b : binders) decls.push_back(PatternVarDecl{b.name, b.type, b.is_const, {}});
  Registry all = universe_registry();
  Elaborator el(all, true);
  el.declare_pattern_vars(&decls);
  int li = el.add(lhs);
  int ri = el.add(rhs);
  el.unify_terms(li, ri, rhs);
  int ci = -1;
  if (cond) {
    ci = el.add(cond);
    el.require_type(ci, ty::Bool(), cond);
  }
  el.finish();
  std::unordered_set<std::string> quoted(el.quoted_names().begin(), el.quoted_names().end());
  for (size_t k = 0; k < decls.size(); ++k) {
    PatternVar v;
    v.name = decls[k].name;
    v.id = decls[k].id;
    v.type = el.pattern_var_type(k);
    v.is_const = decls[k].is_const || quoted.count(v.name);
    r.vars.push_back(v);
  }
  r.lhs_expr = el.result(li);
  r.rhs = el.result(ri);
  if (ci >= 0) r.cond = el.result(ci);
  r.ntvars = el.num_type_vars();
  r.type = r.lhs_expr->type;

  LhsBuilder b{r, lhs->line, lhs->col, std::vector<bool>(r.vars.size(), false)};
  if (!is_base(r.type)) b.fail("SyntaxError", "rule '" + name + "' must rewrite a term of base type");
  r.lhs = b.conv(r.lhs_expr);
  const Pattern* head = pattern_head(r.lhs.get());
  if (head->k != Pattern::Ident) b.fail("SyntaxError", "the head of a left-hand side must be an identifier");

  auto var_of = [&](const BinderId& id) -> int {
    for (size_t k = 0; k < r.vars.size(); ++k)
      if (r.vars[k].id == id) return static_cast<int>(k);
    return -1;
  };
  for (const BinderId& x : free_vars(r.rhs)) {
    int k = var_of(x);
    if (k < 0 || !b.seen[k])
      throw ParseError("UnboundVar", rhs->line, rhs->col,
                       "'" + (x.hint ? *x.hint : std::string("?")) + "' does not occur in the left-hand side");
  }
  if (r.cond) {
    for (const BinderId& x : free_vars(r.cond)) {
      int k = var_of(x);
      if (k < 0 || !b.seen[k])
        throw ParseError("UnboundVar", cond->line, cond->col,
                         "'" + (x.hint ? *x.hint : std::string("?")) + "' does not occur in the left-hand side");
      if (!r.vars[k].is_const)
        throw ParseError("NonConstVarInCondition", cond->line, cond->col,
                         "side condition mentions '" + r.vars[k].name + "', which is not marked constant");
    }
    each_node(r.cond, [&](const Expr* e) {
      if (e->kind == EK::IdentRef && !e->ident->fam->sem)
        throw ParseError("SyntaxError", cond->line, cond->col,
                         "side condition uses '" + e->ident->name() + "', which cannot be evaluated");
      if (e->kind == EK::Abs || e->kind == EK::LetIn)
        throw ParseError("SyntaxError", cond->line, cond->col, "side conditions cannot bind variables");
    });
  }
  std::unordered_set<int> lhs_tvars;
  each_node(r.lhs_expr, [&](const Expr* e) { collect_tvars(e->type, lhs_tvars); });
  each_node(r.rhs, [&](const Expr* e) {
    std::unordered_set<int> ts;
    collect_tvars(e->type, ts);
    for (int t : ts)
      if (!lhs_tvars.count(t))
        throw ParseError("SyntaxError", rhs->line, rhs->col,
                         "the right-hand side mentions a type that the left-hand side does not determine");
  });
  return r;
}

std::string ident_token(SurfaceParser& p, const char* what) {
  const Token& t = p.peek();
  if (t.kind != Tok::Ident) p.fail(std::string("expected ") + what);
  return p.next().text;
}

}  // namespace

Registry scrape_idents(const std::vector<RewriteRule>& rules, const std::vector<const IdentFamily*>& extra) {
  Registry reg;
  auto add_from = [&](const ExprP& e) {
    if (!e) return;
    each_node(e, [&](const Expr* n) {
      if (n->kind == EK::IdentRef) reg.add(n->ident->fam);
    });
  };
  for (const auto& r : rules) {
    add_from(r.lhs_expr);
    add_from(r.rhs);
    add_from(r.cond);
  }
  for (const IdentFamily* f : extra) reg.add(f);
  return reg;
}

RuleSet parse_rules(const std::string& text) {
  SurfaceParser p(lex(text));
  RuleSet rs;
  while (true) {
    if (p.at("options")) {
      p.next();
      p.accept(":");
      do {
        Token t = p.peek();
        std::string opt = ident_token(p, "an option");
        if (opt == "delta")
          rs.delta = true;
        else
          throw ParseError("SyntaxError", t.line, t.col, "unknown option '" + opt + "'");
      } while (p.accept(","));
    } else if (p.at("extra")) {
      p.next();
      p.expect("idents");
      p.accept(":");
      bool paren = p.accept("(");
      do {
        Token t = p.peek();
        std::string name = ident_token(p, "an identifier");
        const IdentFamily* f = nullptr;
        if (p.accept(":")) {
          Type sig = elaborate_type(p.type());
          try {
            f = idents::declare_uninterpreted(name, sig);
          } catch (const std::runtime_error& e) {
            throw ParseError("SyntaxError", t.line, t.col, e.what());
          }
        } else {
          f = idents::find(name);
          if (!f) throw ParseError("UnknownIdent", t.line, t.col, "unknown identifier '" + name + "'");
        }
        rs.extra_idents.push_back(f);
      } while (p.accept(","));
      if (paren) p.expect(")");
    } else if (p.at("eval_rect")) {
      p.next();
      p.accept(":");
      do {
        Token t = p.peek();
        std::string g = ident_token(p, "a type name");
        if (g != "nat" && g != "list" && g != "prod" && g != "bool" && g != "option")
          throw ParseError("SyntaxError", t.line, t.col, "eval_rect does not support '" + g + "'");
        rs.eval_rect.insert(g);
      } while (p.accept(","));
    } else {
      break;
    }
  }
  std::unordered_set<std::string> names;
  while (!p.at_end()) {
    Token at = p.peek();
    p.expect("rule");
    Token nt = p.peek();
    std::string name = ident_token(p, "a rule name");
    if (!names.insert(name).second) throw ParseError("SyntaxError", nt.line, nt.col, "duplicate rule '" + name + "'");
    p.expect(":");
    std::vector<PendingBinder> binders;
    auto add_binder = [&](const Token& t, std::string n, TypeSynP type, bool c) {
      if (!n.empty() && n[0] == '\'') {
        n = n.substr(1);
        c = true;
      }
      for (const auto& b : binders)
        if (b.name == n) throw ParseError("SyntaxError", t.line, t.col, "duplicate pattern variable '" + n + "'");
      binders.push_back(PendingBinder{n, std::move(type), c});
    };
    if (p.accept("forall")) {
      while (!p.accept(",")) {
        if (p.accept("(")) {
          bool c = p.accept("const");
          std::vector<Token> group;
          while (p.peek().kind == Tok::Ident && p.peek().text != "const") group.push_back(p.next());
          if (group.empty()) p.fail("expected a pattern variable");
          TypeSynP t;
          if (p.accept(":")) t = p.type();
          p.expect(")");
          for (const auto& g : group) add_binder(g, g.text, t, c);
        } else {
          Token t = p.peek();
          add_binder(t, ident_token(p, "a pattern variable or ','"), nullptr, false);
        }
      }
    }
    SNodeP cond;
    if (p.accept("if")) {
      cond = p.expr();
      p.expect("then");
    }
    SNodeP lhs = p.expr();
    p.expect("=>");
    SNodeP rhs = p.expr();
    bool again = p.accept("again");
    rs.rules.push_back(
        elaborate_rule(name, static_cast<int>(rs.rules.size()), at, binders, cond, lhs, rhs, again));
  }
  rs.registry = scrape_idents(rs.rules, rs.extra_idents);
  return rs;
}

const std::string& embedded_rules(const std::string& name) {
  for (const auto& [n, text] : embedded_rule_files())
    if (n == name) return text;
  throw std::invalid_argument("no embedded rule file named '" + name + "'");
}

RuleSet prelude() { return parse_rules(embedded_rules("prelude")); }

std::string show(const Pattern& p, const std::vector<PatternVar>& vars) {
  switch (p.k) {
    case Pattern::Wildcard: return "?" + vars.at(p.var).name;
    case Pattern::ConstVar: return "'" + vars.at(p.var).name;
    case Pattern::Literal: return "#" + to_string(p.lit);
    case Pattern::Ident: {
      std::string s = p.fam->name;
      if (p.fam == idents::clip_family()) {
        std::string lo = p.lo_var >= 0 ? "'" + vars.at(p.lo_var).name : to_string(p.lo);
        std::string hi = p.hi_var >= 0 ? "'" + vars.at(p.hi_var).name : to_string(p.hi);
        s = "clip_{" + lo + "," + hi + "}";
      }
      if (!p.targs.empty()) {
        s += "@{";
        for (size_t i = 0; i < p.targs.size(); ++i) s += (i ? "," : "") + rw::show(p.targs[i]);
        s += "}";
      }
      return s;
    }
    case Pattern::App: return "(" + show(*p.fn, vars) + " " + show(*p.arg, vars) + ")";
  }
  return "?";
}

std::string print_rule(const RewriteRule& r) {
  PrintOptions opts;
  opts.annotate = true;
  opts.ascribe_free = false;
  std::string s = "rule " + r.name + ":";
  if (!r.vars.empty()) {
    s += " forall";
    for (const auto& v : r.vars) s += std::string(" (") + (v.is_const ? "const " : "") + v.name + " : " + show(v.type) + ")";
    s += ",";
  }
  if (r.cond) s += " if " + print(r.cond, opts) + " then";
  std::string lhs = print(r.lhs_expr, opts);
  s += " " + lhs + " => " + print(r.rhs, opts);
  if (r.again) s += " again";
  return s;
}

std::string print_rules(const RuleSet& rs) {
  std::string s;
  if (rs.delta) s += "options: delta\n";
  if (!rs.extra_idents.empty()) {
    s += "extra idents: ";
    for (size_t i = 0; i < rs.extra_idents.size(); ++i) {
      const IdentFamily* f = rs.extra_idents[i];
      if (i) s += ", ";
      s += f->name;
      if (f->kind == IdentKind::Uninterpreted) s += " : " + show(f->schematic);
    }
    s += "\n";
  }
  if (!rs.eval_rect.empty()) {
    s += "eval_rect: ";
    bool first = true;
    for (const auto& g : rs.eval_rect) {
      if (!first) s += ", ";
      s += g;
      first = false;
    }
    s += "\n";
  }
  for (const auto& r : rs.rules) s += print_rule(r) + "\n";
  return s;
}

namespace {

ExprP close_over(const RewriteRule& r, const ExprP& e) {
  ExprP out = e;
  for (size_t k = r.vars.size(); k-- > 0;) out = mk_abs(r.vars[k].id, r.vars[k].type, out);
  return out;
}

bool same_pattern(const Pattern& a, const Pattern& b) {
  if (a.k != b.k || a.type != b.type || a.var != b.var) return false;
  switch (a.k) {
    case Pattern::Literal: return a.lit == b.lit;
    case Pattern::Ident:
      return a.fam == b.fam && a.targs == b.targs && a.lo_var == b.lo_var && a.hi_var == b.hi_var &&
             (a.lo_var >= 0 || a.lo == b.lo) && (a.hi_var >= 0 || a.hi == b.hi);
    case Pattern::App: return same_pattern(*a.fn, *b.fn) && same_pattern(*a.arg, *b.arg);
    default: return true;
  }
}

}  // namespace

bool rules_equivalent(const RuleSet& a, const RuleSet& b) {
  if (a.delta != b.delta || a.eval_rect != b.eval_rect || a.extra_idents != b.extra_idents) return false;
  if (a.registry.families() != b.registry.families()) return false;
  if (a.rules.size() != b.rules.size()) return false;
  for (size_t i = 0; i < a.rules.size(); ++i) {
    const RewriteRule& x = a.rules[i];
    const RewriteRule& y = b.rules[i];
    if (x.name != y.name || x.index != y.index || x.again != y.again || x.vars.size() != y.vars.size() ||
        x.type != y.type || x.ntvars != y.ntvars)
      return false;
    for (size_t k = 0; k < x.vars.size(); ++k)
      if (x.vars[k].name != y.vars[k].name || x.vars[k].type != y.vars[k].type ||
          x.vars[k].is_const != y.vars[k].is_const)
        return false;
    if (!same_pattern(*x.lhs, *y.lhs)) return false;
    if (!alpha_equal(close_over(x, x.rhs), close_over(y, y.rhs))) return false;
    if (bool(x.cond) != bool(y.cond)) return false;
    if (x.cond && !alpha_equal(close_over(x, x.cond), close_over(y, y.cond))) return false;
  }
  return true;
}

}  // namespace rw
