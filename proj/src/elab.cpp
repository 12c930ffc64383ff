#include "rw/syntax.hpp"

#include <functional>
#include <map>
#include <unordered_map>

namespace rw {

namespace {

constexpr int kMeta = 100;

struct TN {
  int kind;  // static_cast<int>(TK) or kMeta
  int a = -1, b = -1;
  int link = -1;  // meta binding
  bool numeric = false;
};

struct IE {
  EK kind;
  int ty = -1;
  BinderId binder;
  int bty = -1;
  std::unique_ptr<IE> a, b;
  const IdentFamily* fam = nullptr;
  std::vector<int> params;
  bool eager = false;
  Int lit;
  bool is_clip_node = false;  // clip_{lo,hi} awaiting constant bounds
  int line = 0, col = 0;
};
using IEP = std::unique_ptr<IE>;

bool is_base_name(const std::string& n, TK& out) {
  static const std::map<std::string, TK> m = {
      {"Z", TK::Int},    {"Int", TK::Int},   {"int", TK::Int},     {"N", TK::Nat},   {"Nat", TK::Nat},
      {"nat", TK::Nat},  {"positive", TK::Nat}, {"bool", TK::Bool}, {"Bool", TK::Bool}, {"unit", TK::Unit},
      {"Unit", TK::Unit},
  };
  auto it = m.find(n);
  if (it == m.end()) return false;
  out = it->second;
  return true;
}

Type base_type(TK k) {
  switch (k) {
    case TK::Int: return ty::Int();
    case TK::Nat: return ty::Nat();
    case TK::Bool: return ty::Bool();
    default: return ty::Unit();
  }
}

}  // namespace

Type elaborate_type(const TypeSynP& t) {
  switch (t->k) {
    case TypeSyn::Name: {
      TK k;
      if (!is_base_name(t->name, k)) throw ParseError("SyntaxError", 0, 0, "unknown type '" + t->name + "'");
      return base_type(k);
    }
    case TypeSyn::List: return ty::list(elaborate_type(t->a));
    case TypeSyn::Option: return ty::option(elaborate_type(t->a));
    case TypeSyn::Prod: return ty::prod(elaborate_type(t->a), elaborate_type(t->b));
    case TypeSyn::Arrow: return ty::arrow(elaborate_type(t->a), elaborate_type(t->b));
  }
  return nullptr;
}

Type parse_type(const std::string& text) {
  SurfaceParser p(lex(text));
  TypeSynP t = p.type();
  if (!p.at_end()) p.fail("unexpected trailing input");
  return elaborate_type(t);
}

struct Elaborator::Impl {
  const Registry& reg;
  bool rule_mode;
  std::vector<TN> tn;
  std::map<std::string, int> named_tvars;
  std::unordered_map<std::string, std::pair<BinderId, int>> free_vars;
  std::vector<PatternVarDecl>* pvars = nullptr;
  std::vector<int> pvar_types;
  std::vector<IEP> terms;
  std::vector<ExprP> results;
  std::vector<Type> meta_result;  // generalization cache
  int ntvars = 0;
  std::vector<std::string> quoted;
  int fresh_counter = 0;

  struct Scope {
    std::string name;
    BinderId id;
    int ty;
  };
  std::vector<Scope> scope;

  Impl(const Registry& r, bool rm) : reg(r), rule_mode(rm) {}

  int con(TK k, int a = -1, int b = -1) {
    tn.push_back(TN{static_cast<int>(k), a, b, -1, false});
    return static_cast<int>(tn.size()) - 1;
  }
  int meta(bool numeric) {
    tn.push_back(TN{kMeta, -1, -1, -1, numeric});
    return static_cast<int>(tn.size()) - 1;
  }
  int find(int x) {
    int r = x;
    while (tn[r].kind == kMeta && tn[r].link >= 0) r = tn[r].link;
    while (tn[x].kind == kMeta && tn[x].link >= 0) {
      int nx = tn[x].link;
      tn[x].link = r;
      x = nx;
    }
    return r;
  }
  bool occurs(int m, int t) {
    t = find(t);
    if (t == m) return true;
    if (tn[t].kind == kMeta) return false;
    return (tn[t].a >= 0 && occurs(m, tn[t].a)) || (tn[t].b >= 0 && occurs(m, tn[t].b));
  }
  bool numeric_ok(int t) {
    t = find(t);
    if (tn[t].kind == kMeta) {
      tn[t].numeric = true;
      return true;
    }
    return tn[t].kind == static_cast<int>(TK::Int) || tn[t].kind == static_cast<int>(TK::Nat);
  }
  bool unify(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return true;
    if (tn[x].kind == kMeta) {
      if (occurs(x, y)) return false;
      if (tn[x].numeric && !numeric_ok(y)) return false;
      tn[x].link = y;
      return true;
    }
    if (tn[y].kind == kMeta) return unify(y, x);
    if (tn[x].kind != tn[y].kind) return false;
    if (tn[x].a >= 0 && !unify(tn[x].a, tn[y].a)) return false;
    if (tn[x].b >= 0 && !unify(tn[x].b, tn[y].b)) return false;
    return true;
  }
  std::string show_it(int t) {
    t = find(t);
    const TN& n = tn[t];
    if (n.kind == kMeta) return std::string(n.numeric ? "?n" : "?") + std::to_string(t);
    switch (static_cast<TK>(n.kind)) {
      case TK::Int: return "Z";
      case TK::Nat: return "N";
      case TK::Bool: return "bool";
      case TK::Unit: return "unit";
      case TK::List: return "list (" + show_it(n.a) + ")";
      case TK::Option: return "option (" + show_it(n.a) + ")";
      case TK::Prod: return "(" + show_it(n.a) + " * " + show_it(n.b) + ")";
      case TK::Arrow: return "(" + show_it(n.a) + " -> " + show_it(n.b) + ")";
      default: return "?";
    }
  }
  void unify_at(int x, int y, int line, int col, const std::string& what) {
    if (!unify(x, y))
      throw ParseError("TypeMismatch", line, col, what + ": expected " + show_it(y) + ", got " + show_it(x));
  }

  int from_type(Type t, std::vector<int>& tv) {
    switch (t->kind) {
      case TK::TVar: {
        if (static_cast<int>(tv.size()) <= t->var) tv.resize(t->var + 1, -1);
        if (tv[t->var] < 0) tv[t->var] = meta(t->numeric);
        return tv[t->var];
      }
      case TK::List:
      case TK::Option: return con(t->kind, from_type(t->a, tv));
      case TK::Prod:
      case TK::Arrow: {
        int a = from_type(t->a, tv);
        int b = from_type(t->b, tv);
        return con(t->kind, a, b);
      }
      default: return con(t->kind);
    }
  }

  int from_syn(const TypeSynP& t, int line, int col) {
    switch (t->k) {
      case TypeSyn::Name: {
        TK k;
        if (is_base_name(t->name, k)) return con(k);
        if (!rule_mode) throw ParseError("SyntaxError", line, col, "unknown type '" + t->name + "'");
        auto it = named_tvars.find(t->name);
        if (it != named_tvars.end()) return it->second;
        int m = meta(false);
        named_tvars[t->name] = m;
        return m;
      }
      case TypeSyn::List: return con(TK::List, from_syn(t->a, line, col));
      case TypeSyn::Option: return con(TK::Option, from_syn(t->a, line, col));
      case TypeSyn::Prod: {
        int a = from_syn(t->a, line, col);
        return con(TK::Prod, a, from_syn(t->b, line, col));
      }
      case TypeSyn::Arrow: {
        int a = from_syn(t->a, line, col);
        return con(TK::Arrow, a, from_syn(t->b, line, col));
      }
    }
    return -1;
  }

  Type zonk(int t) {
    t = find(t);
    const TN n = tn[t];
    if (n.kind == kMeta) {
      if (!rule_mode) {
        // Unconstrained types default to Z.
        tn[t] = TN{static_cast<int>(TK::Int)};
        return ty::Int();
      }
      if (static_cast<int>(meta_result.size()) <= t) meta_result.resize(t + 1, nullptr);
      if (!meta_result[t]) meta_result[t] = ty::tvar(ntvars++, n.numeric);
      return meta_result[t];
    }
    switch (static_cast<TK>(n.kind)) {
      case TK::List: return ty::list(zonk(n.a));
      case TK::Option: return ty::option(zonk(n.a));
      case TK::Prod: {
        Type a = zonk(n.a);
        return ty::prod(a, zonk(n.b));
      }
      case TK::Arrow: {
        Type a = zonk(n.a);
        return ty::arrow(a, zonk(n.b));
      }
      default: return base_type(static_cast<TK>(n.kind));
    }
  }

  IEP node(EK k, const SNodeP& s) {
    auto e = std::make_unique<IE>();
    e->kind = k;
    e->line = s->line;
    e->col = s->col;
    return e;
  }

  const IdentFamily* lookup_family(const std::string& name, int line, int col) {
    const IdentFamily* f = idents::find(name);
    if (!f || !reg.contains(f)) throw ParseError("UnknownIdent", line, col, "unknown identifier '" + name + "'");
    return f;
  }

  IEP ident_node(const IdentFamily* f, const SNodeP& s) {
    IEP e = node(EK::IdentRef, s);
    e->fam = f;
    std::vector<int> tv(f->nparams, -1);
    e->ty = from_type(f->schematic, tv);
    for (int& p : tv)
      if (p < 0) p = meta(false);
    e->params = tv;
    return e;
  }

  IEP app(IEP f, IEP x, const SNodeP& s) {
    int r = meta(false);
    int want = con(TK::Arrow, x->ty, r);
    int fty = find(f->ty);
    if (tn[fty].kind != kMeta && tn[fty].kind != static_cast<int>(TK::Arrow))
      throw ParseError("TypeMismatch", s->line, s->col, "applying a non-function of type " + show_it(fty));
    if (tn[fty].kind == static_cast<int>(TK::Arrow) && !unify(tn[fty].a, x->ty))
      throw ParseError("TypeMismatch", x->line, x->col,
                       "argument has type " + show_it(x->ty) + " but the function expects " + show_it(tn[fty].a));
    unify_at(f->ty, want, s->line, s->col, "application");
    IEP e = node(EK::App, s);
    e->ty = r;
    e->a = std::move(f);
    e->b = std::move(x);
    return e;
  }

  std::string fresh_pattern_name() { return "p$" + std::to_string(fresh_counter++); }

  BinderId new_binder(const std::string& name) {
    std::string hint = name;
    size_t d = hint.find('$');
    if (d != std::string::npos) hint = hint.substr(0, d);
    if (hint == "_") hint = "";
    return fresh_binder(hint.empty() ? nullptr : intern_name(hint));
  }

  // Desugars a pair-pattern binder: returns a plain binder and wraps `body`
  // into prod_rect (fun l r => body) p.
  SNodeP desugar_pattern(const SBinder& b, const SNodeP& body, std::string& pname) {
    pname = fresh_pattern_name();
    auto lam = std::make_shared<SNode>();
    lam->k = SNode::Lam;
    lam->line = b.line;
    lam->col = b.col;
    lam->binders = {*b.left, *b.right};
    lam->kids = {body};
    auto pr = std::make_shared<SNode>();
    pr->k = SNode::Name;
    pr->name = "prod_rect";
    pr->line = b.line;
    pr->col = b.col;
    auto pv = std::make_shared<SNode>();
    pv->k = SNode::Name;
    pv->name = pname;
    pv->line = b.line;
    pv->col = b.col;
    auto a1 = std::make_shared<SNode>();
    a1->k = SNode::App;
    a1->kids = {pr, lam};
    a1->line = b.line;
    a1->col = b.col;
    auto a2 = std::make_shared<SNode>();
    a2->k = SNode::App;
    a2->kids = {a1, pv};
    a2->line = b.line;
    a2->col = b.col;
    return a2;
  }

  IEP lambda(const std::vector<SBinder>& bs, size_t i, const SNodeP& body, const SNodeP& s) {
    if (i == bs.size()) return elab(body);
    const SBinder& b = bs[i];
    std::string name = b.name;
    SNodeP rest_body = body;
    std::vector<SBinder> rest(bs.begin() + i + 1, bs.end());
    if (b.left) {
      // Rebuild the remaining binders inside the destructuring.
      SNodeP inner = body;
      if (!rest.empty()) {
        auto lam = std::make_shared<SNode>();
        lam->k = SNode::Lam;
        lam->binders = rest;
        lam->kids = {body};
        lam->line = rest[0].line;
        lam->col = rest[0].col;
        inner = lam;
      }
      rest_body = desugar_pattern(b, inner, name);
      rest.clear();
    }
    IEP e = node(EK::Abs, s);
    e->binder = new_binder(name);
    e->bty = b.type ? from_syn(b.type, b.line, b.col) : meta(false);
    scope.push_back({name, e->binder, e->bty});
    e->a = lambda(rest, 0, rest_body, s);
    scope.pop_back();
    e->ty = con(TK::Arrow, e->bty, e->a->ty);
    return e;
  }

  IEP elab(const SNodeP& s) {
    switch (s->k) {
      case SNode::Num: {
        IEP e = node(EK::Literal, s);
        e->lit = s->num;
        if (s->suffix == 'N') {
          if (s->num < 0) throw ParseError("TypeMismatch", s->line, s->col, "negative N literal");
          e->ty = con(TK::Nat);
        } else if (s->suffix == 'Z') {
          e->ty = con(TK::Int);
        } else {
          e->ty = meta(true);
        }
        return e;
      }
      case SNode::Bool: {
        IEP e = node(EK::Literal, s);
        e->lit = s->bval ? 1 : 0;
        e->ty = con(TK::Bool);
        return e;
      }
      case SNode::Unit: {
        IEP e = node(EK::Literal, s);
        e->lit = 0;
        e->ty = con(TK::Unit);
        return e;
      }
      case SNode::Name: {
        for (size_t i = scope.size(); i-- > 0;) {
          if (scope[i].name == s->name && s->name != "_") {
            IEP e = node(EK::Var, s);
            e->binder = scope[i].id;
            e->ty = scope[i].ty;
            return e;
          }
        }
        if (pvars) {
          for (size_t k = 0; k < pvars->size(); ++k) {
            if ((*pvars)[k].name == s->name) {
              if (s->quoted) quoted.push_back(s->name);
              IEP e = node(EK::Var, s);
              e->binder = (*pvars)[k].id;
              e->ty = pvar_types[k];
              return e;
            }
          }
        }
        if (s->quoted) throw ParseError("UnboundVar", s->line, s->col, "'" + s->name + " is not a pattern variable");
        const IdentFamily* f = idents::find(s->name);
        if (f) {
          if (!reg.contains(f))
            throw ParseError("UnknownIdent", s->line, s->col, "identifier '" + s->name + "' is not in the registry");
          return ident_node(f, s);
        }
        if (rule_mode) throw ParseError("UnknownIdent", s->line, s->col, "unknown identifier '" + s->name + "'");
        auto it = free_vars.find(s->name);
        if (it == free_vars.end()) it = free_vars.emplace(s->name, std::make_pair(free_var(s->name), meta(false))).first;
        IEP e = node(EK::Var, s);
        e->binder = it->second.first;
        e->ty = it->second.second;
        return e;
      }
      case SNode::Op: return ident_node(lookup_family(s->name, s->line, s->col), s);
      case SNode::Eager: {
        const IdentFamily* f = lookup_family(s->name, s->line, s->col);
        if (f->kind != IdentKind::Eliminator)
          throw ParseError("SyntaxError", s->line, s->col, "'eagerly' applies only to eliminators");
        IEP e = ident_node(f, s);
        e->eager = true;
        return e;
      }
      case SNode::Clip: {
        IEP lo = elab(s->kids[0]);
        IEP hi = elab(s->kids[1]);
        unify_at(lo->ty, con(TK::Int), lo->line, lo->col, "clip bound");
        unify_at(hi->ty, con(TK::Int), hi->line, hi->col, "clip bound");
        IEP f = ident_node(idents::clip_dyn(), s);
        f->is_clip_node = true;
        IEP a1 = app(std::move(f), std::move(lo), s);
        return app(std::move(a1), std::move(hi), s);
      }
      case SNode::App: {
        IEP f = elab(s->kids[0]);
        IEP x = elab(s->kids[1]);
        return app(std::move(f), std::move(x), s);
      }
      case SNode::Lam: return lambda(s->binders, 0, s->kids[0], s);
      case SNode::Let: {
        const SBinder& b = s->binders[0];
        if (b.left) {
          // let '(a, b) := e1 in e2  ==  prod_rect (fun a b => e2) e1
          auto lam = std::make_shared<SNode>();
          lam->k = SNode::Lam;
          lam->binders = {*b.left, *b.right};
          lam->kids = {s->kids[1]};
          lam->line = s->line;
          lam->col = s->col;
          auto pr = std::make_shared<SNode>();
          pr->k = SNode::Name;
          pr->name = "prod_rect";
          pr->line = s->line;
          pr->col = s->col;
          auto a1 = std::make_shared<SNode>();
          a1->k = SNode::App;
          a1->kids = {pr, lam};
          a1->line = s->line;
          a1->col = s->col;
          auto a2 = std::make_shared<SNode>();
          a2->k = SNode::App;
          a2->kids = {a1, s->kids[0]};
          a2->line = s->line;
          a2->col = s->col;
          return elab(a2);
        }
        IEP bound = elab(s->kids[0]);
        if (s->type) unify_at(bound->ty, from_syn(s->type, s->line, s->col), s->line, s->col, "let annotation");
        IEP e = node(EK::LetIn, s);
        e->binder = new_binder(b.name);
        scope.push_back({b.name, e->binder, bound->ty});
        IEP body = elab(s->kids[1]);
        scope.pop_back();
        e->ty = body->ty;
        e->a = std::move(bound);
        e->b = std::move(body);
        return e;
      }
      case SNode::Ascribe: {
        IEP e = elab(s->kids[0]);
        unify_at(e->ty, from_syn(s->type, s->line, s->col), s->line, s->col, "ascription");
        return e;
      }
      case SNode::Pair: {
        IEP f = ident_node(idents::pair(), s);
        IEP a = elab(s->kids[0]);
        IEP b = elab(s->kids[1]);
        IEP a1 = app(std::move(f), std::move(a), s);
        return app(std::move(a1), std::move(b), s);
      }
      case SNode::List: {
        IEP acc = ident_node(idents::nil(), s);
        for (size_t i = s->kids.size(); i-- > 0;) {
          IEP c = ident_node(idents::cons(), s->kids[i]);
          IEP h = elab(s->kids[i]);
          IEP a1 = app(std::move(c), std::move(h), s->kids[i]);
          acc = app(std::move(a1), std::move(acc), s->kids[i]);
        }
        return acc;
      }
    }
    throw ParseError("SyntaxError", s->line, s->col, "unsupported syntax");
  }

  // Evaluates a closed clip bound made of literals and primitive arithmetic.
  std::optional<Int> const_int(const ExprP& e) {
    if (e->kind == EK::Literal) return e->lit;
    const Ident* id = head_ident(e.get());
    if (!id || id->fam->kind != IdentKind::Primitive || !id->fam->sem) return std::nullopt;
    auto args = spine_args(e);
    if (args.size() != id->fam->sem_arity) return std::nullopt;
    std::vector<Value> vs;
    for (const auto& a : args) {
      auto v = const_int(a);
      if (!v) return std::nullopt;
      vs.push_back(Value::number(*v));
    }
    Value r = id->fam->sem(*id, vs);
    if (r.tag != Value::Tag::Num) return std::nullopt;
    return r.num;
  }

  ExprP build(const IE& e) {
    switch (e.kind) {
      case EK::Var: return mk_var(e.binder, zonk(e.ty));
      case EK::Literal: {
        Type t = zonk(e.ty);
        if (t->kind == TK::Nat && e.lit < 0)
          throw ParseError("TypeMismatch", e.line, e.col, "negative literal at type N");
        return mk_lit(t, e.lit);
      }
      case EK::IdentRef: {
        std::vector<Type> targs;
        for (int p : e.params) targs.push_back(zonk(p));
        return mk_ident(idents::instantiate(e.fam, std::move(targs)), e.eager);
      }
      case EK::Abs: {
        Type bt = zonk(e.bty);
        return mk_abs(e.binder, bt, build(*e.a));
      }
      case EK::LetIn: {
        ExprP bound = build(*e.a);
        return mk_let(e.binder, bound, build(*e.b));
      }
      case EK::App: {
        // clip_{lo,hi} x with constant bounds becomes the clip ident itself.
        if (e.a->kind == EK::App && e.a->a->is_clip_node) {
          ExprP lo = build(*e.a->b);
          ExprP hi = build(*e.b);
          auto l = const_int(lo), u = const_int(hi);
          if (l && u) {
            if (!(*l < *u)) throw ParseError("TypeMismatch", e.line, e.col, "clip bounds must satisfy lo < hi");
            return mk_ident(idents::clip(*l, *u));
          }
          return mk_apps(build(*e.a->a), {lo, hi});
        }
        ExprP f = build(*e.a);
        return mk_app(f, build(*e.b));
      }
    }
    return nullptr;
  }
};

Elaborator::Elaborator(const Registry& reg, bool rule_mode) : impl_(std::make_unique<Impl>(reg, rule_mode)) {}
Elaborator::~Elaborator() = default;

void Elaborator::declare_pattern_vars(std::vector<PatternVarDecl>* vars) {
  impl_->pvars = vars;
  impl_->pvar_types.clear();
  for (auto& v : *vars) {
    if (!v.id.id) v.id = fresh_binder(intern_name(v.name));
    impl_->pvar_types.push_back(v.type ? impl_->from_syn(v.type, 0, 0) : impl_->meta(false));
  }
}

int Elaborator::add(const SNodeP& node) {
  impl_->terms.push_back(impl_->elab(node));
  return static_cast<int>(impl_->terms.size()) - 1;
}

void Elaborator::unify_terms(int i, int j, const SNodeP& where) {
  impl_->unify_at(impl_->terms[j]->ty, impl_->terms[i]->ty, where->line, where->col, "rule sides");
}

void Elaborator::require_type(int i, Type t, const SNodeP& where) {
  std::vector<int> tv;
  impl_->unify_at(impl_->terms[i]->ty, impl_->from_type(t, tv), where->line, where->col, "term");
}

void Elaborator::finish() {
  // Pattern variable types are generalized first so that type variables are
  // numbered in declaration order.
  if (impl_->pvars)
    for (int t : impl_->pvar_types) impl_->zonk(t);
  for (auto& t : impl_->terms) impl_->results.push_back(impl_->build(*t));
}

ExprP Elaborator::result(int i) const { return impl_->results.at(i); }

Type Elaborator::pattern_var_type(size_t k) const { return impl_->zonk(impl_->pvar_types.at(k)); }

int Elaborator::num_type_vars() const { return impl_->ntvars; }

const std::vector<std::string>& Elaborator::quoted_names() const { return impl_->quoted; }

ExprP parse_term(const std::string& text, const Registry& reg) {
  SurfaceParser p(lex(text));
  SNodeP s = p.expr();
  if (!p.at_end()) p.fail("unexpected trailing input");
  Elaborator el(reg, false);
  int i = el.add(s);
  el.finish();
  return el.result(i);
}

}  // namespace rw
