#include "rw/oracle.hpp"

#include <functional>

namespace rw {

// ---- root matching ----------------------------------------------------------

namespace {

struct NaiveMatcher {
  const RewriteRule& rule;
  MatchBindings mb;
  std::unordered_map<uint64_t, int> var_index;

  explicit NaiveMatcher(const RewriteRule& r) : rule(r) {
    mb.types.assign(r.ntvars, nullptr);
    mb.terms.assign(r.vars.size(), std::nullopt);
    for (size_t k = 0; k < r.vars.size(); ++k) var_index[r.vars[k].id.id] = static_cast<int>(k);
  }

  bool ty_ok(Type pat, Type actual) { return match_type(pat, actual, mb.types); }

  bool bind(int k, const ExprP& e) {
    if (mb.terms[k]) return alpha_equal(mb.terms[k]->to_expr(), e);
    mb.terms[k] = RawTerm::of(e);
    return true;
  }

  bool clip_bound(const ExprP& p, const Int& actual) {
    if (p->kind == EK::Literal) return p->lit == actual;
    return bind(var_index.at(p->binder.id), mk_int(actual));
  }

  bool go(const ExprP& p, const ExprP& e) {
    switch (p->kind) {
      case EK::Var: {
        int k = var_index.at(p->binder.id);
        if (rule.vars[k].is_const && e->kind != EK::Literal) return false;
        return ty_ok(rule.vars[k].type, e->type) && bind(k, e);
      }
      case EK::Literal:
        return e->kind == EK::Literal && e->lit == p->lit && ty_ok(p->type, e->type);
      case EK::IdentRef: {
        if (e->kind != EK::IdentRef || e->ident->fam != p->ident->fam) return false;
        for (size_t i = 0; i < p->ident->targs.size(); ++i)
          if (!ty_ok(p->ident->targs[i], e->ident->targs[i])) return false;
        return true;
      }
      case EK::App: {
        std::vector<ExprP> pargs = spine_args(p);
        const Ident* ph = head_ident(p.get());
        if (ph && ph->fam == idents::clip_dyn() && pargs.size() == 3) {
          if (e->kind != EK::App || e->a->kind != EK::IdentRef || e->a->ident->fam != idents::clip_family())
            return false;
          return clip_bound(pargs[0], e->a->ident->lo) && clip_bound(pargs[1], e->a->ident->hi) &&
                 go(pargs[2], e->b);
        }
        return e->kind == EK::App && go(p->a, e->a) && go(p->b, e->b);
      }
      default: return false;
    }
  }

  bool condition() {
    if (!rule.cond) return true;
    ValueEnv env;
    for (size_t k = 0; k < rule.vars.size(); ++k) {
      if (!rule.vars[k].is_const || !mb.terms[k]) continue;
      const Expr* l = mb.terms[k]->expr.get();
      env[rule.vars[k].id.id] = l->type->kind == TK::Bool ? Value::boolean(l->lit != 0) : Value::number(l->lit);
    }
    return denote(rule.cond, env).b;
  }
};

}  // namespace

std::optional<RootMatch> naive_match_root(const RuleSet& rs, const ExprP& e) {
  for (size_t i = 0; i < rs.rules.size(); ++i) {
    NaiveMatcher m(rs.rules[i]);
    if (m.go(rs.rules[i].lhs_expr, e) && m.condition()) return RootMatch{static_cast<int>(i), std::move(m.mb)};
  }
  return std::nullopt;
}

ExprP subst_types(const ExprP& e, const TypeSubst& s) {
  auto t = [&](Type x) { return x->has_tvar ? subst(x, s) : x; };
  switch (e->kind) {
    case EK::Var: return mk_var(e->binder, t(e->type));
    case EK::Literal: return mk_lit(t(e->type), e->lit);
    case EK::IdentRef: return mk_ident(idents::subst(e->ident, s), e->eager);
    case EK::Abs: return mk_abs(e->binder, t(e->type->a), subst_types(e->a, s));
    case EK::App: return mk_app(subst_types(e->a, s), subst_types(e->b, s));
    case EK::LetIn: return mk_let(e->binder, subst_types(e->a, s), subst_types(e->b, s));
  }
  return e;
}

// ---- rewriting --------------------------------------------------------------

namespace {

bool is_ground(const ExprP& e) {
  if (e->kind == EK::Literal) return true;
  const Expr* h = spine_head(e.get());
  if (h->kind != EK::IdentRef || h->ident->fam->kind != IdentKind::Constructor) return false;
  std::vector<ExprP> args = spine_args(e);
  if (args.size() != h->ident->params.size()) return false;
  for (const ExprP& a : args)
    if (!is_ground(a)) return false;
  return true;
}

const IdentFamily* ctor(const ExprP& e, std::vector<ExprP>& args) {
  const Expr* h = spine_head(e.get());
  if (h->kind != EK::IdentRef || h->ident->fam->kind != IdentKind::Constructor) return nullptr;
  args = spine_args(e);
  return args.size() == h->ident->params.size() ? h->ident->fam : nullptr;
}

ExprP apps(ExprP f, std::initializer_list<ExprP> xs) {
  for (const ExprP& x : xs) f = mk_app(f, x);
  return f;
}

// One iota step of an eliminator whose scrutinee is a constructor or literal.
std::optional<ExprP> iota(const Ident* id, const ExprP& head, const std::vector<ExprP>& a) {
  const std::string& n = id->fam->name;
  std::vector<ExprP> c;
  if (n == "list_rect" || n == "list_case") {
    const IdentFamily* f = ctor(a[2], c);
    if (f == idents::nil()) return a[0];
    if (f != idents::cons()) return std::nullopt;
    if (n == "list_case") return apps(a[1], {c[0], c[1]});
    return apps(a[1], {c[0], c[1], apps(head, {a[0], a[1], c[1]})});
  }
  if (n == "nth_default") {
    if (a[2]->kind != EK::Literal) return std::nullopt;
    const IdentFamily* f = ctor(a[1], c);
    if (f == idents::nil()) return a[0];
    if (f != idents::cons()) return std::nullopt;
    if (a[2]->lit == 0) return c[0];
    return apps(head, {a[0], c[1], mk_nat(a[2]->lit - 1)});
  }
  if (n == "nat_rect") {
    if (a[2]->kind != EK::Literal) return std::nullopt;
    if (a[2]->lit == 0) return a[0];
    ExprP k = mk_nat(a[2]->lit - 1);
    return apps(a[1], {k, apps(head, {a[0], a[1], k})});
  }
  if (n == "bool_rect") {
    if (a[2]->kind != EK::Literal) return std::nullopt;
    return a[2]->lit != 0 ? a[0] : a[1];
  }
  if (n == "prod_rect" || n == "fst" || n == "snd") {
    const ExprP& s = n == "prod_rect" ? a[1] : a[0];
    if (ctor(s, c) != idents::pair()) return std::nullopt;
    if (n == "fst") return c[0];
    if (n == "snd") return c[1];
    return apps(a[0], {c[0], c[1]});
  }
  if (n == "option_rect") {
    const IdentFamily* f = ctor(a[2], c);
    if (f == idents::none()) return a[1];
    if (f == idents::some()) return apps(a[0], {c[0]});
  }
  return std::nullopt;
}

struct Stepper {
  const RuleSet& rs;

  std::optional<ExprP> root(const ExprP& e) {
    if (e->kind == EK::LetIn) return substitute(e->b, e->binder, e->a);
    if (e->kind == EK::App && e->a->kind == EK::Abs) return substitute(e->a->a, e->a->binder, e->b);
    const Expr* h = spine_head(e.get());
    if (h->kind != EK::IdentRef) return std::nullopt;
    if (auto m = naive_match_root(rs, e)) {
      const RewriteRule& r = rs.rules[m->rule];
      ExprP out = subst_types(r.rhs, m->bindings.types);
      for (size_t k = 0; k < r.vars.size(); ++k)
        if (m->bindings.terms[k]) out = substitute(out, r.vars[k].id, m->bindings.terms[k]->to_expr());
      return freshen(out);
    }
    const Ident* id = h->ident;
    std::vector<ExprP> args = spine_args(e);
    size_t k = id->fam->sem_arity;
    if (args.size() < k) return std::nullopt;
    if (id->fam->kind == IdentKind::Eliminator) {
      ExprP head = mk_ident(id);
      if (auto r = iota(id, head, args)) {
        ExprP out = *r;
        for (size_t i = k; i < args.size(); ++i) out = mk_app(out, args[i]);
        return out;
      }
      return std::nullopt;
    }
    if (id->fam == idents::succ() && args[0]->kind == EK::Literal) return mk_nat(args[0]->lit + 1);
    if (rs.delta && id->fam->delta && id->fam->sem && args.size() == k && is_base(id->result)) {
      for (const ExprP& a : args)
        if (!is_ground(a)) return std::nullopt;
      return value_to_expr(denote(e), id->result);
    }
    return std::nullopt;
  }

  std::optional<ExprP> step(const ExprP& e) {
    if (auto r = root(e)) return r;
    switch (e->kind) {
      case EK::App:
        if (auto f = step(e->a)) return mk_app(*f, e->b);
        if (auto x = step(e->b)) return mk_app(e->a, *x);
        return std::nullopt;
      case EK::Abs:
        if (auto b = step(e->a)) return mk_abs(e->binder, e->type->a, *b);
        return std::nullopt;
      default: return std::nullopt;
    }
  }
};

}  // namespace

NaiveResult naive_rewrite(const RuleSet& rs, const ExprP& e, size_t fuel) {
  Stepper s{rs};
  NaiveResult r{e, false, 0};
  while (true) {
    auto next = s.step(r.expr);
    if (!next) {
      r.converged = true;
      return r;
    }
    if (r.steps == fuel) return r;
    r.expr = *next;
    ++r.steps;
  }
}

Value full_eval(const ExprP& e) { return denote(e, {}); }

// ---- random terms -----------------------------------------------------------

Int random_literal(std::mt19937_64& rng, bool nat) {
  std::uniform_int_distribution<int> pick(0, 9);
  int k = pick(rng);
  if (k == 0) return 0;
  if (k == 1) return 1;
  if (k == 2) return pow2(64) - 1;
  if (k == 3) return pow2(64) + 1;
  std::uniform_int_distribution<int> small(nat ? 0 : -256, 256);
  return small(rng);
}

Value random_value(std::mt19937_64& rng, Type t) {
  switch (t->kind) {
    case TK::Int: return Value::number(random_literal(rng, false));
    case TK::Nat: return Value::number(random_literal(rng, true));
    case TK::Bool: return Value::boolean(rng() & 1);
    case TK::Unit: return Value::unit();
    case TK::Prod: return Value::pair(random_value(rng, t->a), random_value(rng, t->b));
    case TK::Option: return rng() & 1 ? Value::some(random_value(rng, t->a)) : Value::none();
    case TK::List: {
      std::vector<Value> items(rng() % 5);
      for (Value& v : items) v = random_value(rng, t->a);
      return Value::list(items);
    }
    default: throw std::invalid_argument("random_value: unsupported type " + show(t));
  }
}

Value apply_denotation(const ExprP& closed, const std::vector<Value>& args) {
  Value f = denote(closed);
  for (const Value& a : args) f = f.apply(a);
  return f;
}

namespace {

struct Gen {
  std::mt19937_64& rng;
  int budget;
  std::vector<std::pair<BinderId, Type>> ctx;

  int roll(int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); }

  const Ident* inst(const std::string& name, std::vector<Type> targs) {
    return idents::instantiate(idents::get(name), std::move(targs));
  }
  ExprP call(const std::string& name, std::vector<Type> targs, std::vector<ExprP> args) {
    budget -= 1;
    return mk_apps(mk_ident(inst(name, std::move(targs))), args);
  }

  Type scalar() {
    switch (roll(3)) {
      case 0: return ty::Int();
      case 1: return ty::Nat();
      default: return ty::Bool();
    }
  }
  Type num() { return roll(2) ? ty::Int() : ty::Nat(); }
  Type any_base() {
    switch (roll(5)) {
      case 0: return ty::list(num());
      case 1: return ty::prod(ty::Int(), ty::Int());
      default: return scalar();
    }
  }

  ExprP small_nat(int hi) { return mk_nat(roll(hi + 1)); }

  ExprP literal(Type t) {
    --budget;
    if (t->kind == TK::Bool) return mk_bool(rng() & 1);
    return mk_num(t, random_literal(rng, t->kind == TK::Nat));
  }

  std::optional<ExprP> var_of(Type t) {
    std::vector<const std::pair<BinderId, Type>*> c;
    for (const auto& p : ctx)
      if (p.second == t) c.push_back(&p);
    if (c.empty()) return std::nullopt;
    --budget;
    const auto* p = c[roll(static_cast<int>(c.size()))];
    return mk_var(p->first, p->second);
  }

  BinderId binder(const char* base) { return fresh_binder(intern_name(base)); }

  ExprP lambda(Type t, const std::function<ExprP()>& body, const char* name = "x") {
    BinderId x = binder(name);
    ctx.emplace_back(x, t->a);
    ExprP b = body();
    ctx.pop_back();
    --budget;
    return mk_abs(x, t->a, b);
  }

  // A function of the given arrow type whose body is generated at its result.
  ExprP fun(Type t, int depth) {
    if (is_base(t->b)) return lambda(t, [&] { return gen(t->b, depth + 1); });
    return lambda(t, [&] { return fun(t->b, depth); });
  }

  ExprP leaf(Type t) {
    if (roll(2))
      if (auto v = var_of(t)) return *v;
    switch (t->kind) {
      case TK::Int:
      case TK::Nat:
      case TK::Bool: return literal(t);
      case TK::List:
        if (roll(2)) return call("nil", {t->a}, {});
        return call("cons", {t->a}, {leaf(t->a), call("nil", {t->a}, {})});
      case TK::Prod: return call("pair", {t->a, t->b}, {leaf(t->a), leaf(t->b)});
      case TK::Arrow: return lambda(t, [&] { return leaf(t->b); });
      default: return mk_unit();
    }
  }

  ExprP let_in(Type t, int depth) {
    Type u = any_base();
    ExprP bound = gen(u, depth + 1);
    BinderId x = binder("y");
    ctx.emplace_back(x, u);
    ExprP body = gen(t, depth + 1);
    ctx.pop_back();
    --budget;
    return mk_let(x, bound, body);
  }

  ExprP beta(Type t, int depth) {
    Type u = any_base();
    ExprP arg = gen(u, depth + 1);
    ExprP f = lambda(ty::arrow(u, t), [&] { return gen(t, depth + 1); }, "z");
    --budget;
    return mk_app(f, arg);
  }

  ExprP gen(Type t, int depth) {
    if (budget <= 0 || depth > 5) return leaf(t);
    int choice = roll(12);
    if (choice == 0) return let_in(t, depth);
    if (choice == 1) return beta(t, depth);
    if (choice == 2) return leaf(t);
    if (choice == 3) {
      Type e = num();
      return call("fold_left", {t, e},
                  {fun(ty::arrows({t, e}, t), depth), gen(ty::list(e), depth + 1), gen(t, depth + 1)});
    }
    if (choice == 4) {
      Type e = num();
      return call("fold_right", {t, e},
                  {fun(ty::arrows({e, t}, t), depth), gen(t, depth + 1), gen(ty::list(e), depth + 1)});
    }
    if (choice == 5)
      return call("bool_rect", {t}, {gen(t, depth + 1), gen(t, depth + 1), gen(ty::Bool(), depth + 1)});
    if (choice == 6)
      return call("nat_rect", {t}, {gen(t, depth + 1), fun(ty::arrows({ty::Nat(), t}, t), depth), small_nat(3)});
    if (choice == 7) {
      Type e = num();
      return call("list_rect", {e, t},
                  {gen(t, depth + 1), fun(ty::arrows({e, ty::list(e), t}, t), depth), gen(ty::list(e), depth + 1)});
    }
    switch (t->kind) {
      case TK::Int:
      case TK::Nat: {
        int k = roll(10);
        if (k < 6) {
          static const char* ops[] = {"add", "add", "mul", "sub", "div", "modulo", "min", "max", "add", "mul"};
          return call(ops[roll(10)], {t}, {gen(t, depth + 1), gen(t, depth + 1)});
        }
        if (k == 6 && t->kind == TK::Nat) return call("length", {ty::Int()}, {gen(ty::list(ty::Int()), depth + 1)});
        if (k == 7 && t->kind == TK::Int)
          return call("fst", {ty::Int(), ty::Int()}, {gen(ty::prod(ty::Int(), ty::Int()), depth + 1)});
        if (k == 8) return call("nth_default", {t}, {gen(t, depth + 1), gen(ty::list(t), depth + 1), small_nat(3)});
        return call("add", {t}, {gen(t, depth + 1), literal(t)});
      }
      case TK::Bool: {
        int k = roll(4);
        if (k == 0) return call("andb", {}, {gen(t, depth + 1), gen(t, depth + 1)});
        if (k == 1) return call("negb", {}, {gen(t, depth + 1)});
        Type n = num();
        static const char* cmps[] = {"eqb", "ltb", "leb"};
        return call(cmps[roll(3)], {n}, {gen(n, depth + 1), gen(n, depth + 1)});
      }
      case TK::List: {
        Type e = t->a;
        int k = roll(7);
        if (k == 0) {
          Type u = num();
          return call("map", {u, e}, {fun(ty::arrow(u, e), depth), gen(ty::list(u), depth + 1)});
        }
        if (k == 1) return call("app", {e}, {gen(t, depth + 1), gen(t, depth + 1)});
        if (k == 2) return call("rev", {e}, {gen(t, depth + 1)});
        if (k == 3) return call("repeat", {e}, {gen(e, depth + 1), small_nat(3)});
        if (k == 4 && e->kind == TK::Nat) return call("seq", {}, {small_nat(3), small_nat(4)});
        return call("cons", {e}, {gen(e, depth + 1), gen(t, depth + 1)});
      }
      case TK::Prod: {
        if (roll(3) == 0)
          return call("snd", {ty::Int(), t},
                      {call("pair", {ty::Int(), t}, {gen(ty::Int(), depth + 1), gen(t, depth + 1)})});
        return call("pair", {t->a, t->b}, {gen(t->a, depth + 1), gen(t->b, depth + 1)});
      }
      default: return leaf(t);
    }
  }
};

}  // namespace

namespace {

RandomTerm random_term_once(std::mt19937_64& rng, const GenConfig& cfg) {
  Gen g{rng, static_cast<int>(cfg.max_nodes) / 2, {}};
  RandomTerm out;
  int k = cfg.max_inputs > 0 ? g.roll(cfg.max_inputs + 1) : 0;
  std::vector<BinderId> xs;
  static const char* names[] = {"a", "b", "c", "d", "e", "f"};
  for (int i = 0; i < k; ++i) {
    Type t = g.roll(4) == 0 ? ty::list(ty::Int()) : g.scalar();
    BinderId x = fresh_binder(intern_name(names[i % 6]));
    xs.push_back(x);
    out.inputs.push_back(t);
    g.ctx.emplace_back(x, t);
  }
  ExprP body = g.gen(g.any_base(), 0);
  for (int i = k; i-- > 0;) body = mk_abs(xs[i], out.inputs[i], body);
  out.term = body;
  return out;
}

}  // namespace

RandomTerm random_term(std::mt19937_64& rng, const GenConfig& cfg) {
  while (true) {
    RandomTerm t = random_term_once(rng, cfg);
    if (metrics(t.term).node_count <= cfg.max_nodes) return t;
  }
}

}  // namespace rw
