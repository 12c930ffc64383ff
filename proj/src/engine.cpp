#include "rw/engine.hpp"

#include "rw/eval.hpp"

#include <stdexcept>

namespace rw {

ExprP close_telescope(const Telescope& t, ExprP body) {
  for (size_t i = t.size(); i-- > 0;) body = mk_let(t[i].x, t[i].bound, body);
  return body;
}

ExprP UnderLets::to_expr() const { return close_telescope(binds, body); }

UnderLets splice(const UnderLets& u, const std::function<UnderLets(const ExprP&)>& k) {
  UnderLets r = k(u.body);
  UnderLets out;
  out.binds = u.binds;
  out.binds.insert(out.binds.end(), r.binds.begin(), r.binds.end());
  out.body = std::move(r.body);
  return out;
}

SemValue SemValue::of(ExprP e) {
  SemValue v;
  v.type = e->type;
  v.syn = std::move(e);
  return v;
}

SemValue SemValue::function(Type t, SemFn f, const std::string* hint) {
  SemValue v;
  v.type = t;
  v.fn = std::make_shared<const SemFn>(std::move(f));
  v.hint = hint;
  return v;
}

SemValue SemValue::apply(Telescope& tele, const SemValue& arg) const {
  if (!fn) throw std::logic_error("applying a non-function semantic value");
  return (*fn)(tele, arg);
}

namespace {

bool is_constructor_app(const Expr* e, const Ident*& head, size_t& nargs) {
  nargs = 0;
  const Expr* h = e;
  while (h->kind == EK::App) {
    h = h->a.get();
    ++nargs;
  }
  if (h->kind != EK::IdentRef || h->ident->fam->kind != IdentKind::Constructor) return false;
  head = h->ident;
  return nargs == head->params.size();
}

bool trivial(const Expr* e) {
  if (e->kind == EK::Literal || e->kind == EK::Var) return true;
  return e->kind == EK::IdentRef && e->ident->fam->kind == IdentKind::Constructor && e->ident->params.empty();
}

// One primitive operation on trivial operands, e.g. `c * 2`.
bool single_op(const Expr* e) {
  if (e->kind != EK::App) return false;
  while (e->kind == EK::App) {
    if (!trivial(e->b.get())) return false;
    e = e->a.get();
  }
  return e->kind == EK::IdentRef && e->ident->fam->kind == IdentKind::Primitive;
}

}  // namespace

InlineDecision inline_heuristic(const ExprP& bound) {
  if (trivial(bound.get())) return InlineDecision::Inline;
  const Ident* head = nullptr;
  size_t n = 0;
  if (bound->kind == EK::App && is_constructor_app(bound.get(), head, n)) return InlineDecision::NameElements;
  return InlineDecision::Keep;
}

std::shared_ptr<const CompiledRules> compile_rules(RuleSet rs) {
  auto cr = std::make_shared<CompiledRules>();
  cr->tree = compile_rewrites(rs);
  cr->matcher = compile_to_closure(cr->tree);
  cr->rules = std::move(rs);
  return cr;
}

namespace {

struct EnvNode {
  uint64_t id;
  SemValue v;
  std::shared_ptr<const EnvNode> next;
};
using Env = std::shared_ptr<const EnvNode>;

Env push(const Env& env, uint64_t id, SemValue v) {
  return std::make_shared<const EnvNode>(EnvNode{id, std::move(v), env});
}

struct PathNode {
  int idx;
  std::shared_ptr<const PathNode> parent;
};
using Path = std::shared_ptr<const PathNode>;

std::string path_string(const Path& p) {
  std::vector<int> idx;
  for (const PathNode* n = p.get(); n; n = n->parent.get()) idx.push_back(n->idx);
  std::string s;
  for (size_t i = idx.size(); i-- > 0;) s += (s.empty() ? "" : ".") + std::to_string(idx[i]);
  return s;
}

// Type substitution of a rule template; null in ordinary rewriting.
using Tmpl = std::shared_ptr<const TypeSubst>;

bool is_ground(const Expr* e) {
  while (true) {
    if (e->kind == EK::Literal) return true;
    const Ident* head = nullptr;
    size_t n = 0;
    if (e->kind == EK::IdentRef) return trivial(e);
    if (e->kind != EK::App || !is_constructor_app(e, head, n)) return false;
    // Walk all arguments but the last recursively; continue with the last.
    const Expr* s = e->a.get();
    while (s->kind == EK::App) {
      if (!is_ground(s->b.get())) return false;
      s = s->a.get();
    }
    e = e->b.get();
  }
}

bool pair_parts(const ExprP& e, ExprP& a, ExprP& b) {
  if (e->kind != EK::App || e->a->kind != EK::App) return false;
  const Expr* h = e->a->a.get();
  if (h->kind != EK::IdentRef || h->ident->fam != idents::pair()) return false;
  a = e->a->b;
  b = e->b;
  return true;
}

bool cons_parts(const ExprP& e, ExprP& x, ExprP& xs) {
  if (e->kind != EK::App || e->a->kind != EK::App) return false;
  const Expr* h = e->a->a.get();
  if (h->kind != EK::IdentRef || h->ident->fam != idents::cons()) return false;
  x = e->a->b;
  xs = e->b;
  return true;
}

bool is_nil(const ExprP& e) { return e->kind == EK::IdentRef && e->ident->fam == idents::nil(); }

constexpr long kMaxNatUnroll = 10'000'000;

}  // namespace

struct Engine::Impl {
  std::shared_ptr<const CompiledRules> cr;
  EngineOptions opts;
  bool delta = false;
  Stats stats;
  bool again = false;

  Impl(std::shared_ptr<const CompiledRules> r, EngineOptions o) : cr(std::move(r)), opts(std::move(o)) {
    delta = opts.delta.value_or(cr->rules.delta);
  }

  Path child(const Path& p, int i) const {
    if (!opts.trace) return nullptr;
    return std::make_shared<const PathNode>(PathNode{i, p});
  }

  // ---- reify / reflect ----------------------------------------------------

  SemValue neutral(const ExprP& e, Type t) {
    if (is_base(t)) return SemValue::of(e);
    return SemValue::function(t, [this, e, t](Telescope&, const SemValue& x) {
      return neutral(mk_app(e, reify(x, t->a)), t->b);
    });
  }

  ExprP reify(const SemValue& v, Type t) {
    if (is_base(t)) {
      if (!v.syn) throw std::logic_error("reify: function value at base type");
      return v.syn;
    }
    if (!v.fn) return v.syn;
    BinderId x = fresh_binder(v.hint);
    Telescope inner;
    SemValue r = v.apply(inner, neutral(mk_var(x, t->a), t->a));
    ExprP body = reify(r, t->b);
    return mk_abs(x, t->a, close_telescope(inner, body));
  }

  SemValue reflect(const ExprP& e, Type t, Telescope& tele) {
    if (!is_base(t)) {
      ++stats.eta_expansions;
      return SemValue::function(t, [this, e, t](Telescope& tl, const SemValue& x) {
        return reflect(mk_app(e, reify(x, t->a)), t->b, tl);
      });
    }
    const Expr* h = spine_head(e.get());
    if (h->kind != EK::IdentRef) return SemValue::of(e);
    std::vector<SemValue> args;
    for (const ExprP& a : spine_args(e)) args.push_back(is_base(a->type) ? SemValue::of(a) : reflect(a, a->type, tele));
    return head_apply(tele, h->ident, args, h->eager, nullptr, nullptr);
  }

  SemValue from_syntax(const ExprP& e) {
    if (is_base(e->type)) return SemValue::of(e);
    Telescope scratch;
    return reduce(e, nullptr, scratch, nullptr, nullptr);
  }

  // ---- let handling ---------------------------------------------------------

  ExprP bind_let(const ExprP& bound, const std::string* hint, Telescope& tele) {
    InlineDecision d = opts.inline_hook ? opts.inline_hook(bound) : inline_heuristic(bound);
    switch (d) {
      case InlineDecision::Inline: return bound;
      case InlineDecision::Keep: return keep(bound, hint, tele);
      case InlineDecision::NameElements: return name_elements(bound, hint, tele);
    }
    return bound;
  }

  ExprP keep(const ExprP& bound, const std::string* hint, Telescope& tele) {
    BinderId x = fresh_binder(hint);
    tele.push_back(LetBinding{x, bound->type, bound});
    return mk_var(x, bound->type);
  }

  ExprP name_elements(const ExprP& e, const std::string* hint, Telescope& tele) {
    if (trivial(e.get()) || single_op(e.get()) || !is_base(e->type)) return e;
    const Ident* head = nullptr;
    size_t n = 0;
    if (e->kind == EK::App && is_constructor_app(e.get(), head, n)) {
      std::vector<ExprP> args = spine_args(e);
      bool changed = false;
      for (ExprP& a : args) {
        ExprP na = name_elements(a, hint, tele);
        changed |= na != a;
        a = na;
      }
      return changed ? mk_apps(mk_ident(head), args) : e;
    }
    return keep(e, hint, tele);
  }

  // ---- evaluation -----------------------------------------------------------

  SemValue reduce(ExprP e, Env env, Telescope& tele, const Tmpl& tmpl, Path path) {
    while (true) {
      switch (e->kind) {
        case EK::Literal:
          if (tmpl && e->type->has_tvar) return SemValue::of(mk_lit(subst(e->type, *tmpl), e->lit));
          return SemValue::of(e);
        case EK::Var: {
          for (const EnvNode* n = env.get(); n; n = n->next.get())
            if (n->id == e->binder.id) return n->v;
          return neutral(e, e->type);
        }
        case EK::Abs: {
          Type t = tmpl && e->type->has_tvar ? subst(e->type, *tmpl) : e->type;
          ExprP body = e->a;
          uint64_t id = e->binder.id;
          Path bp = child(path, 0);
          return SemValue::function(
              t,
              [this, body, id, env, tmpl, bp](Telescope& tl, const SemValue& x) {
                return reduce(body, push(env, id, x), tl, tmpl, bp);
              },
              e->binder.hint);
        }
        case EK::App: {
          SemValue f = reduce(e->a, env, tele, tmpl, child(path, 0));
          SemValue x = reduce(e->b, env, tele, tmpl, child(path, 1));
          return f.apply(tele, x);
        }
        case EK::LetIn: {
          SemValue v = reduce(e->a, env, tele, tmpl, child(path, 0));
          if (!v.is_fn()) v = SemValue::of(bind_let(v.syn, e->binder.hint, tele));
          env = push(env, e->binder.id, std::move(v));
          path = child(path, 1);
          e = e->b;
          continue;
        }
        case EK::IdentRef: {
          const Ident* id = tmpl ? idents::subst(e->ident, *tmpl) : e->ident;
          if (id->params.empty()) return head_apply(tele, id, {}, e->eager, tmpl, path);
          ++stats.eta_expansions;
          return curry(id, e->eager, tmpl, path, {});
        }
      }
    }
  }

  SemValue curry(const Ident* id, bool eager, const Tmpl& tmpl, const Path& path, std::vector<SemValue> acc) {
    Type t = id->type;
    for (size_t i = 0; i < acc.size(); ++i) t = t->b;
    return SemValue::function(t, [this, id, eager, tmpl, path, acc](Telescope& tl, const SemValue& x) {
      std::vector<SemValue> next = acc;
      next.push_back(x);
      if (next.size() == id->params.size()) return head_apply(tl, id, next, eager, tmpl, path);
      return curry(id, eager, tmpl, path, std::move(next));
    });
  }

  SemValue apply_all(Telescope& tele, SemValue f, std::initializer_list<SemValue> args) {
    for (const SemValue& a : args) f = f.apply(tele, a);
    return f;
  }

  SemValue head_apply(Telescope& tele, const Ident* id, const std::vector<SemValue>& args, bool eager,
                      const Tmpl& tmpl, const Path& path) {
    const IdentFamily* fam = id->fam;
    if (fam->kind == IdentKind::Eliminator && (eager || (!tmpl && cr->rules.eval_rect.count(fam->rect_group))))
      if (auto r = unroll(tele, id, args)) return *r;
    if (!tmpl)
      if (auto r = try_rules(tele, id, args, path)) return *r;
    if (auto r = fold(id, args, tmpl != nullptr)) return *r;
    return residual(id, args);
  }

  SemValue residual(const Ident* id, const std::vector<SemValue>& args) {
    ExprP e = mk_ident(id);
    for (size_t i = 0; i < args.size(); ++i) e = mk_app(e, args[i].is_fn() ? reify(args[i], id->params[i]) : args[i].syn);
    return SemValue::of(e);
  }

  std::optional<SemValue> fold(const Ident* id, const std::vector<SemValue>& args, bool in_template) {
    const IdentFamily* fam = id->fam;
    if (fam == idents::succ() && args[0].syn->kind == EK::Literal) return SemValue::of(mk_nat(args[0].syn->lit + 1));
    if ((in_template || delta) && fam->delta && fam->sem && args.size() == fam->sem_arity && is_base(id->result)) {
      bool ground = true;
      for (const SemValue& a : args) ground = ground && !a.is_fn() && is_ground(a.syn.get());
      if (ground) {
        std::vector<ExprP> syn;
        for (const SemValue& a : args) syn.push_back(a.syn);
        Value v = denote(mk_apps(mk_ident(id), syn));
        if (!in_template) ++stats.delta_folds;
        return SemValue::of(value_to_expr(v, id->result));
      }
    }
    if (fam == idents::clip_dyn() && args[0].syn->kind == EK::Literal && args[1].syn->kind == EK::Literal)
      return SemValue::of(mk_app(mk_ident(idents::clip(args[0].syn->lit, args[1].syn->lit)), args[2].syn));
    return std::nullopt;
  }

  // ---- rules ----------------------------------------------------------------

  std::optional<SemValue> try_rules(Telescope& tele, const Ident* id, const std::vector<SemValue>& args,
                                    const Path& path) {
    const auto& rules = cr->rules.rules;
    if (rules.empty()) return std::nullopt;
    size_t k = id->fam->sem_arity;
    if (args.size() < k) return std::nullopt;
    std::vector<RawTerm> raw(k);
    for (size_t i = 0; i < k; ++i)
      raw[i] = args[i].is_fn() ? RawTerm::opaque(static_cast<int>(i), id->params[i]) : RawTerm::of(args[i].syn);
    RawTerm root = RawTerm::spine(id, raw.data(), k);
    std::optional<SemValue> result;
    TryRule attempt = [&](int r) {
      auto mb = match_rule(rules[r], root);
      if (!mb || !check_condition(rules[r], *mb)) return false;
      result = instantiate(tele, r, *mb, args, path);
      return true;
    };
    std::optional<int> hit = opts.compiled_matcher ? cr->matcher({root}, attempt)
                                                   : eval_decision_tree(*cr->tree, {root}, attempt);
    if (!hit) return std::nullopt;
    ++stats.rule_firings;
    if (opts.trace) stats.trace.push_back(TraceEntry{rules[*hit].name, path_string(path)});
    if (rules[*hit].again) again = true;
    SemValue v = *result;
    for (size_t i = k; i < args.size(); ++i) v = v.apply(tele, args[i]);
    return v;
  }

  SemValue instantiate(Telescope& tele, int r, const MatchBindings& mb, const std::vector<SemValue>& args,
                       const Path& path) {
    const RewriteRule& rule = cr->rules.rules[r];
    auto ts = std::make_shared<const TypeSubst>(mb.types);
    Env env;
    for (size_t j = 0; j < rule.vars.size(); ++j) {
      if (!mb.terms[j]) continue;
      const RawTerm& t = *mb.terms[j];
      SemValue v = t.kind == RawTerm::Opaque ? args.at(t.slot) : from_syntax(t.to_expr());
      env = push(env, rule.vars[j].id.id, std::move(v));
    }
    return reduce(rule.rhs, env, tele, ts, path);
  }

  // ---- eliminators ------------------------------------------------------------

  std::optional<SemValue> unroll(Telescope& tele, const Ident* id, const std::vector<SemValue>& args) {
    const IdentFamily* fam = id->fam;
    size_t k = fam->sem_arity;
    if (args.size() < k) return std::nullopt;
    const SemValue& sc = args[fam->scrutinee];
    if (sc.is_fn()) return std::nullopt;
    const ExprP& s = sc.syn;
    const std::string& name = fam->name;
    std::optional<SemValue> r;
    if (name == "list_rect") {
      std::vector<std::pair<ExprP, ExprP>> cells;
      ExprP cur = s, x, xs;
      while (cons_parts(cur, x, xs)) {
        cells.emplace_back(x, xs);
        cur = xs;
      }
      if (!is_nil(cur)) return std::nullopt;
      SemValue acc = args[0];
      for (size_t i = cells.size(); i-- > 0;)
        acc = apply_all(tele, args[1], {from_syntax(cells[i].first), SemValue::of(cells[i].second), acc});
      r = acc;
    } else if (name == "list_case") {
      ExprP x, xs;
      if (is_nil(s)) r = args[0];
      else if (cons_parts(s, x, xs)) r = apply_all(tele, args[1], {from_syntax(x), SemValue::of(xs)});
    } else if (name == "nth_default") {
      const ExprP& ie = args[2].syn;
      if (ie->kind != EK::Literal) return std::nullopt;
      Int i = ie->lit;
      ExprP cur = s, x, xs;
      while (true) {
        if (is_nil(cur)) {
          r = args[0];
          break;
        }
        if (!cons_parts(cur, x, xs)) return std::nullopt;
        if (i == 0) {
          r = from_syntax(x);
          break;
        }
        --i;
        cur = xs;
      }
    } else if (name == "nat_rect") {
      if (s->kind != EK::Literal || s->lit > kMaxNatUnroll) return std::nullopt;
      long n = s->lit.convert_to<long>();
      SemValue acc = args[0];
      for (long i = 0; i < n; ++i) acc = apply_all(tele, args[1], {SemValue::of(mk_nat(i)), acc});
      r = acc;
    } else if (name == "bool_rect") {
      if (s->kind == EK::Literal) r = s->lit != 0 ? args[0] : args[1];
    } else if (name == "prod_rect" || name == "fst" || name == "snd") {
      ExprP a, b;
      if (pair_parts(s, a, b)) {
        if (name == "fst") r = from_syntax(a);
        else if (name == "snd") r = from_syntax(b);
        else r = apply_all(tele, args[0], {from_syntax(a), from_syntax(b)});
      }
    } else if (name == "option_rect") {
      const Expr* h = spine_head(s.get());
      if (h->kind == EK::IdentRef && h->ident->fam == idents::none()) r = args[1];
      else if (h->kind == EK::IdentRef && h->ident->fam == idents::some() && s->kind == EK::App)
        r = apply_all(tele, args[0], {from_syntax(s->b)});
    }
    if (!r) return std::nullopt;
    ++stats.eager_unrolls;
    for (size_t i = k; i < args.size(); ++i) r = r->apply(tele, args[i]);
    return r;
  }

  ExprP rewrite_top(const ExprP& e, std::optional<size_t> fuel) {
    size_t f = fuel ? *fuel : metrics(e).node_count + 1;
    ExprP cur = e;
    while (f > 0) {
      --f;
      again = false;
      Telescope tele;
      SemValue v = reduce(cur, nullptr, tele, nullptr, nullptr);
      cur = close_telescope(tele, reify(v, cur->type));
      ++stats.passes;
      if (!again) break;
    }
    return cur;
  }
};

Engine::Engine(std::shared_ptr<const CompiledRules> rules, EngineOptions opts)
    : impl_(std::make_unique<Impl>(std::move(rules), std::move(opts))) {}
Engine::~Engine() = default;

SemValue Engine::reflect(const ExprP& e, Type t, Telescope& tele) { return impl_->reflect(e, t, tele); }

ExprP Engine::reify(const SemValue& v, Type t) { return impl_->reify(v, t); }

SemValue Engine::reduce(const ExprP& e, const SemEnv& env, Telescope& tele) {
  Env en;
  for (const auto& [id, v] : env) en = push(en, id, v);
  return impl_->reduce(e, en, tele, nullptr, nullptr);
}

UnderLets Engine::reduce_to_lets(const ExprP& e, const SemEnv& env) {
  Telescope tele;
  SemValue v = reduce(e, env, tele);
  ExprP body = impl_->reify(v, e->type);
  return UnderLets{std::move(tele), body};
}

UnderLets Engine::rewrite_head(const ExprP& e) {
  if (!is_base(e->type)) return UnderLets::done(e);
  Telescope tele;
  SemValue v = impl_->reflect(e, e->type, tele);
  ExprP body = impl_->reify(v, e->type);
  return UnderLets{std::move(tele), body};
}

std::optional<UnderLets> Engine::rewrite_with_rule(int k, const MatchBindings& b) {
  const RewriteRule& rule = impl_->cr->rules.rules.at(k);
  if (!check_condition(rule, b)) return std::nullopt;
  Telescope tele;
  SemValue v = impl_->instantiate(tele, k, b, {}, nullptr);
  ExprP body = impl_->reify(v, subst(rule.type, b.types));
  return UnderLets{std::move(tele), body};
}

std::optional<UnderLets> Engine::eager_eval(const Ident* elim, const std::vector<SemValue>& args) {
  if (elim->fam->kind != IdentKind::Eliminator || args.size() != elim->params.size()) return std::nullopt;
  Telescope tele;
  auto r = impl_->unroll(tele, elim, args);
  if (!r) return std::nullopt;
  ExprP body = impl_->reify(*r, elim->result);
  return UnderLets{std::move(tele), body};
}

ExprP Engine::rewrite_top(const ExprP& e, std::optional<size_t> fuel) {
  ExprP out;
  run_deep([&] { out = impl_->rewrite_top(e, fuel); });
  return out;
}

const Stats& Engine::stats() const { return impl_->stats; }
void Engine::reset_stats() { impl_->stats = Stats{}; }

ExprP rewrite(const RuleSet& rs, const ExprP& e, EngineOptions opts, Stats* stats, std::optional<size_t> fuel) {
  Engine eng(compile_rules(rs), std::move(opts));
  ExprP out = eng.rewrite_top(e, fuel);
  if (stats) *stats = eng.stats();
  return out;
}

}  // namespace rw
