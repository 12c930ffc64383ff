#include "rw/expr.hpp"

#include <atomic>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace rw {

namespace {

std::atomic<uint64_t> g_next_binder{1};
// Free-variable tokens live in the upper half of the id space.
constexpr uint64_t kFreeBase = uint64_t(1) << 62;

std::mutex g_name_mu;
std::unordered_map<std::string, std::unique_ptr<std::string>>& names() {
  static auto* m = new std::unordered_map<std::string, std::unique_ptr<std::string>>();
  return *m;
}
std::unordered_map<std::string, uint64_t>& free_ids() {
  static auto* m = new std::unordered_map<std::string, uint64_t>();
  return *m;
}

}  // namespace

const std::string* intern_name(const std::string& s) {
  std::lock_guard<std::mutex> lk(g_name_mu);
  auto& m = names();
  auto it = m.find(s);
  if (it != m.end()) return it->second.get();
  auto p = std::make_unique<std::string>(s);
  const std::string* raw = p.get();
  m.emplace(s, std::move(p));
  return raw;
}

BinderId fresh_binder(const std::string* hint) {
  return BinderId{g_next_binder.fetch_add(1, std::memory_order_relaxed), hint};
}

BinderId fresh_like(const BinderId& b) { return fresh_binder(b.hint); }

BinderId free_var(const std::string& name) {
  const std::string* h = intern_name(name);
  std::lock_guard<std::mutex> lk(g_name_mu);
  auto& m = free_ids();
  auto it = m.find(name);
  if (it != m.end()) return BinderId{it->second, h};
  uint64_t id = kFreeBase + m.size();
  m.emplace(name, id);
  return BinderId{id, h};
}

bool is_free_var_token(const BinderId& b) { return b.id >= kFreeBase; }

static std::shared_ptr<Expr> node(EK k, Type t) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->type = t;
  return e;
}

ExprP mk_var(BinderId x, Type t) {
  auto e = node(EK::Var, t);
  e->binder = x;
  return e;
}

ExprP mk_abs(BinderId x, Type binder_type, ExprP body) {
  auto e = node(EK::Abs, ty::arrow(binder_type, body->type));
  e->binder = x;
  e->a = std::move(body);
  return e;
}

ExprP mk_app(ExprP f, ExprP arg) {
  if (f->type->kind != TK::Arrow) throw std::logic_error("mk_app: function has non-arrow type " + show(f->type));
  auto e = node(EK::App, f->type->b);
  e->a = std::move(f);
  e->b = std::move(arg);
  return e;
}

ExprP mk_apps(ExprP f, const std::vector<ExprP>& args) {
  for (const auto& a : args) f = mk_app(std::move(f), a);
  return f;
}

ExprP mk_let(BinderId x, ExprP bound, ExprP body) {
  auto e = node(EK::LetIn, body->type);
  e->binder = x;
  e->a = std::move(bound);
  e->b = std::move(body);
  return e;
}

ExprP mk_ident(const Ident* id, bool eager) {
  if (!eager) return id->ref;
  auto e = node(EK::IdentRef, id->type);
  e->ident = id;
  e->eager = true;
  return e;
}

ExprP mk_lit(Type t, const Int& v) {
  if (t->kind == TK::Nat && v < 0) throw std::invalid_argument("negative Nat literal");
  auto e = node(EK::Literal, t);
  e->lit = v;
  return e;
}

ExprP mk_num(Type t, Int v) { return mk_lit(t, v); }
ExprP mk_int(Int v) { return mk_lit(ty::Int(), v); }
ExprP mk_nat(Int v) { return mk_lit(ty::Nat(), v); }
ExprP mk_bool(bool v) {
  static ExprP t = mk_lit(ty::Bool(), 1), f = mk_lit(ty::Bool(), 0);
  return v ? t : f;
}
ExprP mk_unit() {
  static ExprP u = mk_lit(ty::Unit(), 0);
  return u;
}

const Expr* spine_head(const Expr* e) {
  while (e->kind == EK::App) e = e->a.get();
  return e;
}

std::vector<ExprP> spine_args(const ExprP& e) {
  std::vector<ExprP> out;
  const Expr* cur = e.get();
  while (cur->kind == EK::App) {
    out.push_back(cur->b);
    cur = cur->a.get();
  }
  return {out.rbegin(), out.rend()};
}

const Ident* head_ident(const Expr* e) {
  const Expr* h = spine_head(e);
  return h->kind == EK::IdentRef ? h->ident : nullptr;
}

bool list_spine(const ExprP& e, std::vector<ExprP>& elems) {
  elems.clear();
  const Expr* cur = e.get();
  while (true) {
    if (cur->kind == EK::IdentRef && cur->ident->fam == idents::nil()) return true;
    if (cur->kind == EK::App && cur->a->kind == EK::App && cur->a->a->kind == EK::IdentRef &&
        cur->a->a->ident->fam == idents::cons()) {
      elems.push_back(cur->a->b);
      cur = cur->b.get();
      continue;
    }
    return false;
  }
}

ExprP mk_list(Type elem, const std::vector<ExprP>& elems) {
  const Ident* nil = idents::instantiate(idents::nil(), {elem});
  const Ident* cons = idents::instantiate(idents::cons(), {elem});
  ExprP r = mk_ident(nil);
  for (size_t i = elems.size(); i-- > 0;) r = mk_apps(mk_ident(cons), {elems[i], r});
  return r;
}

ExprP mk_pair(ExprP a, ExprP b) {
  const Ident* p = idents::instantiate(idents::pair(), {a->type, b->type});
  return mk_apps(mk_ident(p), {std::move(a), std::move(b)});
}

Metrics metrics(const ExprP& root) {
  Metrics m;
  std::vector<std::pair<const Expr*, size_t>> stack{{root.get(), 0}};
  while (!stack.empty()) {
    auto [e, depth] = stack.back();
    stack.pop_back();
    ++m.node_count;
    if (depth > m.max_binder_depth) m.max_binder_depth = depth;
    switch (e->kind) {
      case EK::Abs:
        stack.push_back({e->a.get(), depth + 1});
        if (depth + 1 > m.max_binder_depth) m.max_binder_depth = depth + 1;
        break;
      case EK::LetIn:
        ++m.let_count;
        if (depth + 1 > m.max_binder_depth) m.max_binder_depth = depth + 1;
        stack.push_back({e->a.get(), depth});
        stack.push_back({e->b.get(), depth + 1});
        break;
      case EK::App: {
        // An application spine headed by an identifier counts as one node.
        const Expr* h = spine_head(e);
        if (h->kind == EK::IdentRef) {
          for (const Expr* s = e; s->kind == EK::App; s = s->a.get()) stack.push_back({s->b.get(), depth});
        } else {
          stack.push_back({e->a.get(), depth});
          stack.push_back({e->b.get(), depth});
        }
        break;
      }
      default: break;
    }
  }
  return m;
}

namespace {

struct AlphaEq {
  std::unordered_map<uint64_t, uint64_t> l2r, r2l;

  bool bind_eq(uint64_t x, uint64_t y, const Expr* bx, const Expr* by, bool (AlphaEq::*k)(const Expr*, const Expr*)) {
    auto ol = l2r.find(x);
    auto orr = r2l.find(y);
    bool hadl = ol != l2r.end(), hadr = orr != r2l.end();
    uint64_t savel = hadl ? ol->second : 0, saver = hadr ? orr->second : 0;
    l2r[x] = y;
    r2l[y] = x;
    bool ok = (this->*k)(bx, by);
    if (hadl) l2r[x] = savel; else l2r.erase(x);
    if (hadr) r2l[y] = saver; else r2l.erase(y);
    return ok;
  }

  bool eq(const Expr* x, const Expr* y) {
    while (true) {
      if (x == y && l2r.empty()) return true;
      if (x->kind != y->kind || x->type != y->type) return false;
      switch (x->kind) {
        case EK::Var: {
          auto it = l2r.find(x->binder.id);
          auto jt = r2l.find(y->binder.id);
          if (it == l2r.end() && jt == r2l.end()) return x->binder.id == y->binder.id;
          return it != l2r.end() && it->second == y->binder.id;
        }
        case EK::Literal: return x->lit == y->lit;
        case EK::IdentRef: return x->ident == y->ident;
        case EK::App:
          if (!eq(x->a.get(), y->a.get())) return false;
          x = x->b.get();
          y = y->b.get();
          continue;
        case EK::Abs: return bind_eq(x->binder.id, y->binder.id, x->a.get(), y->a.get(), &AlphaEq::eq);
        case EK::LetIn:
          if (!eq(x->a.get(), y->a.get())) return false;
          return bind_eq(x->binder.id, y->binder.id, x->b.get(), y->b.get(), &AlphaEq::eq);
      }
      return false;
    }
  }
};

void collect_free(const Expr* e, std::unordered_set<uint64_t>& bound, std::unordered_set<uint64_t>& seen,
                  std::vector<BinderId>& out) {
  switch (e->kind) {
    case EK::Var:
      if (!bound.count(e->binder.id) && seen.insert(e->binder.id).second) out.push_back(e->binder);
      return;
    case EK::Abs: {
      bool fresh = bound.insert(e->binder.id).second;
      collect_free(e->a.get(), bound, seen, out);
      if (fresh) bound.erase(e->binder.id);
      return;
    }
    case EK::LetIn: {
      collect_free(e->a.get(), bound, seen, out);
      bool fresh = bound.insert(e->binder.id).second;
      collect_free(e->b.get(), bound, seen, out);
      if (fresh) bound.erase(e->binder.id);
      return;
    }
    case EK::App:
      collect_free(e->a.get(), bound, seen, out);
      collect_free(e->b.get(), bound, seen, out);
      return;
    default: return;
  }
}

ExprP rename(const ExprP& e, std::unordered_map<uint64_t, BinderId>& ren) {
  switch (e->kind) {
    case EK::Var: {
      auto it = ren.find(e->binder.id);
      return it == ren.end() ? e : mk_var(it->second, e->type);
    }
    case EK::Abs: {
      BinderId nb = fresh_like(e->binder);
      auto old = ren.find(e->binder.id);
      std::optional<BinderId> saved;
      if (old != ren.end()) saved = old->second;
      ren[e->binder.id] = nb;
      ExprP body = rename(e->a, ren);
      if (saved) ren[e->binder.id] = *saved; else ren.erase(e->binder.id);
      return mk_abs(nb, e->type->a, body);
    }
    case EK::LetIn: {
      ExprP bound = rename(e->a, ren);
      BinderId nb = fresh_like(e->binder);
      auto old = ren.find(e->binder.id);
      std::optional<BinderId> saved;
      if (old != ren.end()) saved = old->second;
      ren[e->binder.id] = nb;
      ExprP body = rename(e->b, ren);
      if (saved) ren[e->binder.id] = *saved; else ren.erase(e->binder.id);
      return mk_let(nb, bound, body);
    }
    case EK::App: {
      ExprP f = rename(e->a, ren);
      ExprP a = rename(e->b, ren);
      if (f == e->a && a == e->b) return e;
      return mk_app(f, a);
    }
    default: return e;
  }
}

struct Subst {
  uint64_t x;
  const ExprP& v;
  std::unordered_set<uint64_t> fv;

  // Renames binder `b` of a subtree when it would capture a free variable of v.
  ExprP under(const BinderId& b, const ExprP& body, BinderId& out_b) {
    out_b = b;
    if (!fv.count(b.id)) return go(body);
    out_b = fresh_like(b);
    std::unordered_map<uint64_t, BinderId> ren{{b.id, out_b}};
    return go(rename(body, ren));
  }

  ExprP go(const ExprP& e) {
    switch (e->kind) {
      case EK::Var: return e->binder.id == x ? freshen(v) : e;
      case EK::Abs: {
        if (e->binder.id == x) return e;
        BinderId nb;
        ExprP body = under(e->binder, e->a, nb);
        return (body == e->a && nb == e->binder) ? e : mk_abs(nb, e->type->a, body);
      }
      case EK::LetIn: {
        ExprP bound = go(e->a);
        BinderId nb = e->binder;
        ExprP body = e->binder.id == x ? e->b : under(e->binder, e->b, nb);
        if (bound == e->a && body == e->b && nb == e->binder) return e;
        return mk_let(nb, bound, body);
      }
      case EK::App: {
        ExprP f = go(e->a);
        ExprP a = go(e->b);
        if (f == e->a && a == e->b) return e;
        return mk_app(f, a);
      }
      default: return e;
    }
  }
};

}  // namespace

bool alpha_equal(const ExprP& e1, const ExprP& e2) {
  AlphaEq st;
  return st.eq(e1.get(), e2.get());
}

std::vector<BinderId> free_vars(const ExprP& e) {
  std::unordered_set<uint64_t> bound, seen;
  std::vector<BinderId> out;
  collect_free(e.get(), bound, seen, out);
  return out;
}

ExprP freshen(const ExprP& e) {
  std::unordered_map<uint64_t, BinderId> ren;
  return rename(e, ren);
}

namespace {
std::atomic<size_t> g_substitutions{0};
}

size_t substitution_count() { return g_substitutions.load(); }

ExprP substitute(const ExprP& e, BinderId x, const ExprP& v) {
  g_substitutions.fetch_add(1, std::memory_order_relaxed);
  Subst s{x.id, v, {}};
  for (const BinderId& b : free_vars(v)) s.fv.insert(b.id);
  return s.go(e);
}

size_t count_plus_zero(const ExprP& root) {
  size_t n = 0;
  std::vector<const Expr*> stack{root.get()};
  while (!stack.empty()) {
    const Expr* e = stack.back();
    stack.pop_back();
    if (e->kind == EK::App && e->b->kind == EK::Literal && e->b->lit == 0 && e->a->kind == EK::App &&
        e->a->a->kind == EK::IdentRef && e->a->a->ident->fam == idents::add())
      ++n;
    if (e->a) stack.push_back(e->a.get());
    if (e->b) stack.push_back(e->b.get());
  }
  return n;
}

}  // namespace rw
