#include "rw/types.hpp"

#include <functional>
#include <mutex>
#include <unordered_set>

namespace rw {
namespace {

struct Key {
  TK kind;
  Type a, b;
  int var;
  bool numeric;
  bool operator==(const Key& o) const {
    return kind == o.kind && a == o.a && b == o.b && var == o.var && numeric == o.numeric;
  }
};

struct NodeHash {
  using is_transparent = void;
  size_t operator()(const TypeNode* n) const { return hash(Key{n->kind, n->a, n->b, n->var, n->numeric}); }
  static size_t hash(const Key& k) {
    size_t h = static_cast<size_t>(k.kind);
    h = h * 1000003u ^ std::hash<const void*>()(k.a);
    h = h * 1000003u ^ std::hash<const void*>()(k.b);
    h = h * 1000003u ^ static_cast<size_t>(k.var + 7);
    return h * 31u + k.numeric;
  }
};
struct NodeEq {
  bool operator()(const TypeNode* x, const TypeNode* y) const {
    return Key{x->kind, x->a, x->b, x->var, x->numeric} == Key{y->kind, y->a, y->b, y->var, y->numeric};
  }
};

std::mutex g_mu;
std::unordered_set<const TypeNode*, NodeHash, NodeEq>& table() {
  static auto* t = new std::unordered_set<const TypeNode*, NodeHash, NodeEq>();
  return *t;
}

Type intern(TK kind, Type a, Type b, int var = -1, bool numeric = false) {
  TypeNode probe{kind, a, b, var, numeric, false};
  std::lock_guard<std::mutex> lk(g_mu);
  auto& t = table();
  auto it = t.find(&probe);
  if (it != t.end()) return *it;
  auto* n = new TypeNode(probe);
  n->has_tvar = kind == TK::TVar || (a && a->has_tvar) || (b && b->has_tvar);
  t.insert(n);
  return n;
}

}  // namespace

namespace ty {
Type Int() { static Type t = intern(TK::Int, nullptr, nullptr); return t; }
Type Nat() { static Type t = intern(TK::Nat, nullptr, nullptr); return t; }
Type Bool() { static Type t = intern(TK::Bool, nullptr, nullptr); return t; }
Type Unit() { static Type t = intern(TK::Unit, nullptr, nullptr); return t; }
Type prod(Type a, Type b) { return intern(TK::Prod, a, b); }
Type list(Type a) { return intern(TK::List, a, nullptr); }
Type option(Type a) { return intern(TK::Option, a, nullptr); }
Type arrow(Type s, Type d) { return intern(TK::Arrow, s, d); }
Type arrows(const std::vector<Type>& args, Type result) {
  Type t = result;
  for (size_t i = args.size(); i-- > 0;) t = arrow(args[i], t);
  return t;
}
Type tvar(int index, bool numeric) { return intern(TK::TVar, nullptr, nullptr, index, numeric); }
}  // namespace ty

std::vector<Type> arg_types(Type t) {
  std::vector<Type> out;
  while (t->kind == TK::Arrow) {
    out.push_back(t->a);
    t = t->b;
  }
  return out;
}

Type result_type(Type t) {
  while (t->kind == TK::Arrow) t = t->b;
  return t;
}

size_t arity(Type t) {
  size_t n = 0;
  while (t->kind == TK::Arrow) {
    ++n;
    t = t->b;
  }
  return n;
}

static void show_rec(Type t, int prec, std::string& out) {
  switch (t->kind) {
    case TK::Int: out += "Z"; return;
    case TK::Nat: out += "N"; return;
    case TK::Bool: out += "bool"; return;
    case TK::Unit: out += "unit"; return;
    case TK::TVar:
      out += "T" + std::to_string(t->var);
      return;
    case TK::List:
    case TK::Option:
      if (prec > 2) out += "(";
      out += t->kind == TK::List ? "list " : "option ";
      show_rec(t->a, 3, out);
      if (prec > 2) out += ")";
      return;
    case TK::Prod:
      if (prec > 1) out += "(";
      show_rec(t->a, 1, out);
      out += " * ";
      show_rec(t->b, 2, out);
      if (prec > 1) out += ")";
      return;
    case TK::Arrow:
      if (prec > 0) out += "(";
      show_rec(t->a, 1, out);
      out += " -> ";
      show_rec(t->b, 0, out);
      if (prec > 0) out += ")";
      return;
  }
}

std::string show(Type t) {
  std::string s;
  show_rec(t, 0, s);
  return s;
}

Type subst(Type t, const TypeSubst& s) {
  if (!t->has_tvar) return t;
  switch (t->kind) {
    case TK::TVar:
      return (t->var < static_cast<int>(s.size()) && s[t->var]) ? s[t->var] : t;
    case TK::Prod: return ty::prod(subst(t->a, s), subst(t->b, s));
    case TK::List: return ty::list(subst(t->a, s));
    case TK::Option: return ty::option(subst(t->a, s));
    case TK::Arrow: return ty::arrow(subst(t->a, s), subst(t->b, s));
    default: return t;
  }
}

bool match_type(Type pat, Type actual, TypeSubst& s) {
  if (!pat->has_tvar) return pat == actual;
  if (pat->kind == TK::TVar) {
    if (pat->numeric && !is_numeric(actual)) return false;
    if (pat->var >= static_cast<int>(s.size())) s.resize(pat->var + 1, nullptr);
    if (s[pat->var]) return s[pat->var] == actual;
    s[pat->var] = actual;
    return true;
  }
  if (pat->kind != actual->kind) return false;
  if (pat->a && !match_type(pat->a, actual->a, s)) return false;
  if (pat->b && !match_type(pat->b, actual->b, s)) return false;
  return true;
}

}  // namespace rw
