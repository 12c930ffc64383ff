#pragma once

#include "rw/bigint.hpp"
#include "rw/ident.hpp"
#include "rw/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace rw {

// Opaque binder token. Bound binders come from a global atomic counter; free
// variables named in source text map to a stable token per name so that
// separately parsed terms agree on them.
struct BinderId {
  uint64_t id = 0;
  const std::string* hint = nullptr;
  bool operator==(const BinderId& o) const { return id == o.id; }
  bool operator!=(const BinderId& o) const { return id != o.id; }
  bool operator<(const BinderId& o) const { return id < o.id; }
};

struct BinderHash {
  size_t operator()(const BinderId& b) const { return std::hash<uint64_t>()(b.id); }
};

const std::string* intern_name(const std::string& s);
BinderId fresh_binder(const std::string* hint = nullptr);
BinderId fresh_like(const BinderId& b);
BinderId free_var(const std::string& name);
bool is_free_var_token(const BinderId& b);

enum class EK : uint8_t { Var, Abs, App, LetIn, IdentRef, Literal };

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

// Typed term. Abs: a = body (binder type is type->a). App: a = fn, b = arg.
// LetIn: a = bound, b = body. Literal: Int/Nat use `lit`, Bool is 0/1, Unit 0.
struct Expr {
  EK kind;
  Type type;
  BinderId binder;
  ExprP a, b;
  const Ident* ident = nullptr;
  Int lit;
  bool eager = false;  // `eagerly` marker on an eliminator head (rule templates)
};

ExprP mk_var(BinderId x, Type t);
ExprP mk_abs(BinderId x, Type binder_type, ExprP body);
ExprP mk_app(ExprP f, ExprP arg);
ExprP mk_apps(ExprP f, const std::vector<ExprP>& args);
ExprP mk_let(BinderId x, ExprP bound, ExprP body);
ExprP mk_ident(const Ident* id, bool eager = false);
ExprP mk_num(Type t, Int v);  // Int or Nat (throws on negative Nat)
ExprP mk_int(Int v);
ExprP mk_nat(Int v);
ExprP mk_bool(bool v);
ExprP mk_unit();
ExprP mk_lit(Type t, const Int& v);

// Application spine: head and arguments, outermost argument last.
const Expr* spine_head(const Expr* e);
std::vector<ExprP> spine_args(const ExprP& e);
const Ident* head_ident(const Expr* e);

// Cons-spine view: elements of a list built from cons ending in nil.
bool list_spine(const ExprP& e, std::vector<ExprP>& elems);
ExprP mk_list(Type elem, const std::vector<ExprP>& elems);
ExprP mk_pair(ExprP a, ExprP b);

// Node counting: every constructor is one node, except that an application
// spine headed by an identifier counts once (so `5 + 0` has 3 nodes).
struct Metrics {
  size_t node_count = 0;
  size_t let_count = 0;
  size_t max_binder_depth = 0;
};
Metrics metrics(const ExprP& e);

bool alpha_equal(const ExprP& e1, const ExprP& e2);

std::vector<BinderId> free_vars(const ExprP& e);

// Copies `e` with every bound binder renamed to a fresh token.
ExprP freshen(const ExprP& e);
// Capture-avoiding substitution of `v` for free occurrences of `x`; each copy
// of `v` is freshened so binders stay unique.
ExprP substitute(const ExprP& e, BinderId x, const ExprP& v);
// Number of substitute() calls made so far in this process.
size_t substitution_count();

// Number of `_ + 0` sites (add applied to something and the literal 0).
size_t count_plus_zero(const ExprP& e);

}  // namespace rw
