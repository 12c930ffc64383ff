#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rw {

enum class TK : uint8_t { Int, Nat, Bool, Unit, Prod, List, Option, Arrow, TVar };

// Types are hash-consed: two types are structurally equal iff their pointers
// are equal. TVar only occurs in rule templates (schematic types).
struct TypeNode {
  TK kind;
  const TypeNode* a = nullptr;  // Prod left, List/Option element, Arrow source
  const TypeNode* b = nullptr;  // Prod right, Arrow target
  int var = -1;                 // TVar index
  bool numeric = false;         // TVar restricted to Int/Nat
  bool has_tvar = false;
};
using Type = const TypeNode*;

namespace ty {
Type Int();
Type Nat();
Type Bool();
Type Unit();
Type prod(Type a, Type b);
Type list(Type a);
Type option(Type a);
Type arrow(Type s, Type d);
Type arrows(const std::vector<Type>& args, Type result);
Type tvar(int index, bool numeric);
}  // namespace ty

inline bool is_base(Type t) { return t->kind != TK::Arrow; }
inline bool is_numeric(Type t) { return t->kind == TK::Int || t->kind == TK::Nat; }

// Flattened arrow view: t = args[0] -> ... -> args[n-1] -> result.
std::vector<Type> arg_types(Type t);
Type result_type(Type t);
size_t arity(Type t);

std::string show(Type t);

using TypeSubst = std::vector<Type>;  // indexed by TVar; nullptr = unbound

Type subst(Type t, const TypeSubst& s);
// One-way matching of a schematic type against a concrete one.
bool match_type(Type pat, Type actual, TypeSubst& s);

}  // namespace rw
