#pragma once

#include "rw/bigint.hpp"
#include "rw/types.hpp"
#include "rw/value.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace rw {

struct Expr;
struct Ident;

enum class IdentKind { Constructor, Eliminator, Primitive, Clip, Uninterpreted };

// Semantics receives exactly `sem_arity` arguments; if the result type is an
// arrow (eliminators with a functional motive) it returns a function value.
using Semantics = std::function<Value(const Ident&, const std::vector<Value>&)>;

struct IdentFamily {
  int id = 0;
  std::string name;    // canonical name
  std::string symbol;  // infix operator, if any
  int nparams = 0;     // type parameters, TVars 0..nparams-1 in `schematic`
  Type schematic = nullptr;
  size_t sem_arity = 0;
  IdentKind kind = IdentKind::Primitive;
  Semantics sem;       // empty for uninterpreted idents
  bool delta = false;  // constant-foldable on concrete arguments
  std::string rect_group;  // nat, list, prod, bool, option for eliminators
  int scrutinee = -1;      // recursion argument of an eliminator
  bool builtin = false;    // always present in a registry
};

// An identifier instance: a family at concrete (or, inside rule templates,
// schematic) type arguments. Instances are interned, so pointer equality is
// identity. Clip instances carry their bounds [lo, hi).
struct Ident {
  const IdentFamily* fam = nullptr;
  std::vector<Type> targs;
  Int lo, hi;
  Type type = nullptr;
  std::vector<Type> params;  // flattened argument types
  Type result = nullptr;
  std::shared_ptr<const Expr> ref;  // shared IdentRef node

  const std::string& name() const { return fam->name; }
  bool is_clip() const { return fam->kind == IdentKind::Clip; }
};

struct UnknownIdent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace idents {

// Looks up a family by canonical name, operator symbol or alias.
const IdentFamily* find(const std::string& name);
const IdentFamily* get(const std::string& canonical);  // throws if missing
const std::vector<const IdentFamily*>& all();

// Declares an uninterpreted identifier with a monomorphic signature.
// Redeclaring with the same type returns the existing family.
const IdentFamily* declare_uninterpreted(const std::string& name, Type type);

const Ident* instantiate(const IdentFamily* fam, std::vector<Type> targs);
const Ident* clip(const Int& lo, const Int& hi);
const Ident* subst(const Ident* id, const TypeSubst& s);

// Frequently used families.
const IdentFamily* add();
const IdentFamily* mul();
const IdentFamily* nil();
const IdentFamily* cons();
const IdentFamily* pair();
const IdentFamily* succ();
const IdentFamily* some();
const IdentFamily* none();
const IdentFamily* clip_family();
const IdentFamily* clip_dyn();  // clip with bounds as leading arguments

}  // namespace idents

Int clip_semantics(const Int& lo, const Int& hi, const Int& n);

// The identifiers admitted in terms for one rule set.
class Registry {
 public:
  Registry();
  void add(const IdentFamily* fam);
  bool contains(const IdentFamily* fam) const;
  const IdentFamily* lookup(const std::string& name) const;  // null if absent
  std::vector<const IdentFamily*> families() const;

 private:
  std::vector<bool> present_;
};

std::string show(const Ident& id);

}  // namespace rw
