#pragma once

#include "rw/expr.hpp"
#include "rw/value.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace rw {

struct TypeError : std::runtime_error {
  std::string kind;  // UnknownIdent, TypeMismatch, UnboundVar
  std::string path;  // child indices from the root, e.g. "0.1"; empty at the root
  TypeError(std::string kind, std::string path, const std::string& msg);
};

// Checks the stored type annotations of `e` and returns its type. Free
// variables named in source text are accepted (consistently typed); any other
// unbound variable is an error.
Type typecheck(const ExprP& e, const Registry& reg);

struct UninterpretedIdent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ValueEnv = std::unordered_map<uint64_t, Value>;

// Call-by-value environment interpreter; performs no syntactic substitution.
Value denote(const ExprP& e, const ValueEnv& env = {});
Value ident_value(const Ident& id);

// Converts a first-order value back to a closed literal term.
ExprP value_to_expr(const Value& v, Type t);

// Runs `f` on a thread with a large stack; rethrows its exception.
void run_deep(const std::function<void()>& f);

}  // namespace rw
