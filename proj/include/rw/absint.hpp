#pragma once

#include "rw/expr.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rw {

// Half-open integer interval [lower, upper); never empty.
struct Bounds {
  Int lower, upper;

  static Bounds singleton(const Int& n) { return Bounds{n, n + 1}; }
  // From inclusive endpoints.
  static Bounds closed(const Int& lo, const Int& hi) { return Bounds{lo, hi + 1}; }
  bool contains(const Int& n) const { return lower <= n && n < upper; }
  bool operator==(const Bounds& o) const { return lower == o.lower && upper == o.upper; }
};

std::string show(const Bounds& b);  // "[l,u)"

// Bounds of Int/Nat binders by BinderId; a missing entry is top.
using AbstractEnv = std::unordered_map<uint64_t, Bounds>;

// Interval transfer for one identifier; none is top. Arguments of non-numeric
// type are passed as none.
std::optional<Bounds> transfer(const Ident* id, const std::vector<std::optional<Bounds>>& args);

struct AbsintOptions {
  bool clip_constants = false;  // also wrap Int literals in singleton clips
};

// Bounds of a base-typed expression; none when unknown.
std::optional<Bounds> infer_bounds(const ExprP& e, const AbstractEnv& env);

// Wraps Int variable occurrences with known bounds (inputs and let binders)
// in clip_{l,u}. Occurrences already directly under a clip are left alone.
ExprP infer_and_clip(const ExprP& e, const AbstractEnv& env, AbsintOptions opts = {});

// Bounds file: one `x in [l, u)` per line; numbers are integers, `2^k`, or
// sums/differences of those. Blank lines and lines starting with `#` or `--`
// are ignored. Throws ParseError.
std::vector<std::pair<std::string, Bounds>> parse_bounds_file(const std::string& text);

// Attaches named bounds to the free variables of e and to the binders of its
// outermost lambdas.
AbstractEnv resolve_bounds(const ExprP& e, const std::vector<std::pair<std::string, Bounds>>& named);

}  // namespace rw
