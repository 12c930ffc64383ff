#pragma once

#include "rw/eval.hpp"
#include "rw/matcher.hpp"
#include "rw/rules.hpp"

#include <optional>
#include <random>
#include <vector>

namespace rw {

// Reference implementations: direct recursive matching, rewriting by repeated
// substitution, and full evaluation. Slow by design.

struct RootMatch {
  int rule = -1;
  MatchBindings bindings;
};

// First rule, by index, whose left-hand side matches e at the root and whose
// side condition holds.
std::optional<RootMatch> naive_match_root(const RuleSet& rs, const ExprP& e);

// Replaces the types of every node through s (identifiers are re-instantiated).
ExprP subst_types(const ExprP& e, const TypeSubst& s);

struct NaiveResult {
  ExprP expr;
  bool converged = false;  // false when fuel ran out first
  size_t steps = 0;
};

// Leftmost-outermost single steps until none applies: beta, let inlining,
// root rule application, eliminator unrolling on constructors, and constant
// folding when the rule set enables delta.
NaiveResult naive_rewrite(const RuleSet& rs, const ExprP& e, size_t fuel);

Value full_eval(const ExprP& e);

// ---- random terms -----------------------------------------------------------

struct GenConfig {
  size_t max_nodes = 40;
  int max_inputs = 3;
};

struct RandomTerm {
  ExprP term;                // closed: lambdas over `inputs`
  std::vector<Type> inputs;  // first-order input types
};

RandomTerm random_term(std::mt19937_64& rng, const GenConfig& cfg = {});
Int random_literal(std::mt19937_64& rng, bool nat);
Value random_value(std::mt19937_64& rng, Type t);

// Applies the denotation of a closed term to arguments.
Value apply_denotation(const ExprP& closed, const std::vector<Value>& args);

}  // namespace rw
