#pragma once

#include "rw/rules.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rw {

// Untyped view of a term for matching: a syntax tree, an identifier applied to
// a prefix of an argument array, or an opaque slot the caller can resolve
// (the engine uses slots for semantic functions).
struct RawTerm {
  enum Kind { Term, Spine, Opaque } kind = Opaque;
  ExprP expr;                   // Term
  const Ident* head = nullptr;  // Spine
  const RawTerm* args = nullptr;
  size_t nargs = 0;
  int slot = -1;  // Opaque
  Type type = nullptr;

  static RawTerm of(ExprP e);
  static RawTerm spine(const Ident* head, const RawTerm* args, size_t nargs);
  static RawTerm opaque(int slot, Type t);

  bool is_app() const;
  RawTerm fn() const;
  RawTerm arg() const;
  const Ident* ident() const;    // a bare identifier, else null
  const Expr* literal() const;   // a literal, else null
  // Reassembles the viewed term; throws std::logic_error on opaque parts.
  ExprP to_expr() const;
};

struct MatchBindings {
  TypeSubst types;
  std::vector<std::optional<RawTerm>> terms;  // by pattern variable index
};

// Full structural match of a rule's left-hand side at the root.
std::optional<MatchBindings> match_rule(const RewriteRule& rule, const RawTerm& t);
// Evaluates the side condition on the literals bound to constant variables.
bool check_condition(const RewriteRule& rule, const MatchBindings& b);

struct SwitchKey {
  enum Kind { Ident, Literal } kind = Ident;
  const IdentFamily* fam = nullptr;
  Int lit;
  bool operator==(const SwitchKey& o) const { return kind == o.kind && fam == o.fam && lit == o.lit; }
};

struct DecisionTree;
using TreeP = std::shared_ptr<const DecisionTree>;

struct DecisionTree {
  enum Kind { TryLeaf, Failure, Switch, Swap } kind = Failure;
  int rule = -1;  // TryLeaf
  TreeP onfailure;
  std::vector<std::pair<SwitchKey, TreeP>> icases;  // Switch
  TreeP app_case;                                   // may be null
  TreeP dflt;
  int swap = 0;  // Swap
  TreeP cont;
};

struct FuelExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr size_t kDefaultCompileFuel = size_t(1) << 20;

TreeP compile_rewrites(const std::vector<PatternP>& lhs, size_t fuel = kDefaultCompileFuel);
TreeP compile_rewrites(const RuleSet& rs, size_t fuel = kDefaultCompileFuel);

bool tree_equal(const DecisionTree& a, const DecisionTree& b);
std::string dump_tree(const DecisionTree& t);
std::string tree_to_dot(const DecisionTree& t);

// Called with a candidate rule index; returns true when the rule fired.
using TryRule = std::function<bool(int)>;

// Walks the tree over `exprs` and returns the first rule index for which
// try_rule succeeded. A failed Switch branch falls through to the default;
// no rule is tried twice.
std::optional<int> eval_decision_tree(const DecisionTree& t, std::vector<RawTerm> exprs, const TryRule& try_rule);

// The same evaluation with the tree turned into nested closures up front.
using CompiledMatcher = std::function<std::optional<int>(std::vector<RawTerm>, const TryRule&)>;
CompiledMatcher compile_to_closure(const TreeP& t);

}  // namespace rw
