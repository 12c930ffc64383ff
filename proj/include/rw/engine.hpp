#pragma once

#include "rw/matcher.hpp"
#include "rw/rules.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace rw {

// A telescope of let binders ending in a payload.
struct LetBinding {
  BinderId x;
  Type type;
  ExprP bound;
};

struct UnderLets {
  std::vector<LetBinding> binds;
  ExprP body;

  static UnderLets done(ExprP e) { return UnderLets{{}, std::move(e)}; }
  ExprP to_expr() const;
};

// Monadic bind: runs `k` on the payload and appends its binders after ours.
UnderLets splice(const UnderLets& u, const std::function<UnderLets(const ExprP&)>& k);

using Telescope = std::vector<LetBinding>;
ExprP close_telescope(const Telescope& t, ExprP body);

struct SemValue;
using SemFn = std::function<SemValue(Telescope&, const SemValue&)>;

// Semantic value: syntax at base types, a host function at arrow types.
// Functions emit let binders into the telescope of their caller.
struct SemValue {
  Type type = nullptr;
  ExprP syn;
  std::shared_ptr<const SemFn> fn;
  const std::string* hint = nullptr;  // binder name used when reified

  static SemValue of(ExprP e);
  static SemValue function(Type t, SemFn f, const std::string* hint = nullptr);
  bool is_fn() const { return fn != nullptr; }
  SemValue apply(Telescope& tele, const SemValue& arg) const;
};

enum class InlineDecision { Inline, Keep, NameElements };

// Literals, variables and nullary constructors are inlined; constructor
// applications (cons spines, pairs, Some, S) get one binder per component
// that is neither trivial nor a single primitive operation on trivial
// operands; anything else keeps its binder.
InlineDecision inline_heuristic(const ExprP& bound);
using InlineHook = std::function<InlineDecision(const ExprP&)>;

struct EngineOptions {
  std::optional<bool> delta;  // overrides the rule set's `options: delta`
  bool trace = false;
  bool compiled_matcher = true;  // closure-compiled tree instead of the interpreter
  InlineHook inline_hook;
};

struct TraceEntry {
  std::string rule;
  std::string path;  // child indices into the pass input, e.g. "0.1.0"
};

struct Stats {
  size_t rule_firings = 0;
  size_t delta_folds = 0;
  size_t eager_unrolls = 0;
  size_t eta_expansions = 0;
  size_t passes = 0;
  std::vector<TraceEntry> trace;
  size_t rewrite_firings() const { return rule_firings + delta_folds; }
};

struct CompiledRules {
  RuleSet rules;
  TreeP tree;
  CompiledMatcher matcher;
};
std::shared_ptr<const CompiledRules> compile_rules(RuleSet rs);

using SemEnv = std::unordered_map<uint64_t, SemValue>;

class Engine {
 public:
  explicit Engine(std::shared_ptr<const CompiledRules> rules, EngineOptions opts = {});
  ~Engine();

  // reflect_b(e) = rewrite_head(e); at arrow types an eta-expanded function.
  SemValue reflect(const ExprP& e, Type t, Telescope& tele);
  // Reads a semantic value back into syntax; telescopes become let binders.
  ExprP reify(const SemValue& v, Type t);
  SemValue reduce(const ExprP& e, const SemEnv& env, Telescope& tele);
  UnderLets reduce_to_lets(const ExprP& e, const SemEnv& env = {});

  // At most one step at the root: a rule, an eval_rect unrolling, or a
  // constant fold; returns e unchanged when nothing applies.
  UnderLets rewrite_head(const ExprP& e);
  // Instantiates rule k for bindings produced by match_rule; none when the
  // side condition fails.
  std::optional<UnderLets> rewrite_with_rule(int k, const MatchBindings& b);
  // Unrolls an eliminator whose recursion argument is fully concrete.
  std::optional<UnderLets> eager_eval(const Ident* elim, const std::vector<SemValue>& args);

  // Repeated passes of reify(reduce(e)); a pass in which an `again` rule fired
  // triggers another while fuel remains. Fuel defaults to node_count(e) + 1.
  ExprP rewrite_top(const ExprP& e, std::optional<size_t> fuel = std::nullopt);

  const Stats& stats() const;
  void reset_stats();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Convenience wrapper: compiles `rs` and rewrites `e` on a large stack.
ExprP rewrite(const RuleSet& rs, const ExprP& e, EngineOptions opts = {}, Stats* stats = nullptr,
              std::optional<size_t> fuel = std::nullopt);

}  // namespace rw
