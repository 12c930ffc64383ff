#pragma once

#include "rw/expr.hpp"
#include "rw/ident.hpp"
#include "rw/syntax.hpp"

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rw {

struct PatternVar {
  std::string name;
  BinderId id;
  Type type = nullptr;  // may mention rule type variables
  bool is_const = false;
};

struct Pattern;
using PatternP = std::shared_ptr<const Pattern>;

// Left-hand side pattern. Ident patterns carry schematic type arguments; the
// clip family additionally carries its bounds, each either a ConstVar or a
// fixed value. Literal patterns match one literal value.
struct Pattern {
  enum K { Wildcard, ConstVar, Ident, Literal, App } k = Wildcard;
  Type type = nullptr;
  int var = -1;  // Wildcard / ConstVar: index into RewriteRule::vars
  const IdentFamily* fam = nullptr;
  std::vector<Type> targs;
  int lo_var = -1, hi_var = -1;  // clip bounds bound to ConstVars
  Int lo, hi;                    // clip bounds when fixed
  Int lit;
  PatternP fn, arg;
};

bool is_wildcard_like(const Pattern& p);  // Wildcard or ConstVar

struct RewriteRule {
  std::string name;
  int index = 0;
  std::vector<PatternVar> vars;
  PatternP lhs;
  ExprP lhs_expr;  // the left-hand side as a term over the pattern variables
  ExprP rhs;       // template over the pattern variables
  ExprP cond;      // Boolean side condition over ConstVars, or null
  bool again = false;
  int ntvars = 0;
  Type type = nullptr;
  int line = 0;
};

struct RuleSet {
  std::vector<RewriteRule> rules;
  Registry registry;
  std::vector<const IdentFamily*> extra_idents;
  bool delta = false;
  std::set<std::string> eval_rect;  // eliminator groups unrolled on concrete scrutinees
};

// Parses a rule file; the registry is scraped from the rules and headers.
RuleSet parse_rules(const std::string& text);
Registry scrape_idents(const std::vector<RewriteRule>& rules, const std::vector<const IdentFamily*>& extra);

// Rule files shipped with the library, by base name (prelude, plus0, ...).
const std::vector<std::pair<std::string, std::string>>& embedded_rule_files();
const std::string& embedded_rules(const std::string& name);
RuleSet prelude();

std::string print_rule(const RewriteRule& r);
std::string print_rules(const RuleSet& rs);
std::string show(const Pattern& p, const std::vector<PatternVar>& vars);

// Structural equality of rule sets up to renaming of pattern variables.
bool rules_equivalent(const RuleSet& a, const RuleSet& b);

}  // namespace rw
