#include "rw/rules.hpp"
#include "rw/eval.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace rw;

namespace {

std::string error_kind(const std::string& text) {
  try {
    parse_rules(text);
  } catch (const ParseError& e) {
    return e.kind;
  }
  return "";
}

}  // namespace

TEST_CASE("a simple rule parses without a condition") {
  RuleSet rs = parse_rules("rule plus_zero: forall (n:Z), n + 0 => n");
  REQUIRE(rs.rules.size() == 1);
  CHECK(rs.rules[0].name == "plus_zero");
  CHECK(rs.rules[0].cond == nullptr);
  CHECK_FALSE(rs.rules[0].again);
  CHECK(rs.rules[0].index == 0);
}

TEST_CASE("side conditions over constant variables") {
  RuleSet rs = parse_rules("rule div_pow2: forall (n:Z) (const m:Z), if 2^(log2 m) == m then n / m => n >> (log2 m)");
  REQUIRE(rs.rules.size() == 1);
  CHECK(rs.rules[0].cond != nullptr);
  CHECK(rs.rules[0].vars[1].is_const);
  CHECK(error_kind("rule bad: forall (n:Z) (m:Z), if m == 0 then n + m => n") == "NonConstVarInCondition");
}

TEST_CASE("apostrophe marks constant variables") {
  RuleSet rs = parse_rules("rule r: forall (n : Z) 'm, n * 'm => n");
  CHECK(rs.rules[0].vars[1].is_const);
}

TEST_CASE("parse errors carry a kind") {
  CHECK(error_kind("rule r: forall (n:Z), foo n => n") == "UnknownIdent");
  CHECK(error_kind("rule r: forall (n:Z), n + n => n") == "NonlinearPattern");
  CHECK(error_kind("rule r: forall (n:Z), n + 'k => n") == "UnboundVar");
  CHECK(error_kind("rule r: forall (n:Z), n + 0 => m") == "UnknownIdent");
  CHECK(error_kind("rule r forall (n:Z), n + 0 => n") == "SyntaxError");
  CHECK(error_kind("rule r: forall (x:Z), x => 0") != "");
}

TEST_CASE("parse errors report line and column") {
  try {
    parse_rules("-- comment\nrule r: forall (n:Z), foo n => n\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col > 1);
  }
}

TEST_CASE("scraped registry holds builtins, rule identifiers and extra identifiers") {
  RuleSet rs = prelude();
  for (const char* n : {"add", "mul", "list_rect", "list_case", "nat_rect", "pair", "fst", "snd", "seq", "map"})
    CHECK(rs.registry.contains(idents::get(n)));
  CHECK_FALSE(rs.registry.contains(idents::get("div")));

  RuleSet only = parse_rules("extra idents: add\n");
  CHECK(only.rules.empty());
  CHECK(only.registry.contains(idents::add()));
  CHECK_FALSE(only.registry.contains(idents::mul()));
  CHECK(only.registry.contains(idents::get("list_rect")));
}

TEST_CASE("uninterpreted extra identifiers") {
  RuleSet rs = parse_rules("extra idents: e : Z\n");
  CHECK(rs.registry.lookup("e") != nullptr);
  ExprP t = parse_term("e + 1", parse_rules("extra idents: e : Z, add\n").registry);
  CHECK(show(t->type) == "Z");
}

TEST_CASE("prelude shape") {
  RuleSet rs = prelude();
  CHECK(rs.delta);
  auto find = [&](const std::string& n) -> const RewriteRule& {
    for (const RewriteRule& r : rs.rules)
      if (r.name == n) return r;
    FAIL("missing rule " << n);
    return rs.rules[0];
  };
  CHECK(find("eval_length").again);
  CHECK(find("eval_combine").again);
  CHECK_FALSE(find("eval_map").again);
  const ExprP& rhs = find("eval_map").rhs;
  const Expr* h = spine_head(rhs.get());
  CHECK(h->kind == EK::IdentRef);
  CHECK(h->ident->name() == "list_rect");
  CHECK(h->eager);
  CHECK(find("eval_repeat").vars[1].is_const);
  CHECK(rs.eval_rect.count("list"));
}

TEST_CASE("rule files round-trip through the printer") {
  for (const auto& [name, text] : embedded_rule_files()) {
    INFO(name);
    RuleSet a = parse_rules(text);
    RuleSet b = parse_rules(print_rules(a));
    CHECK(rules_equivalent(a, b));
  }
}

TEST_CASE("rule right-hand sides have the left-hand side type") {
  for (const auto& [name, text] : embedded_rule_files()) {
    RuleSet rs = parse_rules(text);
    for (const RewriteRule& r : rs.rules) {
      INFO(name << "." << r.name);
      CHECK(r.lhs_expr->type == r.type);
      CHECK(r.rhs->type == r.type);
    }
  }
}

TEST_CASE("side conditions are total on random literals") {
  RuleSet rs = parse_rules(embedded_rules("sidecond"));
  const RewriteRule& r = rs.rules[1];
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> d(-100000, 100000);
  for (int i = 0; i < 2000; ++i) {
    long m = d(rng);
    ValueEnv env{{r.vars[1].id.id, Value::number(m)}};
    Value v = denote(r.cond, env);
    bool pow2 = m > 0 && (m & (m - 1)) == 0;
    CHECK(v.b == pow2);
    CHECK(denote(r.cond, env).b == v.b);
  }
}
