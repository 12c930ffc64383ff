#include "rw/bench.hpp"
#include "rw/engine.hpp"
#include "rw/oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace rw;

namespace {

Registry all_idents() {
  Registry r;
  for (const IdentFamily* f : idents::all()) r.add(f);
  return r;
}

std::vector<Int> nums(const Value& v) {
  std::vector<Int> out;
  for (const Value& x : v.list_items()) out.push_back(x.num);
  return out;
}

}  // namespace

TEST_CASE("naive root matching") {
  RuleSet rs = parse_rules(embedded_rules("matcher_example"));
  auto m = naive_match_root(rs, parse_term("(x + 1) + 0", rs.registry));
  REQUIRE(m);
  CHECK(m->rule == 0);
  REQUIRE(m->bindings.terms[0]);
  CHECK(print(m->bindings.terms[0]->to_expr()) == "x + 1");
  CHECK(naive_match_root(rs, parse_term("fst (1, 2)", rs.registry))->rule == 1);
  CHECK_FALSE(naive_match_root(rs, parse_term("0 + x", rs.registry)));

  RuleSet sc = parse_rules(embedded_rules("sidecond"));
  CHECK(naive_match_root(sc, parse_term("x / 16", sc.registry))->rule == 1);
  CHECK_FALSE(naive_match_root(sc, parse_term("x / 12", sc.registry)));
}

TEST_CASE("naive rewriting") {
  RuleSet rs = parse_rules(embedded_rules("plus0"));
  Registry reg = rs.registry;
  NaiveResult r = naive_rewrite(rs, parse_term("(fun f x y => f x y) (+) z 0", reg), 1000);
  CHECK(r.converged);
  CHECK(print(r.expr) == "z");
  CHECK(print(naive_rewrite(rs, parse_term("5 + 0", reg), 10).expr) == "5");
  NaiveResult starved = naive_rewrite(rs, parse_term("v + 0 + 0 + 0", reg), 1);
  CHECK_FALSE(starved.converged);
  CHECK(starved.steps == 1);

  RuleSet sc = parse_rules(embedded_rules("sidecond"));
  CHECK(print(naive_rewrite(sc, parse_term("3 + 4", sc.registry), 10).expr) == "7");
}

TEST_CASE("full evaluation") {
  CHECK(nums(full_eval(gen_sieve(10))) == std::vector<Int>{2, 3, 5, 7});
  CHECK(nums(full_eval(gen_sieve(2))) == std::vector<Int>{2});
  CHECK(full_eval(parse_term("fold_left (+) [1; 2; 3] 0", all_idents())) == Value::number(6));
}

TEST_CASE("sieve agrees with trial division") {
  for (int n : {2, 3, 10, 30, 50}) CHECK(nums(full_eval(gen_sieve(n))) == trial_division_primes(n));
  CHECK(trial_division_primes(100).size() == 25);
}

TEST_CASE("random terms are closed, well typed and first order in their inputs") {
  std::mt19937_64 rng(1);
  Registry reg = all_idents();
  for (int i = 0; i < 500; ++i) {
    RandomTerm rt = random_term(rng);
    CHECK(free_vars(rt.term).empty());
    CHECK(metrics(rt.term).node_count <= GenConfig{}.max_nodes);
    CHECK(typecheck(rt.term, reg) == rt.term->type);
    CHECK(rt.inputs.size() <= 3);
    for (Type t : rt.inputs) CHECK(is_base(t));
  }
  for (int i = 0; i < 200; ++i) CHECK(random_literal(rng, true) >= 0);
}

TEST_CASE("engine and reference rewriter agree") {
  RuleSet rs = prelude();
  auto cr = compile_rules(rs);
  std::mt19937_64 rng(8);
  int converged = 0;
  for (int i = 0; i < 500; ++i) {
    RandomTerm rt = random_term(rng);
    NaiveResult nr = naive_rewrite(rs, rt.term, 5000);
    if (!nr.converged) continue;
    ++converged;
    Engine eng(cr);
    ExprP out = eng.rewrite_top(rt.term);
    INFO(print(rt.term) << "\nengine: " << print(out) << "\noracle: " << print(nr.expr));
    for (int v = 0; v < 5; ++v) {
      std::vector<Value> args;
      for (Type t : rt.inputs) args.push_back(random_value(rng, t));
      CHECK(apply_denotation(out, args) == apply_denotation(nr.expr, args));
    }
  }
  CHECK(converged > 400);
}

TEST_CASE("reference rewriter preserves denotation") {
  RuleSet rs = prelude();
  std::mt19937_64 rng(13);
  for (int i = 0; i < 300; ++i) {
    RandomTerm rt = random_term(rng);
    NaiveResult nr = naive_rewrite(rs, rt.term, 2000);
    std::vector<Value> args;
    for (Type t : rt.inputs) args.push_back(random_value(rng, t));
    CHECK(apply_denotation(nr.expr, args) == apply_denotation(rt.term, args));
  }
}
