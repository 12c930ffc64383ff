#include "rw/engine.hpp"
#include "rw/matcher.hpp"
#include "rw/oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

using namespace rw;

namespace {

TreeP fail() { return std::make_shared<DecisionTree>(); }

TreeP leaf(int rule) {
  auto t = std::make_shared<DecisionTree>();
  t->kind = DecisionTree::TryLeaf;
  t->rule = rule;
  t->onfailure = fail();
  return t;
}

TreeP sw(std::vector<std::pair<SwitchKey, TreeP>> cases, TreeP app) {
  auto t = std::make_shared<DecisionTree>();
  t->kind = DecisionTree::Switch;
  t->icases = std::move(cases);
  t->app_case = std::move(app);
  t->dflt = fail();
  return t;
}

SwitchKey key(const std::string& fam) { return SwitchKey{SwitchKey::Ident, idents::get(fam), 0}; }
SwitchKey lit(long n) { return SwitchKey{SwitchKey::Literal, nullptr, n}; }

std::string read_fixture(const std::string& name) {
  std::ifstream f(std::string(RW_FIXTURE_DIR) + "/" + name);
  REQUIRE(f);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RuleSet example() { return parse_rules(embedded_rules("matcher_example")); }

std::optional<int> match_with_tree(const RuleSet& rs, const TreeP& tree, const ExprP& e, bool closure,
                                   std::vector<int>* tried = nullptr) {
  RawTerm raw = RawTerm::of(e);
  TryRule tr = [&](int k) {
    if (tried) tried->push_back(k);
    auto b = match_rule(rs.rules[k], raw);
    return b && check_condition(rs.rules[k], *b);
  };
  if (closure) return compile_to_closure(tree)({raw}, tr);
  return eval_decision_tree(*tree, {raw}, tr);
}

void subterms(const ExprP& e, std::vector<ExprP>& out) {
  out.push_back(e);
  if (e->a) subterms(e->a, out);
  if (e->b) subterms(e->b, out);
}

const std::vector<std::string> kArithRules = {
    "rule plus_zero: forall (n : Z), n + 0 => n",
    "rule zero_plus: forall (n : Z), 0 + n => n",
    "rule mul_one: forall (n : Z), n * 1 => n",
    "rule mul_zero: forall (n : Z), n * 0 => 0",
    "rule fst_pair: forall (x : Z) (y : Z), fst (x, y) => x",
    "rule add_consts: forall 'a 'b, if a < b then 'a + 'b => b",
    "rule sub_zero: forall (n : Z), n - 0 => n",
    "rule mul_two: forall (n : Z), n * 2 => n + n",
    "rule add_assoc: forall (a : Z) (b : Z) (c : Z), a + (b + c) => a + b + c",
    "rule nat_plus_zero: forall (n : N), n + 0 => n",
    "rule nat_sub: forall (n : N) 'm, if m == 0 then n - 'm => n",
    "rule opp_opp: forall (n : Z), opp (opp n) => n",
};

}  // namespace

TEST_CASE("decision tree for the two-rule example matches the fixture") {
  TreeP t = compile_rewrites(example());
  CHECK(dump_tree(*t) == read_fixture("decision_tree_golden.txt"));

  auto swap = std::make_shared<DecisionTree>();
  swap->kind = DecisionTree::Swap;
  swap->swap = 1;
  swap->cont = sw({{lit(0), leaf(0)}}, nullptr);
  TreeP fst_branch = sw({}, sw({}, sw({{key("pair"), leaf(1)}}, nullptr)));
  TreeP expected = sw({}, sw({{key("fst"), fst_branch}}, sw({{key("add"), swap}}, nullptr)));
  CHECK(tree_equal(*t, *expected));
}

TEST_CASE("tree_equal distinguishes different trees") {
  TreeP a = compile_rewrites(example());
  TreeP b = compile_rewrites(parse_rules("rule plus_zero: forall (n : Z), n + 0 => n"));
  CHECK(tree_equal(*a, *a));
  CHECK_FALSE(tree_equal(*a, *b));
}

TEST_CASE("empty rule set compiles to Failure") {
  TreeP t = compile_rewrites(std::vector<PatternP>{});
  CHECK(t->kind == DecisionTree::Failure);
  CHECK_FALSE(eval_decision_tree(*t, {RawTerm::of(mk_int(1))}, [](int) { return true; }));
}

TEST_CASE("compilation is deterministic") {
  RuleSet rs = prelude();
  CHECK(dump_tree(*compile_rewrites(rs)) == dump_tree(*compile_rewrites(rs)));
  CHECK(tree_to_dot(*compile_rewrites(rs)) == tree_to_dot(*compile_rewrites(rs)));
}

TEST_CASE("compilation fuel is enforced") {
  CHECK_THROWS_AS(compile_rewrites(prelude(), 1), FuelExhausted);
}

TEST_CASE("evaluating the example tree") {
  RuleSet rs = example();
  TreeP t = compile_rewrites(rs);
  for (bool closure : {false, true}) {
    CHECK(match_with_tree(rs, t, parse_term("5 + 0", rs.registry), closure) == 0);
    CHECK(match_with_tree(rs, t, parse_term("fst (a, b)", rs.registry), closure) == 1);
    CHECK_FALSE(match_with_tree(rs, t, parse_term("5 + 1", rs.registry), closure));
    Registry reg = rs.registry;
    reg.add(idents::mul());
    CHECK_FALSE(match_with_tree(rs, t, parse_term("5 * 1", reg), closure));
  }
}

TEST_CASE("rewrite_with_rule instantiates templates") {
  RuleSet rs = parse_rules(embedded_rules("sidecond"));
  auto cr = compile_rules(rs);
  Engine eng(cr);
  const RewriteRule& div = rs.rules[1];
  auto at = [&](const std::string& s) {
    ExprP e = parse_term(s, rs.registry);
    auto b = match_rule(div, RawTerm::of(e));
    REQUIRE(b);
    return eng.rewrite_with_rule(1, *b);
  };
  auto r8 = at("x / 8");
  REQUIRE(r8);
  CHECK(print(r8->to_expr()) == "x >> 3");
  CHECK_FALSE(at("x / 7"));
  CHECK_FALSE(match_rule(div, RawTerm::of(parse_term("x / y", rs.registry))));
  auto b = match_rule(rs.rules[0], RawTerm::of(parse_term("(x + 1) + 0", rs.registry)));
  REQUIRE(b);
  CHECK(print(eng.rewrite_with_rule(0, *b)->to_expr()) == "x + 1");
}

TEST_CASE("tree and closure agree with the reference root matcher") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> pool = kArithRules;
    std::shuffle(pool.begin(), pool.end(), rng);
    size_t k = 1 + rng() % 6;
    std::string text;
    for (size_t i = 0; i < k; ++i) text += pool[i] + "\n";
    RuleSet rs = parse_rules(text);
    TreeP tree = compile_rewrites(rs);
    for (int j = 0; j < 10; ++j) {
      RandomTerm rt = random_term(rng);
      std::vector<ExprP> subs;
      subterms(rt.term, subs);
      for (const ExprP& s : subs) {
        auto naive = naive_match_root(rs, s);
        std::optional<int> expect;
        if (naive) expect = naive->rule;
        std::vector<int> tried;
        auto got = match_with_tree(rs, tree, s, false, &tried);
        INFO(text << print(s, {true}));
        CHECK(got.value_or(-1) == expect.value_or(-1));
        CHECK(match_with_tree(rs, tree, s, true).value_or(-1) == expect.value_or(-1));
        std::sort(tried.begin(), tried.end());
        CHECK(std::adjacent_find(tried.begin(), tried.end()) == tried.end());
        for (int r : tried) {
          const Ident* h = head_ident(rs.rules[r].lhs_expr.get());
          const Ident* sh = head_ident(s.get());
          REQUIRE(h);
          CHECK((sh && sh->fam == h->fam));
        }
      }
    }
  }
}

TEST_CASE("literal-only rules fire through the matcher on generated additions") {
  RuleSet rs = parse_rules("rule plus_zero: forall (n : Z), n + 0 => n\n");
  TreeP tree = compile_rewrites(rs);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    Int a = random_literal(rng, false), b = random_literal(rng, false);
    ExprP e = mk_app(mk_app(mk_ident(idents::instantiate(idents::add(), {ty::Int()})), mk_int(a)), mk_int(b));
    CHECK(match_with_tree(rs, tree, e, true).has_value() == (b == 0));
  }
}
