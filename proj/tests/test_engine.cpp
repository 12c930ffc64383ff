#include "rw/bench.hpp"
#include "rw/engine.hpp"
#include "rw/oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace rw;

namespace {

const char* kPrefixSums =
    "fun (a b c d : N) => (fun ls => let ls' := combine ls (seq 0 (length ls)) in "
    "let ls'' := map (fun p => fst p * snd p) ls' in "
    "let '(_, r) := fold_left (fun '(acc, l) n => let acc' := acc + n in (acc', acc' :: l)) ls'' (0, []) in r) "
    "[a; b; c; d]";

ExprP run(const std::string& rules, const std::string& src, Stats* st = nullptr,
          std::optional<size_t> fuel = std::nullopt, EngineOptions o = {}) {
  RuleSet rs = parse_rules(embedded_rules(rules));
  return rewrite(rs, parse_term(src, rs.registry), o, st, fuel);
}

bool beta_normal(const ExprP& e) {
  if (e->kind == EK::App && e->a->kind == EK::Abs) return false;
  return (!e->a || beta_normal(e->a)) && (!e->b || beta_normal(e->b));
}

Registry all_idents() {
  Registry r;
  for (const IdentFamily* f : idents::all()) r.add(f);
  return r;
}

}  // namespace

TEST_CASE("prefixSums golden") {
  RuleSet rs = parse_rules(embedded_rules("prefixsums"));
  Stats st;
  ExprP out = rewrite(rs, parse_term(kPrefixSums, rs.registry), {}, &st);
  ExprP expected = parse_term(
      "fun (a b c d : N) => let acc := b + c * 2 in let acc' := acc + d * 3 in [acc'; acc; b; 0]", rs.registry);
  CHECK(alpha_equal(out, expected));
  CHECK(st.passes >= 1);
}

TEST_CASE("let-lifting golden") {
  ExprP out = run("letlift", "fun (y : Z) => map (fun x => y + x) (let z := e in [0; 1; z + 1])");
  RuleSet rs = parse_rules(embedded_rules("letlift"));
  ExprP expected = parse_term("fun (y : Z) => let z := e in [y; y + 1; y + (z + 1)]", rs.registry);
  CHECK(alpha_equal(out, expected));
}

TEST_CASE("side-condition and bounds rules") {
  CHECK(print(run("sidecond", "fun (x : Z) => x / 8")) == "λ (x : Z) . x >> 3");
  CHECK(print(run("sidecond", "fun (x : Z) => x / 7")) == "λ (x : Z) . x / 7");
  CHECK(print(run("sidecond", "3 + 4")) == "7");
  EngineOptions nodelta;
  nodelta.delta = false;
  CHECK(print(run("sidecond", "3 + 4", nullptr, std::nullopt, nodelta)) == "3 + 4");
  CHECK(print(run("prelude", "let x := 3 in x + x")) == "6");
}

TEST_CASE("reflect and reify") {
  RuleSet rs = parse_rules(embedded_rules("plus0"));
  Engine eng(compile_rules(rs));
  Telescope tele;
  ExprP e = parse_term("x + 0", rs.registry);
  SemValue v = eng.reflect(e, ty::Int(), tele);
  CHECK(tele.empty());
  CHECK(print(eng.reify(v, ty::Int())) == "x");
  CHECK(eng.stats().rule_firings == 1);

  ExprP lit = mk_int(5);
  CHECK(alpha_equal(eng.reify(SemValue::of(lit), ty::Int()), lit));

  size_t before = eng.stats().eta_expansions;
  Type zz = ty::arrow(ty::Int(), ty::Int());
  ExprP f = mk_var(free_var("f"), zz);
  SemValue fv = eng.reflect(f, zz, tele);
  CHECK(fv.is_fn());
  ExprP back = eng.reify(fv, zz);
  CHECK(back->kind == EK::Abs);
  CHECK(eng.stats().eta_expansions > before);
}

TEST_CASE("rewrite_head performs at most one root step") {
  RuleSet rs = parse_rules(embedded_rules("plus0"));
  Engine eng(compile_rules(rs));
  ExprP e = parse_term("x + 0 + 0", rs.registry);
  CHECK(print(eng.rewrite_head(e).to_expr()) == "x + 0");
  ExprP y = parse_term("x + 1", rs.registry);
  CHECK(alpha_equal(eng.rewrite_head(y).to_expr(), y));
}

TEST_CASE("eliminators unroll on concrete spines") {
  RuleSet rs = prelude();
  Stats st;
  ExprP out = rewrite(rs, parse_term("list_rect 0 (fun h t r => h + r) [1; 2; 3]", rs.registry), {}, &st);
  CHECK(print(out) == "6");
  CHECK(st.eager_unrolls > 0);

  ExprP sym = rewrite(rs, parse_term("fun (a b : Z) => list_rect 0 (fun h t r => h + r) [a; b]", rs.registry));
  CHECK(print(sym) == "λ (a : Z) (b : Z) . a + b");

  Engine eng(compile_rules(rs));
  const Ident* nr = idents::instantiate(idents::get("nat_rect"), {ty::Int()});
  std::vector<SemValue> args{SemValue::of(mk_int(1)),
                             SemValue::function(ty::arrow(ty::Nat(), ty::arrow(ty::Int(), ty::Int())),
                                                [](Telescope&, const SemValue& k) {
                                                  return SemValue::function(
                                                      ty::arrow(ty::Int(), ty::Int()),
                                                      [](Telescope&, const SemValue& acc) { return acc; });
                                                }),
                             SemValue::of(mk_nat(3))};
  auto u = eng.eager_eval(nr, args);
  REQUIRE(u);
  CHECK(print(u->to_expr()) == "1");
  args[2] = SemValue::of(mk_var(free_var("k"), ty::Nat()));
  CHECK_FALSE(eng.eager_eval(nr, args));
}

TEST_CASE("plus0tree fires once per +0 site") {
  for (auto [n, m] : std::vector<std::pair<int, int>>{{0, 1}, {1, 1}, {3, 4}, {5, 2}}) {
    ExprP e = gen_plus0tree(n, m);
    RuleSet rs = suite_rules("plus0tree");
    Stats st;
    ExprP out = rewrite(rs, e, {}, &st);
    CHECK(st.rule_firings == size_t(m) * ((size_t(1) << (n + 1)) - 1));
    CHECK(count_plus_zero(out) == 0);
  }
}

TEST_CASE("fuel bounds the number of passes") {
  Stats st;
  ExprP out = run("plus0", "fun (v : Z) => v + 0 + 0", &st, 0);
  CHECK(print(out) == "λ (v : Z) . v + 0 + 0");
  CHECK(st.passes == 0);
  for (size_t fuel : {1, 2, 3, 5}) {
    Stats s;
    run("prelude", "fun (l : list Z) => length (map (fun x => x + 1) (1 :: 2 :: l))", &s, fuel);
    CHECK(s.passes <= fuel);
  }
}

TEST_CASE("again rules trigger another pass") {
  Stats st;
  ExprP out = run("prelude", "fun (x y : Z) => length [x; y; x]", &st);
  CHECK(print(out) == "λ (x : Z) (y : Z) . 3");
  CHECK(st.passes >= 2);
}

TEST_CASE("inline heuristic") {
  RuleSet rs = prelude();
  Registry reg = all_idents();
  CHECK(inline_heuristic(mk_int(3)) == InlineDecision::Inline);
  CHECK(inline_heuristic(mk_var(free_var("x"), ty::Int())) == InlineDecision::Inline);
  CHECK(inline_heuristic(parse_term("x + 1", reg)) == InlineDecision::Keep);
  CHECK(inline_heuristic(parse_term("[x + 1; 2]", reg)) == InlineDecision::NameElements);
  EngineOptions keep_all;
  keep_all.inline_hook = [](const ExprP&) { return InlineDecision::Keep; };
  ExprP out = rewrite(rs, parse_term("fun (x : Z) => let y := x in y + 1", rs.registry), keep_all);
  CHECK(metrics(out).let_count == 1);
  CHECK(metrics(rewrite(rs, parse_term("fun (x : Z) => let y := x in y + 1", rs.registry))).let_count == 0);
}

TEST_CASE("shared subterms stay shared") {
  BenchCase c{"underletsplus0", {{"n", 5}}, Strategy::Engine};
  BenchResult r = run_bench(c, 1);
  CHECK(r.row.let_count_out == 5);
  CHECK(count_plus_zero(r.output) == 0);
  CHECK(r.row.rewrite_firings == 6);
}

TEST_CASE("engine output is beta-normal, well typed and preserves denotation") {
  RuleSet rs = prelude();
  auto cr = compile_rules(rs);
  Registry reg = all_idents();
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    RandomTerm rt = random_term(rng);
    Engine eng(cr);
    ExprP out;
    run_deep([&] { out = eng.rewrite_top(rt.term); });
    INFO(print(rt.term) << "\n=> " << print(out));
    CHECK(beta_normal(out));
    CHECK(typecheck(out, reg) == rt.term->type);
    for (int v = 0; v < 3; ++v) {
      std::vector<Value> args;
      for (Type t : rt.inputs) args.push_back(random_value(rng, t));
      CHECK(apply_denotation(out, args) == apply_denotation(rt.term, args));
    }
  }
}

TEST_CASE("interpreted and compiled matchers give the same output") {
  RuleSet rs = prelude();
  std::mt19937_64 rng(99);
  EngineOptions interp;
  interp.compiled_matcher = false;
  for (int i = 0; i < 200; ++i) {
    RandomTerm rt = random_term(rng);
    Stats a, b;
    ExprP x = rewrite(rs, rt.term, {}, &a);
    ExprP y = rewrite(rs, rt.term, interp, &b);
    CHECK(alpha_equal(x, y));
    CHECK(a.rule_firings == b.rule_firings);
  }
}
