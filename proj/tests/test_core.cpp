#include "rw/eval.hpp"
#include "rw/oracle.hpp"
#include "rw/syntax.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

using namespace rw;

namespace {

Registry all_idents() {
  Registry r;
  for (const IdentFamily* f : idents::all()) r.add(f);
  return r;
}

ExprP term(const std::string& s) { return parse_term(s, all_idents()); }

std::string error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.kind;
  } catch (const TypeError& e) {
    return e.kind;
  }
  return "";
}

}  // namespace

TEST_CASE("typecheck infers types of small terms") {
  Registry reg = all_idents();
  CHECK(show(typecheck(term("fun (x : Z) => x + 0"), reg)) == "Z -> Z");
  CHECK(show(typecheck(term("fst (1, 2)"), reg)) == "Z");
  CHECK(error_kind([] { term("(fun (x : Z) => x) true"); }) == "TypeMismatch");
}

TEST_CASE("typecheck rejects identifiers outside the registry") {
  ExprP e = term("1 + 2");
  CHECK_THROWS_AS(typecheck(e, Registry()), TypeError);
  CHECK(error_kind([&] { typecheck(e, Registry()); }) == "UnknownIdent");
}

TEST_CASE("denote follows call-by-value semantics") {
  CHECK(denote(term("let x := 3 in x * x")) == Value::number(9));
  CHECK(denote(term("fst (1, 2)")) == Value::number(1));
  ExprP e = term("(fun f x y => f x y) (+) z 0");
  BinderId z = free_var("z");
  CHECK(denote(e, {{z.id, Value::number(7)}}) == Value::number(7));
  CHECK(denote(term("fold_left (fun a b => a + b) [1; 2; 3] 0")) == Value::number(6));
  CHECK(denote(term("nat_rect 0 (fun k acc => acc + k) 4")) == Value::number(6));
}

TEST_CASE("denote performs no syntactic substitution") {
  size_t before = substitution_count();
  denote(term("let x := 3 in (fun y => x + y) 4"));
  denote(term("map (fun x => x * 2) (seq 0 10)"));
  CHECK(substitution_count() == before);
}

TEST_CASE("Nat arithmetic truncates at zero and Nat literals are nonnegative") {
  CHECK(denote(term("(3 : N) - 5")) == Value::number(0));
  CHECK_THROWS(mk_nat(-1));
}

TEST_CASE("clip is the identity in range and saturates outside") {
  CHECK(clip_semantics(0, pow2(64), 5) == 5);
  CHECK(clip_semantics(0, 8, 7) == 7);
  CHECK(clip_semantics(0, 8, 9) == 7);
  CHECK(clip_semantics(0, 8, -3) == 0);
  CHECK(denote(term("clip_{0,8} 9")) == Value::number(7));
  CHECK(idents::clip(0, 8) != idents::clip(0, 9));
  CHECK(idents::clip(0, 8) == idents::clip(0, 8));
}

TEST_CASE("alpha equality") {
  CHECK(alpha_equal(term("fun (x : Z) => x"), term("fun (y : Z) => y")));
  CHECK_FALSE(alpha_equal(term("fun (x : Z) => x + 0"), term("fun (x : Z) => x")));
  CHECK(alpha_equal(term("let a := e + 1 in a"), term("let b := e + 1 in b")));
  CHECK_FALSE(alpha_equal(term("fun (x y : Z) => x"), term("fun (x y : Z) => y")));
}

TEST_CASE("metrics") {
  CHECK(metrics(term("let x := 1 in x")).let_count == 1);
  CHECK(metrics(term("5 + 0")).node_count == 3);
  Metrics m = metrics(term("fun (x : Z) => let y := x in fun (z : Z) => y"));
  CHECK(m.let_count == 1);
  CHECK(m.max_binder_depth == 3);
}

TEST_CASE("fresh binders are distinct") {
  std::set<uint64_t> ids;
  for (int i = 0; i < 10000; ++i) ids.insert(fresh_binder().id);
  CHECK(ids.size() == 10000);
}

TEST_CASE("substitution avoids capture") {
  // (fun y => x + y)[x := y] must not capture the free y.
  ExprP body = term("fun (y : Z) => x + y");
  ExprP y = mk_var(free_var("y"), ty::Int());
  ExprP r = substitute(body, free_var("x"), y);
  BinderId yb = free_var("y");
  Value f = denote(r, {{yb.id, Value::number(10)}});
  CHECK(f.apply(Value::number(1)) == Value::number(11));
}

TEST_CASE("printing round-trips through the parser") {
  for (const char* s : {"fun (x : Z) => x + 0", "let x := 3 in x * x", "[1; 2] ++ [3]",
                        "fun (a : N) => a - 5", "x + y", "fun (p : Z * Z) => fst p", "clip_{0,8} 9",
                        "fun (l : list Z) => map (fun (x : Z) => x * 2) l", "Some true", "(1, (2, 3))"}) {
    ExprP e = term(s);
    CHECK(alpha_equal(e, term(print(e, {true}))));
  }
}

TEST_CASE("value_to_expr inverts denote on first-order values") {
  for (const char* s : {"[1; 2; 3]", "(1, true)", "Some [0]", "seq 2 3"}) {
    ExprP e = term(s);
    Value v = denote(e);
    CHECK(denote(value_to_expr(v, e->type)) == v);
  }
}

TEST_CASE("alpha_equal is an equivalence and denote respects it") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    RandomTerm t = random_term(rng);
    ExprP f = freshen(t.term);
    CHECK(alpha_equal(t.term, t.term));
    CHECK(alpha_equal(t.term, f));
    CHECK(alpha_equal(f, t.term));
    std::vector<Value> args;
    for (Type ty : t.inputs) args.push_back(random_value(rng, ty));
    CHECK(apply_denotation(t.term, args) == apply_denotation(f, args));
  }
}
