#include "rw/absint.hpp"
#include "rw/engine.hpp"
#include "rw/oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace rw;

namespace {

const Ident* z(const std::string& fam) { return idents::instantiate(idents::get(fam), {ty::Int()}); }

Bounds B(long l, long u) { return Bounds{l, u}; }

Registry all_idents() {
  Registry r;
  for (const IdentFamily* f : idents::all()) r.add(f);
  return r;
}

Int pick(std::mt19937_64& rng, const Bounds& b) {
  Int width = b.upper - b.lower;
  if (width > 1000) {
    switch (rng() % 3) {
      case 0: return b.lower;
      case 1: return b.upper - 1;
      default: return b.lower + Int(rng() % 1000);
    }
  }
  return b.lower + Int(rng() % width.convert_to<unsigned long>());
}

Bounds random_bounds(std::mt19937_64& rng) {
  static const long edges[] = {-300, -17, -1, 0, 1, 2, 5, 8, 64, 255, 1000};
  long a = edges[rng() % 11] + long(rng() % 5);
  long w = 1 + long(rng() % 40);
  if (rng() % 8 == 0) return Bounds{Int(a), pow2(64) + a};
  return Bounds{a, a + w};
}

}  // namespace

TEST_CASE("interval transfer examples") {
  CHECK(transfer(z("add"), {B(0, 8), B(0, 4)}) == B(0, 11));
  CHECK(transfer(z("mul"), {B(2, 4), B(3, 5)}) == B(6, 13));
  CHECK(transfer(z("sub"), {B(0, 8), B(0, 4)}) == B(-3, 8));
  CHECK(transfer(z("mul"), {B(-2, 3), B(-1, 2)}) == B(-2, 3));
  CHECK_FALSE(transfer(z("add"), {B(0, 8), std::nullopt}));
  CHECK(transfer(idents::clip(0, 8), {std::nullopt}) == B(0, 8));
  CHECK(transfer(idents::clip(0, 8), {B(2, 4)}) == B(2, 4));
  CHECK(transfer(idents::clip(0, 8), {B(-5, 100)}) == B(0, 8));
  CHECK(show(B(0, 11)) == "[0,11)");
  CHECK(Bounds::closed(0, 10) == B(0, 11));
  CHECK(Bounds::singleton(3) == B(3, 4));
}

TEST_CASE("interval transfer is sound") {
  std::mt19937_64 rng(17);
  const std::vector<std::string> binary = {"add", "sub", "mul", "div", "modulo", "shiftr", "land", "lor", "min", "max"};
  size_t checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::string& op = binary[rng() % binary.size()];
    Bounds a = random_bounds(rng), b = random_bounds(rng);
    auto r = transfer(z(op), {a, b});
    if (!r) continue;
    const Ident* id = z(op);
    for (int s = 0; s < 10; ++s) {
      Int x = pick(rng, a), y = pick(rng, b);
      Value v = id->fam->sem(*id, {Value::number(x), Value::number(y)});
      INFO(op << " " << show(a) << " " << show(b) << " -> " << show(*r) << " at " << x << ", " << y);
      CHECK(r->contains(v.num));
      ++checked;
    }
  }
  CHECK(checked > 10000);
}

TEST_CASE("clip insertion") {
  Registry reg = all_idents();
  ExprP e = parse_term("fun (x y : Z) => let t := x + y in (t, clip_{0,8} x, 3 + 4)", reg);
  auto named = parse_bounds_file("x in [0, 8)\ny in [0, 4)\n");
  AbstractEnv env = resolve_bounds(e, named);
  ExprP c = infer_and_clip(e, env);
  CHECK(print(c) ==
        "λ (x : Z) (y : Z) . let t := clip_{0,8} x + clip_{0,4} y in ((clip_{0,11} t, clip_{0,8} x), 3 + 4)");
  CHECK(alpha_equal(infer_and_clip(c, resolve_bounds(c, named)), c));
  AbsintOptions o;
  o.clip_constants = true;
  CHECK(print(infer_and_clip(e, env, o)).find("clip_{3,4} 3") != std::string::npos);
  CHECK(alpha_equal(infer_and_clip(e, {}), e));
}

TEST_CASE("infer_bounds") {
  Registry reg = all_idents();
  ExprP e = parse_term("clip_{0,8} x * 2 + 1", reg);
  CHECK(infer_bounds(e, {}) == B(1, 16));
  CHECK_FALSE(infer_bounds(parse_term("x + 1", reg), {}));
  CHECK(infer_bounds(parse_term("x + 1", reg), {{free_var("x").id, B(0, 2)}}) == B(1, 3));
}

TEST_CASE("bounds file parsing") {
  auto b = parse_bounds_file("# inputs\nx in [0, 2^64)\n\n-- carry\nc in [0, 2)\nw in [-2^63, 2^63 - 1)\n");
  REQUIRE(b.size() == 3);
  CHECK(b[0].first == "x");
  CHECK(b[0].second == Bounds{0, pow2(64)});
  CHECK(b[2].second == Bounds{-pow2(63), pow2(63) - 1});
  auto kind = [](const std::string& s) {
    try {
      parse_bounds_file(s);
    } catch (const ParseError& e) {
      return e.kind;
    }
    return std::string();
  };
  CHECK(kind("x in [3, 3)") == "EmptyInterval");
  CHECK(kind("x in [0, 3]") == "SyntaxError");
  CHECK(kind("x [0, 3)") == "SyntaxError");
}

TEST_CASE("bounds rule fires exactly below 2^64") {
  RuleSet rs = parse_rules(embedded_rules("bounds"));
  auto fires = [&](const Int& u) {
    ExprP e = parse_term("fun (n : Z) => add_with_carry64 (clip_{0, " + u.str() + "} n) 0", rs.registry);
    Stats st;
    rewrite(rs, e, {}, &st);
    return st.rule_firings > 0;
  };
  CHECK(fires(pow2(64) - 1));
  CHECK_FALSE(fires(pow2(64)));
  CHECK_FALSE(fires(pow2(65)));
  CHECK(print(rewrite(rs, parse_term("fun (n : Z) => clip_{0,1} n", rs.registry))) == "λ (n : Z) . 0");
}

TEST_CASE("clip insertion preserves denotation inside the bounds") {
  std::mt19937_64 rng(23);
  Registry reg = all_idents();
  int cases = 0;
  while (cases < 10000) {
    RandomTerm rt = random_term(rng, GenConfig{30, 3});
    if (rt.term->kind != EK::Abs) continue;
    AbstractEnv env;
    std::vector<Bounds> ranges;
    ExprP body = rt.term;
    for (Type t : rt.inputs) {
      Bounds b = random_bounds(rng);
      if (t == ty::Nat() && b.lower < 0) b = Bounds{0, b.upper - b.lower};
      ranges.push_back(b);
      if (t == ty::Int() || t == ty::Nat()) env[body->binder.id] = b;
      body = body->a;
    }
    AbsintOptions o;
    o.clip_constants = rng() % 2;
    ExprP c = infer_and_clip(rt.term, env, o);
    INFO(print(rt.term) << "\n=> " << print(c));
    REQUIRE(typecheck(c, reg) == rt.term->type);
    std::vector<Value> args;
    for (size_t i = 0; i < rt.inputs.size(); ++i) {
      Type t = rt.inputs[i];
      args.push_back(t == ty::Int() || t == ty::Nat() ? Value::number(pick(rng, ranges[i])) : random_value(rng, t));
    }
    CHECK(apply_denotation(c, args) == apply_denotation(rt.term, args));
    CHECK(alpha_equal(infer_and_clip(c, env, o), c));
    ++cases;
  }
}
