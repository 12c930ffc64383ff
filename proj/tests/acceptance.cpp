// Acceptance checks; prints one PASS/FAIL line per criterion.
#include "rw/absint.hpp"
#include "rw/bench.hpp"
#include "rw/engine.hpp"
#include "rw/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace rw;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void criterion(int n, const std::string& name, const std::function<Outcome()>& body) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double s = since(t0);
  if (!o.ok) ++failures;
  std::printf("%s %2d %s (%.2fs)%s%s\n", o.ok ? "PASS" : "FAIL", n, name.c_str(), s, o.detail.empty() ? "" : ": ",
              o.detail.c_str());
  std::fflush(stdout);
}

std::vector<Value> valuation(std::mt19937_64& rng, const std::vector<Type>& inputs) {
  std::vector<Value> args;
  for (Type t : inputs) args.push_back(random_value(rng, t));
  return args;
}

// Fastest of 11 timed runs per case after an untimed warm-up. Cases are run
// round-robin so drift in machine load hits all of them alike.
std::vector<double> best_times(const std::string& suite, const std::vector<BenchParams>& ps,
                               std::vector<BenchResult>* keep = nullptr) {
  std::vector<BenchCase> cs;
  for (const BenchParams& p : ps) cs.push_back(BenchCase{suite, p, Strategy::Engine});
  std::vector<double> best(cs.size(), 1e300);
  std::vector<BenchResult> last(cs.size());
  for (const BenchCase& c : cs) run_bench(c, 1);
  for (int i = 0; i < 11; ++i)
    for (size_t k = 0; k < cs.size(); ++k) {
      last[k] = run_bench(cs[k], 1);
      best[k] = std::min(best[k], last[k].row.wall_time_seconds);
    }
  if (keep) *keep = std::move(last);
  return best;
}

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", x);
  return b;
}

Outcome prefix_sums() {
  RuleSet rs = parse_rules(embedded_rules("prefixsums"));
  ExprP e = parse_term(
      "fun (a b c d : N) => (fun ls => let ls' := combine ls (seq 0 (length ls)) in "
      "let ls'' := map (fun p => fst p * snd p) ls' in "
      "let '(_, r) := fold_left (fun '(acc, l) n => let acc' := acc + n in (acc', acc' :: l)) ls'' (0, []) in r) "
      "[a; b; c; d]",
      rs.registry);
  ExprP expected = parse_term(
      "fun (a b c d : N) => let acc := b + c * 2 in let acc' := acc + d * 3 in [acc'; acc; b; 0]", rs.registry);
  auto t0 = Clock::now();
  ExprP out = rewrite(rs, e);
  double s = since(t0);
  if (!alpha_equal(out, expected)) return {false, "got " + print(out)};
  return {s < 1.0, "rewrite took " + fmt(s) + "s"};
}

Outcome let_lift() {
  RuleSet rs = parse_rules(embedded_rules("letlift"));
  ExprP out = rewrite(rs, parse_term("fun (y : Z) => map (fun x => y + x) (let z := e in [0; 1; z + 1])", rs.registry));
  ExprP expected = parse_term("fun (y : Z) => let z := e in [y; y + 1; y + (z + 1)]", rs.registry);
  return {alpha_equal(out, expected), print(out)};
}

Outcome decision_tree() {
  std::ifstream f(std::string(RW_FIXTURE_DIR) + "/decision_tree_golden.txt");
  if (!f) return {false, "fixture missing"};
  std::stringstream ss;
  ss << f.rdbuf();
  std::string got = dump_tree(*compile_rewrites(parse_rules(embedded_rules("matcher_example"))));
  return {got == ss.str(), got == ss.str() ? "" : "tree differs from fixture"};
}

Outcome denotation() {
  RuleSet rs = prelude();
  auto cr = compile_rules(rs);
  std::mt19937_64 rng(20240601);
  int bad = 0;
  auto t0 = Clock::now();
  for (int i = 0; i < 10000; ++i) {
    RandomTerm rt = random_term(rng);
    Engine eng(cr);
    ExprP out = eng.rewrite_top(rt.term);
    for (int v = 0; v < 3; ++v) {
      auto args = valuation(rng, rt.inputs);
      if (apply_denotation(out, args) != apply_denotation(rt.term, args)) {
        ++bad;
        break;
      }
    }
  }
  double s = since(t0);
  return {bad == 0 && s < 60, std::to_string(bad) + " failures in 10000 terms"};
}

Outcome oracle_agreement() {
  RuleSet rs = prelude();
  auto cr = compile_rules(rs);
  std::mt19937_64 rng(77);
  int agreed = 0, bad = 0, tried = 0;
  while (agreed + bad < 2000) {
    RandomTerm rt = random_term(rng);
    ++tried;
    NaiveResult nr = naive_rewrite(rs, rt.term, 10000);
    if (!nr.converged) continue;
    Engine eng(cr);
    ExprP out = eng.rewrite_top(rt.term);
    bool ok = true;
    for (int v = 0; v < 20 && ok; ++v) {
      auto args = valuation(rng, rt.inputs);
      ok = apply_denotation(out, args) == apply_denotation(nr.expr, args);
    }
    (ok ? agreed : bad)++;
  }
  return {bad == 0, std::to_string(bad) + " disagreements; " + std::to_string(tried) + " terms drawn for 2000 converged"};
}

Outcome sharing() {
  std::vector<BenchResult> rs;
  auto t = best_times("underletsplus0", {{{"n", 500}}, {{"n", 1000}}, {{"n", 2000}}, {{"n", 2500}}, {{"n", 5000}}}, &rs);
  const BenchResult& big = rs.back();
  if (big.row.let_count_out != 5000) return {false, "let_count " + std::to_string(big.row.let_count_out)};
  if (count_plus_zero(big.output) != 0) return {false, "+0 left in output"};
  double r1 = t[1] / t[0], r2 = t[2] / t[1], r3 = t[4] / t[3];
  std::string d = "n=5000 in " + fmt(t[4]) + "s; t(2n)/t(n) = " + fmt(r1) + ", " + fmt(r2) + ", " + fmt(r3);
  return {t[4] < 60 && r1 <= 3 && r2 <= 3 && r3 <= 3, d};
}

Outcome lift_lets_map() {
  const std::vector<std::pair<int, int>> sizes = {{25, 50}, {50, 50}, {50, 100}, {100, 100}};
  std::vector<BenchParams> ps;
  for (auto [n, m] : sizes) ps.push_back({{"n", n}, {"m", m}});
  std::vector<BenchResult> rs;
  auto t = best_times("liftletsmap", ps, &rs);
  for (size_t i = 0; i < sizes.size(); ++i)
    if (rs[i].row.let_count_out != size_t(sizes[i].first) * sizes[i].second)
      return {false, "n*m=" + std::to_string(sizes[i].first * sizes[i].second) + ": let_count " +
                         std::to_string(rs[i].row.let_count_out)};
  for (auto [n, m] : std::vector<std::pair<int, int>>{{1, 1}, {7, 3}, {3, 7}, {10000, 1}, {1, 10000}}) {
    BenchResult r = run_bench(BenchCase{"liftletsmap", {{"n", n}, {"m", m}}, Strategy::Engine}, 1);
    if (r.row.let_count_out != size_t(n) * m)
      return {false, "n=" + std::to_string(n) + " m=" + std::to_string(m) + ": let_count " +
                         std::to_string(r.row.let_count_out)};
  }
  bool ok = true;
  std::string d = "t(2nm)/t(nm) =";
  for (size_t i = 1; i < t.size(); ++i) {
    ok = ok && t[i] / t[i - 1] <= 3;
    d += " " + fmt(t[i] / t[i - 1]);
  }
  return {ok, d + "; n*m=10000 in " + fmt(t.back()) + "s"};
}

Outcome side_conditions() {
  RuleSet rs = parse_rules(embedded_rules("sidecond"));
  std::string a = print(rewrite(rs, parse_term("fun (x : Z) => x / 8", rs.registry)));
  std::string b = print(rewrite(rs, parse_term("fun (x : Z) => x / 7", rs.registry)));
  return {a == "λ (x : Z) . x >> 3" && b == "λ (x : Z) . x / 7", a + " | " + b};
}

Outcome bounds_rule() {
  RuleSet rs = parse_rules(embedded_rules("bounds"));
  auto fires = [&](const Int& u) {
    Stats st;
    rewrite(rs, parse_term("fun (n : Z) => add_with_carry64 (clip_{0, " + u.str() + "} n) 0", rs.registry), {}, &st);
    return st.rule_firings > 0;
  };
  if (!fires(pow2(64) - 1) || fires(pow2(64)) || fires(pow2(65))) return {false, "bounds rule fired at the wrong u"};

  Registry reg;
  for (const IdentFamily* f : idents::all()) reg.add(f);
  std::mt19937_64 rng(4242);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    RandomTerm rt = random_term(rng);
    AbstractEnv env;
    std::vector<std::optional<Bounds>> ranges;
    ExprP body = rt.term;
    for (Type t : rt.inputs) {
      std::optional<Bounds> b;
      if (t == ty::Int() || t == ty::Nat()) {
        Int lo = t == ty::Nat() ? Int(rng() % 50) : Int(long(rng() % 400) - 200);
        b = Bounds{lo, lo + 1 + Int(rng() % 64)};
        env[body->binder.id] = *b;
      }
      ranges.push_back(b);
      body = body->a;
    }
    AbsintOptions o;
    o.clip_constants = i % 2;
    ExprP c = infer_and_clip(rt.term, env, o);
    auto args = valuation(rng, rt.inputs);
    for (size_t k = 0; k < args.size(); ++k)
      if (ranges[k]) args[k] = Value::number(ranges[k]->lower + Int(rng() % (ranges[k]->upper - ranges[k]->lower).convert_to<unsigned long>()));
    if (typecheck(c, reg) != rt.term->type || apply_denotation(c, args) != apply_denotation(rt.term, args)) ++bad;
  }
  return {bad == 0, "fires only at u = 2^64-1; " + std::to_string(bad) + " absint failures in 10000"};
}

Outcome sieve() {
  auto t0 = Clock::now();
  Value v = full_eval(gen_sieve(100));
  double s = since(t0);
  std::vector<Int> got;
  for (const Value& x : v.list_items()) got.push_back(x.num);
  bool ok = got == trial_division_primes(100) && got.size() == 25 && s < 10;
  return {ok, std::to_string(got.size()) + " primes in " + fmt(s) + "s"};
}

}  // namespace

int main() {
  run_deep([] {
    criterion(1, "prefixSums golden", prefix_sums);
    criterion(2, "let-lifting golden", let_lift);
    criterion(3, "decision-tree golden", decision_tree);
    criterion(4, "denotation preservation", denotation);
    criterion(5, "oracle agreement", oracle_agreement);
    criterion(6, "underletsplus0 sharing and scaling", sharing);
    criterion(7, "liftletsmap let count and scaling", lift_lets_map);
    criterion(8, "side conditions", side_conditions);
    criterion(9, "bounds rule and absint soundness", bounds_rule);
    criterion(10, "sieve", sieve);
  });
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
