#include "rw/bench.hpp"

#include "rw/eval.hpp"
#include "rw/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rw {

namespace {

ExprP plus(const ExprP& a, const ExprP& b) {
  static const Ident* add = idents::instantiate(idents::add(), {ty::Int()});
  return mk_app(mk_app(mk_ident(add), a), b);
}

ExprP iter_plus0(ExprP x, int m) {
  for (int i = 0; i < m; ++i) x = plus(x, mk_int(0));
  return x;
}

}  // namespace

ExprP gen_plus0tree(int n, int m) {
  if (n < 0 || m < 0) throw std::invalid_argument("plus0tree: n and m must be nonnegative");
  ExprP v = mk_var(free_var("v"), ty::Int());
  ExprP t = iter_plus0(plus(v, v), m);
  for (int i = 0; i < n; ++i) t = iter_plus0(plus(t, t), m);
  return t;
}

ExprP gen_underletsplus0(int n) {
  if (n < 0) throw std::invalid_argument("underletsplus0: n must be nonnegative");
  std::vector<BinderId> vs{free_var("v0")};
  for (int k = 1; k <= n; ++k) vs.push_back(fresh_binder(intern_name("v" + std::to_string(k))));
  auto step = [&](int k) {
    ExprP x = mk_var(vs[k], ty::Int());
    return plus(plus(x, x), mk_int(0));
  };
  ExprP body = step(n);
  for (int k = n; k >= 1; --k) body = mk_let(vs[k], step(k - 1), body);
  return body;
}

ExprP gen_liftletsmap(int n, int m) {
  if (n < 1 || m < 1) throw std::invalid_argument("liftletsmap: n and m must be positive");
  RuleSet rs = suite_rules("liftletsmap");
  ExprP f = parse_term(
      "fun (l0 : list Z) => nat_rect l0 (fun _ (l : list Z) => list_rect [] (fun h _ r => let y := h + h in y :: r) l) " +
          std::to_string(m),
      rs.registry);
  ExprP v = mk_var(free_var("v"), ty::Int());
  return substitute(f->a, f->binder, mk_list(ty::Int(), std::vector<ExprP>(n, v)));
}

std::string sieve_source(int limit) {
  std::string L = std::to_string(limit);
  return "rev (fst (fst (nat_rect (([], []), 2)\n"
         "  (fun _ st =>\n"
         "    let '(pc, np) := st in\n"
         "    let '(primes, comps) := pc in\n"
         "    if (" + L + " < np) || fold_right (fun c acc => (c == np) || acc) false comps\n"
         "    then ((primes, comps), S np)\n"
         "    else ((np :: primes,\n"
         "           fold_right\n"
         "             (fun x ys => list_rect [x]\n"
         "                (fun y ys' r => if x < y then x :: y :: ys' else if x == y then y :: ys' else y :: r) ys)\n"
         "             comps (map (fun n => S n * np) (seq 0 (" + L + " / np)))),\n"
         "          S np))\n"
         "  " + L + ")))";
}

ExprP gen_sieve(int limit) {
  if (limit < 2) throw std::invalid_argument("sieve: limit must be at least 2");
  return parse_term(sieve_source(limit), suite_rules("sieve").registry);
}

std::vector<Int> trial_division_primes(int limit) {
  std::vector<Int> out;
  for (int k = 2; k <= limit; ++k) {
    bool prime = true;
    for (int d = 2; d * d <= k && prime; ++d) prime = k % d != 0;
    if (prime) out.push_back(k);
  }
  return out;
}

RuleSet suite_rules(const std::string& suite) {
  if (suite == "plus0tree" || suite == "underletsplus0") return parse_rules(embedded_rules("plus0"));
  if (suite == "liftletsmap") return parse_rules(embedded_rules("liftletsmap"));
  if (suite == "sieve") return parse_rules(embedded_rules("sieve"));
  throw std::invalid_argument("unknown suite: " + suite);
}

std::string to_string(Strategy s) { return s == Strategy::Engine ? "engine" : "oracle"; }

Strategy parse_strategy(const std::string& s) {
  if (s == "engine") return Strategy::Engine;
  if (s == "oracle") return Strategy::Oracle;
  throw std::invalid_argument("unknown strategy: " + s);
}

BenchParams parse_params(const std::string& s) {
  BenchParams p;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
    if (item.empty()) continue;
    size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("bad parameter: " + item);
    try {
      size_t used = 0;
      long v = std::stol(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
      p[item.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad parameter value: " + item);
    }
  }
  return p;
}

std::string show_params(const BenchParams& p) {
  std::string s;
  for (const auto& [k, v] : p) s += (s.empty() ? "" : ",") + k + "=" + std::to_string(v);
  return s;
}

namespace {

int param(const BenchCase& c, const std::string& k) {
  auto it = c.params.find(k);
  if (it == c.params.end()) throw std::invalid_argument(c.suite + ": missing parameter " + k);
  if (it->second < 0 || it->second > 1'000'000) throw std::invalid_argument(c.suite + ": parameter out of range: " + k);
  return static_cast<int>(it->second);
}

}  // namespace

ExprP gen_case(const BenchCase& c) {
  if (c.suite == "plus0tree") return gen_plus0tree(param(c, "n"), param(c, "m"));
  if (c.suite == "underletsplus0") return gen_underletsplus0(param(c, "n"));
  if (c.suite == "liftletsmap") return gen_liftletsmap(param(c, "n"), param(c, "m"));
  if (c.suite == "sieve") return gen_sieve(param(c, "limit"));
  throw std::invalid_argument("unknown suite: " + c.suite);
}

BenchResult run_bench(const BenchCase& c, int repeats, double timeout_seconds) {
  if (repeats < 1) throw std::invalid_argument("repeats must be positive");
  RuleSet rs = suite_rules(c.suite);
  ExprP e = gen_case(c);
  auto cr = compile_rules(rs);

  BenchResult res;
  BenchRow& row = res.row;
  row.suite = c.suite;
  row.params = show_params(c.params);
  row.strategy = to_string(c.strategy);
  row.node_count_in = metrics(e).node_count;

  std::vector<double> times;
  for (int i = 0; i < repeats; ++i) {
    ExprP out;
    size_t firings = 0;
    auto t0 = std::chrono::steady_clock::now();
    if (c.strategy == Strategy::Engine) {
      Engine eng(cr);
      out = eng.rewrite_top(e);
      firings = eng.stats().rewrite_firings();
    } else {
      NaiveResult nr;
      run_deep([&] { nr = naive_rewrite(rs, e, 100'000'000); });
      out = nr.expr;
      firings = nr.steps;
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    times.push_back(dt);
    res.output = out;
    row.rewrite_firings = firings;
    if (dt > timeout_seconds) {
      row.timed_out = true;
      break;
    }
  }
  std::sort(times.begin(), times.end());
  row.wall_time_seconds = times[times.size() / 2];
  Metrics mo = metrics(res.output);
  row.node_count_out = mo.node_count;
  row.let_count_out = mo.let_count;
  return res;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

}  // namespace

std::string csv_header() {
  return "suite,params,strategy,wall_time_seconds,node_count_in,node_count_out,let_count_out,rewrite_firings,timed_out";
}

std::string csv_line(const BenchRow& r) {
  char t[64];
  std::snprintf(t, sizeof t, "%.6f", r.wall_time_seconds);
  return csv_field(r.suite) + "," + csv_field(r.params) + "," + csv_field(r.strategy) + "," + t + "," +
         std::to_string(r.node_count_in) + "," + std::to_string(r.node_count_out) + "," +
         std::to_string(r.let_count_out) + "," + std::to_string(r.rewrite_firings) + "," +
         (r.timed_out ? "true" : "false");
}

void emit_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << csv_header() << "\r\n";
  for (const BenchRow& r : rows) out << csv_line(r) << "\r\n";
}

void emit_csv(const std::string& path, const std::vector<BenchRow>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  emit_csv(f, rows);
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace rw
