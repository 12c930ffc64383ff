#pragma once

#include "rw/engine.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rw {

// Microbenchmark families: plus0tree(n, m), underletsplus0(n),
// liftletsmap(n, m), sieve(limit).
ExprP gen_plus0tree(int n, int m);
ExprP gen_underletsplus0(int n);
ExprP gen_liftletsmap(int n, int m);
ExprP gen_sieve(int limit);
std::string sieve_source(int limit);
std::vector<Int> trial_division_primes(int limit);

// The rule set each suite is rewritten with.
RuleSet suite_rules(const std::string& suite);

enum class Strategy { Engine, Oracle };
std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);  // throws std::invalid_argument

using BenchParams = std::map<std::string, long>;
BenchParams parse_params(const std::string& s);  // "n=3,m=64"
std::string show_params(const BenchParams& p);

struct BenchCase {
  std::string suite;
  BenchParams params;
  Strategy strategy = Strategy::Engine;
};

ExprP gen_case(const BenchCase& c);  // throws std::invalid_argument on bad suite/params

struct BenchRow {
  std::string suite;
  std::string params;
  std::string strategy;
  double wall_time_seconds = 0;  // median over repeats; rewriting only
  size_t node_count_in = 0;
  size_t node_count_out = 0;
  size_t let_count_out = 0;
  size_t rewrite_firings = 0;
  bool timed_out = false;  // a repeat exceeded the budget; later repeats skipped
};

struct BenchResult {
  BenchRow row;
  ExprP output;
};

BenchResult run_bench(const BenchCase& c, int repeats = 5, double timeout_seconds = 60);

std::string csv_header();
std::string csv_line(const BenchRow& r);
void emit_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void emit_csv(const std::string& path, const std::vector<BenchRow>& rows);  // throws on IO errors

}  // namespace rw
