#include "rw/bench.hpp"
#include "rw/oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

using namespace rw;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  size_t at = 0;
  while (at < s.size()) {
    size_t nl = s.find("\r\n", at);
    REQUIRE(nl != std::string::npos);
    out.push_back(s.substr(at, nl - at));
    at = nl + 2;
  }
  return out;
}

// Fastest of 9 runs per size, sizes interleaved.
std::vector<double> best_times(const std::string& suite, const std::vector<BenchParams>& ps) {
  std::vector<double> best(ps.size(), 1e300);
  for (const BenchParams& p : ps) run_bench(BenchCase{suite, p, Strategy::Engine}, 1);
  for (int i = 0; i < 9; ++i)
    for (size_t k = 0; k < ps.size(); ++k)
      best[k] = std::min(best[k], run_bench(BenchCase{suite, ps[k], Strategy::Engine}, 1).row.wall_time_seconds);
  return best;
}

}  // namespace

TEST_CASE("generator shapes") {
  CHECK(print(gen_plus0tree(0, 1)) == "v + v + 0");
  CHECK(print(gen_plus0tree(1, 1)) == "v + v + 0 + (v + v + 0) + 0");
  CHECK(print(gen_plus0tree(0, 0)) == "v + v");
  CHECK(print(gen_underletsplus0(0)) == "v0 + v0 + 0");
  CHECK(print(gen_underletsplus0(1)) == "let v1 := v0 + v0 + 0 in v1 + v1 + 0");
  CHECK(metrics(gen_underletsplus0(2)).let_count == 2);
  CHECK(print(gen_liftletsmap(2, 1)).find("nat_rect") != std::string::npos);
  CHECK_THROWS_AS(gen_plus0tree(-1, 0), std::invalid_argument);
  CHECK_THROWS_AS(gen_sieve(1), std::invalid_argument);
}

TEST_CASE("generators place the expected number of +0 sites") {
  CHECK(count_plus_zero(gen_plus0tree(3, 4)) == 60);
  CHECK(count_plus_zero(gen_underletsplus0(7)) == 8);
  CHECK(count_plus_zero(gen_plus0tree(4, 0)) == 0);
}

TEST_CASE("sieve output") {
  std::vector<Int> p;
  for (const Value& v : full_eval(gen_sieve(30)).list_items()) p.push_back(v.num);
  REQUIRE(p.size() == 10);
  CHECK(p.back() == 29);
  CHECK(p == trial_division_primes(30));
}

TEST_CASE("bench rows") {
  BenchRow r = run_bench(BenchCase{"plus0tree", parse_params("n=3,m=4"), Strategy::Engine}, 3).row;
  CHECK(r.suite == "plus0tree");
  CHECK(r.params == "m=4,n=3");
  CHECK(r.strategy == "engine");
  CHECK(r.rewrite_firings == 60);
  CHECK(r.node_count_in > r.node_count_out);
  CHECK_FALSE(r.timed_out);

  BenchRow u = run_bench(BenchCase{"underletsplus0", parse_params("n=5"), Strategy::Engine}, 1).row;
  CHECK(u.let_count_out == 5);

  BenchResult o = run_bench(BenchCase{"plus0tree", parse_params("n=2,m=2"), Strategy::Oracle}, 1);
  CHECK(o.row.strategy == "oracle");
  CHECK(count_plus_zero(o.output) == 0);

  BenchResult lm = run_bench(BenchCase{"liftletsmap", parse_params("n=3,m=4"), Strategy::Engine}, 1);
  CHECK(lm.row.let_count_out == 12);

  BenchResult sv = run_bench(BenchCase{"sieve", parse_params("limit=30"), Strategy::Engine}, 1);
  CHECK(full_eval(sv.output) == full_eval(gen_sieve(30)));
}

TEST_CASE("bench rejects bad input") {
  CHECK_THROWS_AS(parse_strategy("fast"), std::invalid_argument);
  CHECK_THROWS_AS(parse_params("n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_params("n=x"), std::invalid_argument);
  CHECK_THROWS_AS(gen_case(BenchCase{"nosuch", {}, Strategy::Engine}), std::invalid_argument);
  CHECK_THROWS_AS(gen_case(BenchCase{"plus0tree", {{"n", 2}}, Strategy::Engine}), std::invalid_argument);
  CHECK_THROWS_AS(run_bench(BenchCase{"plus0tree", {{"n", 1}, {"m", 1}}, Strategy::Engine}, 0),
                  std::invalid_argument);
}

TEST_CASE("CSV output") {
  std::ostringstream empty;
  emit_csv(empty, {});
  CHECK(lines(empty.str()) == std::vector<std::string>{csv_header()});

  BenchRow a{"plus0tree", "m=1,n=2", "engine", 0.5, 10, 3, 0, 7, false};
  BenchRow b{"sieve", "limit=10", "oracle", 1.0 / 3, 5, 5, 2, 1, true};
  std::ostringstream out;
  emit_csv(out, {a, b});
  auto ls = lines(out.str());
  REQUIRE(ls.size() == 3);
  CHECK(ls[0] == "suite,params,strategy,wall_time_seconds,node_count_in,node_count_out,let_count_out,rewrite_firings,timed_out");
  CHECK(ls[1] == "plus0tree,\"m=1,n=2\",engine,0.500000,10,3,0,7,false");
  CHECK(ls[2] == "sieve,limit=10,oracle,0.333333,5,5,2,1,true");
  BenchRow q{"s\"x", "p", "engine", 0, 0, 0, 0, 0, false};
  CHECK(csv_line(q).rfind("\"s\"\"x\",p,", 0) == 0);
}

TEST_CASE("underletsplus0 scales near-linearly") {
  auto t = best_times("underletsplus0", {{{"n", 500}}, {{"n", 1000}}, {{"n", 2000}}});
  INFO(t[0] << " " << t[1] << " " << t[2]);
  CHECK(t[1] / t[0] <= 3.0);
  CHECK(t[2] / t[1] <= 3.0);
}
