#include "rw/absint.hpp"
#include "rw/bench.hpp"
#include "rw/engine.hpp"
#include "rw/oracle.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace rw;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// A path to a rule file, or the name of a bundled rule set.
RuleSet load_rules(const std::string& which) {
  if (std::filesystem::exists(which)) return parse_rules(read_file(which));
  for (const auto& [name, text] : embedded_rule_files())
    if (name == which) return parse_rules(text);
  throw std::runtime_error("no rule file or bundled rule set named " + which);
}

ExprP load_term(const std::string& path, const std::string& text, const Registry& reg) {
  if (!text.empty()) return parse_term(text, reg);
  if (path.empty()) throw std::runtime_error("give a term with --term FILE or --expr TEXT");
  return parse_term(read_file(path), reg);
}

void print_stats(std::ostream& out, const Stats& s) {
  out << "rule_firings=" << s.rule_firings << " delta_folds=" << s.delta_folds
      << " eager_unrolls=" << s.eager_unrolls << " passes=" << s.passes << "\n";
}

void collect_free_types(const ExprP& e, std::unordered_map<uint64_t, Type>& out) {
  if (e->kind == EK::Var) out.emplace(e->binder.id, e->type);
  if (e->a) collect_free_types(e->a, out);
  if (e->b) collect_free_types(e->b, out);
}

// Lambda-abstracts the free variables of e so it can be applied to values.
// The inputs are the free variables followed by the leading lambda binders.
ExprP close_over(const ExprP& e, std::vector<Type>& inputs) {
  std::unordered_map<uint64_t, Type> types;
  collect_free_types(e, types);
  std::vector<BinderId> fv = free_vars(e);
  ExprP out = e;
  for (size_t i = fv.size(); i-- > 0;) out = mk_abs(fv[i], types.at(fv[i].id), out);
  for (const BinderId& b : fv) inputs.push_back(types.at(b.id));
  for (const Expr* x = e.get(); x->kind == EK::Abs; x = x->a.get()) inputs.push_back(x->type->a);
  return out;
}

struct RewriteArgs {
  std::string rules, term, expr, absint;
  long fuel = -1;
  bool no_delta = false, trace = false, clip_constants = false, dump_tree = false, interpret = false;
};

int cmd_rewrite(const RewriteArgs& a) {
  RuleSet rs = load_rules(a.rules);
  ExprP e = load_term(a.term, a.expr, rs.registry);
  if (a.dump_tree) std::cout << dump_tree(*compile_rewrites(rs));
  if (!a.absint.empty()) {
    AbsintOptions o;
    o.clip_constants = a.clip_constants;
    auto named = parse_bounds_file(read_file(a.absint));
    run_deep([&] { e = infer_and_clip(e, resolve_bounds(e, named), o); });
  }
  EngineOptions opts;
  if (a.no_delta) opts.delta = false;
  opts.trace = a.trace;
  opts.compiled_matcher = !a.interpret;
  Stats st;
  std::optional<size_t> fuel;
  if (a.fuel >= 0) fuel = static_cast<size_t>(a.fuel);
  ExprP out = rewrite(rs, e, opts, &st, fuel);
  std::cout << print(out) << "\n";
  if (a.trace)
    for (const TraceEntry& t : st.trace) std::cerr << "fired " << t.rule << " at " << (t.path.empty() ? "." : t.path) << "\n";
  print_stats(std::cerr, st);
  return 0;
}

int cmd_oracle(const std::string& rules, const std::string& term, const std::string& expr, long fuel, int samples) {
  RuleSet rs = load_rules(rules);
  ExprP e = load_term(term, expr, rs.registry);
  ExprP engine_out = rewrite(rs, e);
  NaiveResult nr;
  run_deep([&] { nr = naive_rewrite(rs, e, static_cast<size_t>(fuel)); });
  std::cout << "engine: " << print(engine_out) << "\n";
  std::cout << "oracle: " << print(nr.expr) << (nr.converged ? "" : "  (fuel exhausted)") << "\n";
  std::cout << "alpha-equal: " << (alpha_equal(engine_out, nr.expr) ? "yes" : "no") << "\n";
  std::vector<Type> inputs;
  ExprP ce = close_over(e, inputs);
  std::vector<Type> unused;
  ExprP cx = close_over(engine_out, unused), co = close_over(nr.expr, unused);
  Type result = e->type;
  for (const Expr* x = e.get(); x->kind == EK::Abs; x = x->a.get()) result = result->b;
  bool first_order = is_base(result);
  for (Type t : inputs) first_order = first_order && is_base(t);
  if (!first_order) {
    std::cout << "denotation: skipped (higher-order input or result)\n";
    return 0;
  }
  std::mt19937_64 rng(1);
  int agree = 0;
  for (int i = 0; i < samples; ++i) {
    std::vector<Value> args;
    for (Type t : inputs) args.push_back(random_value(rng, t));
    Value v0 = apply_denotation(ce, args);
    bool ok = apply_denotation(cx, args) == v0 && (!nr.converged || apply_denotation(co, args) == v0);
    agree += ok;
  }
  std::cout << "denotation: " << agree << "/" << samples << " valuations agree\n";
  return agree == samples ? 0 : 1;
}

int cmd_bench(const std::string& suite, const std::vector<std::string>& params, const std::string& strategy,
              const std::string& csv, int repeats, double timeout) {
  std::vector<BenchRow> rows;
  bool timed_out = false;
  for (const std::string& p : params) {
    BenchCase c{suite, parse_params(p), parse_strategy(strategy)};
    BenchRow r = run_bench(c, repeats, timeout).row;
    std::cout << csv_line(r) << "\n";
    timed_out |= r.timed_out;
    rows.push_back(r);
  }
  if (!csv.empty()) emit_csv(csv, rows);
  return timed_out ? 3 : 0;
}

int cmd_demo(const std::string& which) {
  if (which != "prefixsums") throw std::runtime_error("unknown demo: " + which);
  RuleSet rs = parse_rules(embedded_rules("prefixsums"));
  const std::string src =
      "fun (a b c d : N) =>\n"
      "  (fun ls =>\n"
      "    let ls' := combine ls (seq 0 (length ls)) in\n"
      "    let ls'' := map (fun p => fst p * snd p) ls' in\n"
      "    let '(_, ls''') := fold_left (fun '(acc, ls''') n =>\n"
      "      let acc' := acc + n in (acc', acc' :: ls''')) ls'' (0, []) in ls''')\n"
      "  [a; b; c; d]";
  std::cout << "-- rules\n" << print_rules(rs) << "\n-- input\n" << src << "\n\n";
  ExprP e = parse_term(src, rs.registry);
  EngineOptions opts;
  opts.trace = true;
  Stats st;
  ExprP out = rewrite(rs, e, opts, &st);
  std::cout << "-- rewrites\n";
  for (const TraceEntry& t : st.trace) std::cout << "  " << t.rule << "\n";
  std::cout << "-- output\n" << print(out) << "\n-- stats\n";
  print_stats(std::cout, st);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rw: rewriting by normalization by evaluation"};
  app.require_subcommand(1);

  RewriteArgs ra;
  auto* rwc = app.add_subcommand("rewrite", "Rewrite a term with a rule set");
  rwc->add_option("--rules", ra.rules, "Rule file or bundled rule set name")->required();
  rwc->add_option("--term", ra.term, "File holding the term");
  rwc->add_option("--expr", ra.expr, "Term given inline");
  rwc->add_option("--fuel", ra.fuel, "Maximum number of passes");
  rwc->add_flag("--no-delta", ra.no_delta, "Disable constant folding");
  rwc->add_flag("--trace", ra.trace, "Report each rule firing on stderr");
  rwc->add_option("--absint", ra.absint, "Bounds file; inserts clips before rewriting");
  rwc->add_flag("--clip-constants", ra.clip_constants, "With --absint, also clip integer literals");
  rwc->add_flag("--dump-decision-tree", ra.dump_tree, "Print the compiled matcher first");
  rwc->add_flag("--interpret-tree", ra.interpret, "Walk the decision tree instead of the compiled closures");

  std::string o_rules, o_term, o_expr;
  long o_fuel = 100000;
  int o_samples = 20;
  auto* orc = app.add_subcommand("oracle", "Compare the engine with the reference rewriter");
  orc->add_option("--rules", o_rules, "Rule file or bundled rule set name")->required();
  orc->add_option("--term", o_term, "File holding the term");
  orc->add_option("--expr", o_expr, "Term given inline");
  orc->add_option("--fuel", o_fuel, "Step budget of the reference rewriter");
  orc->add_option("--samples", o_samples, "Random valuations for the denotational check");

  std::string b_suite, b_strategy = "engine", b_csv;
  std::vector<std::string> b_params;
  int b_repeats = 5;
  double b_timeout = 60;
  auto* bench = app.add_subcommand("bench", "Run a microbenchmark suite");
  bench->add_option("--suite", b_suite, "plus0tree, underletsplus0, liftletsmap or sieve")->required();
  bench->add_option("--params", b_params, "Parameters such as \"n=3,m=64\"; repeat for several cases")->required();
  bench->add_option("--strategy", b_strategy, "engine or oracle");
  bench->add_option("--csv", b_csv, "Write rows to this CSV file");
  bench->add_option("--repeats", b_repeats, "Runs per case; the median is reported");
  bench->add_option("--timeout", b_timeout, "Per-run budget in seconds");

  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "Run a worked example");
  demo->add_option("name", demo_name, "prefixsums")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rwc) return cmd_rewrite(ra);
    if (*orc) return cmd_oracle(o_rules, o_term, o_expr, o_fuel, o_samples);
    if (*bench) return cmd_bench(b_suite, b_params, b_strategy, b_csv, b_repeats, b_timeout);
    if (*demo) return cmd_demo(demo_name);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
