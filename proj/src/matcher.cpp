#include "rw/matcher.hpp"

#include "rw/eval.hpp"

#include <algorithm>
#include <sstream>

namespace rw {

RawTerm RawTerm::of(ExprP e) {
  RawTerm r;
  r.kind = Term;
  r.type = e->type;
  r.expr = std::move(e);
  return r;
}

RawTerm RawTerm::spine(const Ident* head, const RawTerm* args, size_t nargs) {
  RawTerm r;
  r.kind = Spine;
  r.head = head;
  r.args = args;
  r.nargs = nargs;
  std::vector<Type> rest(head->params.begin() + static_cast<long>(nargs), head->params.end());
  r.type = ty::arrows(rest, head->result);
  return r;
}

RawTerm RawTerm::opaque(int slot, Type t) {
  RawTerm r;
  r.kind = Opaque;
  r.slot = slot;
  r.type = t;
  return r;
}

bool RawTerm::is_app() const {
  if (kind == Term) return expr->kind == EK::App;
  return kind == Spine && nargs > 0;
}

RawTerm RawTerm::fn() const {
  if (kind == Term) return of(expr->a);
  return spine(head, args, nargs - 1);
}

RawTerm RawTerm::arg() const {
  if (kind == Term) return of(expr->b);
  return args[nargs - 1];
}

const Ident* RawTerm::ident() const {
  if (kind == Term) return expr->kind == EK::IdentRef ? expr->ident : nullptr;
  if (kind == Spine && nargs == 0) return head;
  return nullptr;
}

const Expr* RawTerm::literal() const {
  return kind == Term && expr->kind == EK::Literal ? expr.get() : nullptr;
}

ExprP RawTerm::to_expr() const {
  switch (kind) {
    case Term: return expr;
    case Spine: {
      ExprP e = mk_ident(head);
      for (size_t i = 0; i < nargs; ++i) e = mk_app(e, args[i].to_expr());
      return e;
    }
    case Opaque: break;
  }
  throw std::logic_error("RawTerm::to_expr: opaque subterm");
}

namespace {

bool match_ty(Type pat, Type actual, TypeSubst& s) {
  if (!pat->has_tvar) return pat == actual;
  return match_type(pat, actual, s);
}

struct Matcher {
  const RewriteRule& rule;
  MatchBindings& mb;

  bool go(const Pattern& p, const RawTerm& t) {
    switch (p.k) {
      case Pattern::Wildcard:
        if (!match_ty(rule.vars[p.var].type, t.type, mb.types)) return false;
        mb.terms[p.var] = t;
        return true;
      case Pattern::ConstVar:
        if (!t.literal() || !match_ty(rule.vars[p.var].type, t.type, mb.types)) return false;
        mb.terms[p.var] = t;
        return true;
      case Pattern::Literal: {
        const Expr* l = t.literal();
        return l && l->lit == p.lit && match_ty(p.type, l->type, mb.types);
      }
      case Pattern::Ident: {
        const Ident* id = t.ident();
        if (!id || id->fam != p.fam) return false;
        for (size_t i = 0; i < p.targs.size(); ++i)
          if (!match_ty(p.targs[i], id->targs[i], mb.types)) return false;
        if (p.fam == idents::clip_family()) {
          if (p.lo_var >= 0) mb.terms[p.lo_var] = RawTerm::of(mk_int(id->lo));
          else if (p.lo != id->lo) return false;
          if (p.hi_var >= 0) mb.terms[p.hi_var] = RawTerm::of(mk_int(id->hi));
          else if (p.hi != id->hi) return false;
        }
        return true;
      }
      case Pattern::App:
        return t.is_app() && go(*p.fn, t.fn()) && go(*p.arg, t.arg());
    }
    return false;
  }
};

Value literal_value(const Expr* e) {
  switch (e->type->kind) {
    case TK::Bool: return Value::boolean(e->lit != 0);
    case TK::Unit: return Value::unit();
    default: return Value::number(e->lit);
  }
}

}  // namespace

std::optional<MatchBindings> match_rule(const RewriteRule& rule, const RawTerm& t) {
  MatchBindings mb;
  mb.types.assign(rule.ntvars, nullptr);
  mb.terms.assign(rule.vars.size(), std::nullopt);
  Matcher m{rule, mb};
  if (!m.go(*rule.lhs, t)) return std::nullopt;
  return mb;
}

bool check_condition(const RewriteRule& rule, const MatchBindings& b) {
  if (!rule.cond) return true;
  ValueEnv env;
  for (size_t k = 0; k < rule.vars.size(); ++k) {
    if (!rule.vars[k].is_const || !b.terms[k]) continue;
    const Expr* l = b.terms[k]->literal();
    if (!l) return false;
    env[rule.vars[k].id.id] = literal_value(l);
  }
  return denote(rule.cond, env).b;
}

// ---- compilation ------------------------------------------------------------

namespace {

struct Row {
  int rule;
  std::vector<const Pattern*> cols;  // null: matches anything
};

const Pattern* column_pattern(const Pattern* p) { return p && !is_wildcard_like(*p) ? p : nullptr; }

TreeP failure_node() {
  static TreeP f = std::make_shared<DecisionTree>();
  return f;
}

bool key_of(const Pattern* p, SwitchKey& k) {
  if (p->k == Pattern::Ident) {
    k.kind = SwitchKey::Ident;
    k.fam = p->fam;
    return true;
  }
  if (p->k == Pattern::Literal) {
    k.kind = SwitchKey::Literal;
    k.lit = p->lit;
    return true;
  }
  return false;
}

struct Compiler {
  size_t fuel;

  TreeP go(const std::vector<Row>& rows) {
    if (fuel == 0) throw FuelExhausted("decision tree compilation ran out of fuel");
    --fuel;
    if (rows.empty()) return failure_node();
    const Row& r0 = rows[0];
    bool all_wild = std::all_of(r0.cols.begin(), r0.cols.end(), [](const Pattern* p) { return !p; });
    if (all_wild) {
      auto t = std::make_shared<DecisionTree>();
      t->kind = DecisionTree::TryLeaf;
      t->rule = r0.rule;
      t->onfailure = go(std::vector<Row>(rows.begin() + 1, rows.end()));
      return t;
    }
    size_t col = 0;
    for (bool found = false; !found; ++col)
      for (const Row& r : rows)
        if (r.cols[col]) {
          found = true;
          break;
        }
    --col;
    if (col != 0) {
      std::vector<Row> swapped = rows;
      for (Row& r : swapped) std::swap(r.cols[0], r.cols[col]);
      auto t = std::make_shared<DecisionTree>();
      t->kind = DecisionTree::Swap;
      t->swap = static_cast<int>(col);
      t->cont = go(swapped);
      return t;
    }
    auto t = std::make_shared<DecisionTree>();
    t->kind = DecisionTree::Switch;
    auto rest = [](const Row& r) { return std::vector<const Pattern*>(r.cols.begin() + 1, r.cols.end()); };

    std::vector<SwitchKey> keys;
    bool any_app = false;
    for (const Row& r : rows) {
      const Pattern* p = r.cols[0];
      if (!p) continue;
      SwitchKey k;
      if (key_of(p, k)) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
      } else if (p->k == Pattern::App) {
        any_app = true;
      }
    }
    for (const SwitchKey& k : keys) {
      std::vector<Row> sub;
      for (const Row& r : rows) {
        SwitchKey rk;
        if (!r.cols[0] || (key_of(r.cols[0], rk) && rk == k)) sub.push_back(Row{r.rule, rest(r)});
      }
      t->icases.emplace_back(k, go(sub));
    }
    if (any_app) {
      std::vector<Row> sub;
      for (const Row& r : rows) {
        const Pattern* p = r.cols[0];
        if (p && p->k != Pattern::App) continue;
        Row n{r.rule, {}};
        n.cols.push_back(p ? column_pattern(p->fn.get()) : nullptr);
        n.cols.push_back(p ? column_pattern(p->arg.get()) : nullptr);
        for (size_t i = 1; i < r.cols.size(); ++i) n.cols.push_back(r.cols[i]);
        sub.push_back(std::move(n));
      }
      t->app_case = go(sub);
    }
    std::vector<Row> dflt;
    for (const Row& r : rows)
      if (!r.cols[0]) dflt.push_back(Row{r.rule, rest(r)});
    t->dflt = go(dflt);
    return t;
  }
};

}  // namespace

TreeP compile_rewrites(const std::vector<PatternP>& lhs, size_t fuel) {
  std::vector<Row> rows;
  for (size_t i = 0; i < lhs.size(); ++i) rows.push_back(Row{static_cast<int>(i), {column_pattern(lhs[i].get())}});
  Compiler c{fuel};
  return c.go(rows);
}

TreeP compile_rewrites(const RuleSet& rs, size_t fuel) {
  std::vector<PatternP> lhs;
  for (const auto& r : rs.rules) lhs.push_back(r.lhs);
  return compile_rewrites(lhs, fuel);
}

bool tree_equal(const DecisionTree& a, const DecisionTree& b) {
  if (a.kind != b.kind) return false;
  auto eq = [](const TreeP& x, const TreeP& y) { return (!x && !y) || (x && y && tree_equal(*x, *y)); };
  switch (a.kind) {
    case DecisionTree::Failure: return true;
    case DecisionTree::TryLeaf: return a.rule == b.rule && eq(a.onfailure, b.onfailure);
    case DecisionTree::Swap: return a.swap == b.swap && eq(a.cont, b.cont);
    case DecisionTree::Switch:
      if (a.icases.size() != b.icases.size()) return false;
      for (size_t i = 0; i < a.icases.size(); ++i)
        if (!(a.icases[i].first == b.icases[i].first) || !eq(a.icases[i].second, b.icases[i].second)) return false;
      return eq(a.app_case, b.app_case) && eq(a.dflt, b.dflt);
  }
  return false;
}

namespace {

std::string key_label(const SwitchKey& k) {
  if (k.kind == SwitchKey::Literal) return "Literal " + to_string(k.lit);
  return k.fam->symbol.empty() ? k.fam->name : k.fam->symbol;
}

std::string node_label(const DecisionTree& t) {
  switch (t.kind) {
    case DecisionTree::Failure: return "Failure";
    case DecisionTree::TryLeaf: return "TryLeaf " + std::to_string(t.rule);
    case DecisionTree::Swap: return "Swap 0<->" + std::to_string(t.swap);
    case DecisionTree::Switch: return "Switch";
  }
  return "?";
}

template <class F>
void each_edge(const DecisionTree& t, F&& f) {
  switch (t.kind) {
    case DecisionTree::TryLeaf: f("onfailure", *t.onfailure); break;
    case DecisionTree::Swap: f("", *t.cont); break;
    case DecisionTree::Switch:
      for (const auto& [k, sub] : t.icases) f(key_label(k), *sub);
      if (t.app_case) f("App", *t.app_case);
      f("default", *t.dflt);
      break;
    case DecisionTree::Failure: break;
  }
}

void dump_into(const DecisionTree& t, int indent, std::ostringstream& os) {
  os << std::string(indent, ' ') << node_label(t) << "\n";
  each_edge(t, [&](const std::string& label, const DecisionTree& sub) {
    if (label.empty()) {
      dump_into(sub, indent + 2, os);
      return;
    }
    os << std::string(indent + 2, ' ') << "[" << label << "] ->\n";
    dump_into(sub, indent + 4, os);
  });
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

int dot_into(const DecisionTree& t, int& next, std::ostringstream& os) {
  int me = next++;
  std::string shape = t.kind == DecisionTree::Switch ? "circle" : "box";
  std::string label = t.kind == DecisionTree::Switch ? "" : node_label(t);
  os << "  n" << me << " [shape=" << shape << ", label=\"" << dot_escape(label) << "\"];\n";
  each_edge(t, [&](const std::string& lbl, const DecisionTree& sub) {
    int child = dot_into(sub, next, os);
    os << "  n" << me << " -> n" << child << " [label=\"" << dot_escape(lbl) << "\"];\n";
  });
  return me;
}

// ---- evaluation -------------------------------------------------------------

struct Tried {
  std::vector<int> seen;
  bool insert(int k) {
    if (std::find(seen.begin(), seen.end(), k) != seen.end()) return false;
    seen.push_back(k);
    return true;
  }
};

bool head_key(const RawTerm& x, SwitchKey& k) {
  if (const Ident* id = x.ident()) {
    k.kind = SwitchKey::Ident;
    k.fam = id->fam;
    return true;
  }
  if (const Expr* l = x.literal()) {
    k.kind = SwitchKey::Literal;
    k.lit = l->lit;
    return true;
  }
  return false;
}

std::vector<RawTerm> without_first(const std::vector<RawTerm>& v) { return std::vector<RawTerm>(v.begin() + 1, v.end()); }

std::vector<RawTerm> split_first(const std::vector<RawTerm>& v) {
  std::vector<RawTerm> out;
  out.reserve(v.size() + 1);
  out.push_back(v[0].fn());
  out.push_back(v[0].arg());
  out.insert(out.end(), v.begin() + 1, v.end());
  return out;
}

std::optional<int> run(const DecisionTree& t, std::vector<RawTerm>& v, Tried& tried, const TryRule& try_rule) {
  switch (t.kind) {
    case DecisionTree::Failure: return std::nullopt;
    case DecisionTree::TryLeaf:
      if (tried.insert(t.rule) && try_rule(t.rule)) return t.rule;
      return run(*t.onfailure, v, tried, try_rule);
    case DecisionTree::Swap: {
      size_t i = static_cast<size_t>(t.swap);
      if (i >= v.size()) return std::nullopt;
      std::swap(v[0], v[i]);
      auto r = run(*t.cont, v, tried, try_rule);
      std::swap(v[0], v[i]);
      return r;
    }
    case DecisionTree::Switch: {
      if (v.empty()) return run(*t.dflt, v, tried, try_rule);
      SwitchKey k;
      if (head_key(v[0], k)) {
        for (const auto& [ck, sub] : t.icases)
          if (ck == k) {
            auto rest = without_first(v);
            if (auto r = run(*sub, rest, tried, try_rule)) return r;
            break;
          }
      } else if (t.app_case && v[0].is_app()) {
        auto split = split_first(v);
        if (auto r = run(*t.app_case, split, tried, try_rule)) return r;
      }
      auto rest = without_first(v);
      return run(*t.dflt, rest, tried, try_rule);
    }
  }
  return std::nullopt;
}

using Node = std::function<std::optional<int>(std::vector<RawTerm>&, Tried&, const TryRule&)>;

Node build(const DecisionTree& t) {
  switch (t.kind) {
    case DecisionTree::Failure:
      return [](std::vector<RawTerm>&, Tried&, const TryRule&) -> std::optional<int> { return std::nullopt; };
    case DecisionTree::TryLeaf: {
      int k = t.rule;
      Node next = build(*t.onfailure);
      return [k, next](std::vector<RawTerm>& v, Tried& tried, const TryRule& tr) -> std::optional<int> {
        if (tried.insert(k) && tr(k)) return k;
        return next(v, tried, tr);
      };
    }
    case DecisionTree::Swap: {
      size_t i = static_cast<size_t>(t.swap);
      Node cont = build(*t.cont);
      return [i, cont](std::vector<RawTerm>& v, Tried& tried, const TryRule& tr) -> std::optional<int> {
        if (i >= v.size()) return std::nullopt;
        std::swap(v[0], v[i]);
        auto r = cont(v, tried, tr);
        std::swap(v[0], v[i]);
        return r;
      };
    }
    case DecisionTree::Switch: {
      std::vector<std::pair<SwitchKey, Node>> cases;
      for (const auto& [k, sub] : t.icases) cases.emplace_back(k, build(*sub));
      std::optional<Node> app;
      if (t.app_case) app = build(*t.app_case);
      Node dflt = build(*t.dflt);
      return [cases, app, dflt](std::vector<RawTerm>& v, Tried& tried, const TryRule& tr) -> std::optional<int> {
        if (v.empty()) return dflt(v, tried, tr);
        SwitchKey k;
        if (head_key(v[0], k)) {
          for (const auto& [ck, sub] : cases)
            if (ck == k) {
              auto rest = without_first(v);
              if (auto r = sub(rest, tried, tr)) return r;
              break;
            }
        } else if (app && v[0].is_app()) {
          auto split = split_first(v);
          if (auto r = (*app)(split, tried, tr)) return r;
        }
        auto rest = without_first(v);
        return dflt(rest, tried, tr);
      };
    }
  }
  return nullptr;
}

}  // namespace

std::string dump_tree(const DecisionTree& t) {
  std::ostringstream os;
  dump_into(t, 0, os);
  return os.str();
}

std::string tree_to_dot(const DecisionTree& t) {
  std::ostringstream os;
  os << "digraph DecisionTree {\n";
  int next = 0;
  dot_into(t, next, os);
  os << "}\n";
  return os.str();
}

std::optional<int> eval_decision_tree(const DecisionTree& t, std::vector<RawTerm> exprs, const TryRule& try_rule) {
  Tried tried;
  return run(t, exprs, tried, try_rule);
}

CompiledMatcher compile_to_closure(const TreeP& t) {
  Node root = build(*t);
  return [root](std::vector<RawTerm> exprs, const TryRule& tr) {
    Tried tried;
    return root(exprs, tried, tr);
  };
}

}  // namespace rw
