#include "rw/absint.hpp"

#include "rw/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace rw {

std::string show(const Bounds& b) { return "[" + to_string(b.lower) + "," + to_string(b.upper) + ")"; }

namespace {

constexpr unsigned kMaxShiftBound = 4096;

Int lo(const Bounds& b) { return b.lower; }
Int hi(const Bounds& b) { return b.upper - 1; }

template <class F>
Bounds corners(const Bounds& x, const Bounds& y, F op) {
  Int c[4] = {op(lo(x), lo(y)), op(lo(x), hi(y)), op(hi(x), lo(y)), op(hi(x), hi(y))};
  return Bounds::closed(*std::min_element(c, c + 4), *std::max_element(c, c + 4));
}

Bounds clamp_nat(Bounds b) {
  if (b.lower < 0) b.lower = 0;
  if (b.upper < 1) b.upper = 1;
  return b;
}

Bounds clip_bounds(const Int& l, const Int& u, const std::optional<Bounds>& x) {
  if (u <= l) return Bounds::singleton(l);
  if (!x) return Bounds{l, u};
  return Bounds::closed(clip_semantics(l, u, lo(*x)), clip_semantics(l, u, hi(*x)));
}

}  // namespace

std::optional<Bounds> transfer(const Ident* id, const std::vector<std::optional<Bounds>>& args) {
  const IdentFamily* fam = id->fam;
  const std::string& n = fam->name;
  if (fam == idents::clip_family()) return clip_bounds(id->lo, id->hi, args.empty() ? std::nullopt : args[0]);
  if (fam == idents::clip_dyn()) {
    if (args.size() < 3 || !args[0] || !args[1]) return std::nullopt;
    const Bounds &l = *args[0], &u = *args[1];
    if (hi(l) != lo(l) || hi(u) != lo(u)) return std::nullopt;
    return clip_bounds(l.lower, u.lower, args[2]);
  }
  for (const auto& a : args)
    if (!a) return std::nullopt;
  std::optional<Bounds> r;
  if (n == "of_nat") {
    r = args[0];
  } else if (n == "to_nat") {
    r = clamp_nat(*args[0]);
  } else if (n == "opp") {
    r = Bounds::closed(-hi(*args[0]), -lo(*args[0]));
  } else if (args.size() == 2) {
    const Bounds &x = *args[0], &y = *args[1];
    if (n == "add") {
      r = Bounds::closed(lo(x) + lo(y), hi(x) + hi(y));
    } else if (n == "sub") {
      r = Bounds::closed(lo(x) - hi(y), hi(x) - lo(y));
    } else if (n == "mul") {
      r = corners(x, y, [](const Int& a, const Int& b) { return a * b; });
    } else if (n == "div") {
      if (lo(y) > 0) r = corners(x, y, floor_div);
    } else if (n == "modulo") {
      if (lo(y) > 0) r = Bounds::closed(0, hi(y) - 1);
    } else if (n == "shiftr") {
      if (lo(y) >= 0 && hi(y) <= kMaxShiftBound) r = corners(x, y, shiftr_int);
    } else if (n == "land") {
      if (lo(x) >= 0 && lo(y) >= 0) r = Bounds::closed(0, std::min(hi(x), hi(y)));
    } else if (n == "lor") {
      if (lo(x) >= 0 && lo(y) >= 0)
        r = Bounds::closed(std::max(lo(x), lo(y)), pow2(bit_length(std::max(hi(x), hi(y)))) - 1);
    } else if (n == "min") {
      r = Bounds::closed(std::min(lo(x), lo(y)), std::min(hi(x), hi(y)));
    } else if (n == "max") {
      r = Bounds::closed(std::max(lo(x), lo(y)), std::max(hi(x), hi(y)));
    }
  }
  if (r && id->result == ty::Nat()) r = clamp_nat(*r);
  return r;
}

namespace {

bool numeric_base(Type t) { return t->kind == TK::Int || t->kind == TK::Nat; }

bool is_clip_head(const Expr* e) {
  return e->kind == EK::IdentRef && (e->ident->fam == idents::clip_family());
}

struct Clipper {
  AbstractEnv env;
  AbsintOptions opts;
  bool rewrite = true;

  ExprP wrap(const ExprP& e, const Bounds& b) { return mk_app(mk_ident(idents::clip(b.lower, b.upper)), e); }

  // Returns the rewritten expression and, for Int/Nat expressions, its bounds.
  std::pair<ExprP, std::optional<Bounds>> go(const ExprP& e, bool under_clip) {
    switch (e->kind) {
      case EK::Literal: {
        if (!numeric_base(e->type)) return {e, std::nullopt};
        Bounds b = Bounds::singleton(e->lit);
        if (rewrite && opts.clip_constants && !under_clip && e->type == ty::Int()) return {wrap(e, b), b};
        return {e, b};
      }
      case EK::Var: {
        auto it = env.find(e->binder.id);
        if (it == env.end() || !numeric_base(e->type)) return {e, std::nullopt};
        if (rewrite && !under_clip && e->type == ty::Int()) return {wrap(e, it->second), it->second};
        return {e, it->second};
      }
      case EK::Abs: {
        auto body = go(e->a, false).first;
        return {body == e->a ? e : mk_abs(e->binder, e->type->a, body), std::nullopt};
      }
      case EK::LetIn: {
        auto [bound, b] = go(e->a, false);
        if (b) env[e->binder.id] = *b;
        auto [body, bb] = go(e->b, false);
        env.erase(e->binder.id);
        if (bound == e->a && body == e->b) return {e, bb};
        return {mk_let(e->binder, bound, body), bb};
      }
      case EK::IdentRef: {
        if (e->ident->params.empty() && numeric_base(e->type)) return {e, transfer(e->ident, {})};
        return {e, std::nullopt};
      }
      case EK::App: {
        const Expr* h = spine_head(e.get());
        std::vector<ExprP> args = spine_args(e);
        if (h->kind == EK::IdentRef && args.size() == h->ident->params.size()) {
          bool clip = is_clip_head(h);
          std::vector<std::optional<Bounds>> ab;
          bool changed = false;
          for (ExprP& a : args) {
            auto [na, b] = go(a, clip);
            ab.push_back(b);
            changed |= na != a;
            a = na;
          }
          std::optional<Bounds> r = numeric_base(e->type) ? transfer(h->ident, ab) : std::nullopt;
          if (!changed) return {e, r};
          ExprP head = e;
          while (head->kind == EK::App) head = head->a;
          return {mk_apps(head, args), r};
        }
        auto f = go(e->a, false).first;
        auto x = go(e->b, false).first;
        if (f == e->a && x == e->b) return {e, std::nullopt};
        return {mk_app(f, x), std::nullopt};
      }
    }
    return {e, std::nullopt};
  }
};

}  // namespace

std::optional<Bounds> infer_bounds(const ExprP& e, const AbstractEnv& env) {
  Clipper c{env, {}, false};
  return c.go(e, false).second;
}

ExprP infer_and_clip(const ExprP& e, const AbstractEnv& env, AbsintOptions opts) {
  Clipper c{env, opts, true};
  return c.go(e, false).first;
}

namespace {

Int parse_bound_number(const std::string& s, int line) {
  auto fail = [&]() -> Int { throw ParseError("SyntaxError", line, 1, "bad bound: " + s); };
  Int total = 0;
  size_t i = 0;
  int sign = 1;
  bool first = true;
  auto skip = [&] {
    while (i < s.size() && s[i] == ' ') ++i;
  };
  skip();
  while (i < s.size()) {
    if (s[i] == '-' || s[i] == '+') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
      skip();
    } else if (!first) {
      return fail();
    }
    size_t j = i;
    while (j < s.size() && isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i) return fail();
    auto base = parse_int(s.substr(i, j - i));
    Int term = *base;
    i = j;
    skip();
    if (i < s.size() && s[i] == '^') {
      ++i;
      skip();
      j = i;
      while (j < s.size() && isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j == i || j - i > 6) return fail();
      term = pow_int(term, *parse_int(s.substr(i, j - i)));
      i = j;
      skip();
    }
    total += sign * term;
    sign = 1;
    first = false;
  }
  if (first) return fail();
  return total;
}

}  // namespace

std::vector<std::pair<std::string, Bounds>> parse_bounds_file(const std::string& text) {
  std::vector<std::pair<std::string, Bounds>> out;
  std::istringstream in(text);
  std::string ln;
  int line = 0;
  while (std::getline(in, ln)) {
    ++line;
    size_t a = ln.find_first_not_of(" \t\r");
    if (a == std::string::npos || ln[a] == '#' || ln.compare(a, 2, "--") == 0) continue;
    size_t b = ln.find_last_not_of(" \t\r");
    std::string s = ln.substr(a, b - a + 1);
    size_t in_pos = s.find(" in ");
    size_t lb = s.find('['), comma = s.find(','), rb = s.rfind(')');
    if (in_pos == std::string::npos || lb == std::string::npos || comma == std::string::npos ||
        rb != s.size() - 1 || !(in_pos < lb && lb < comma && comma < rb))
      throw ParseError("SyntaxError", line, 1, "expected `x in [l, u)`");
    std::string name = s.substr(0, in_pos);
    while (!name.empty() && name.back() == ' ') name.pop_back();
    Int l = parse_bound_number(s.substr(lb + 1, comma - lb - 1), line);
    Int u = parse_bound_number(s.substr(comma + 1, rb - comma - 1), line);
    if (name.empty()) throw ParseError("SyntaxError", line, 1, "missing variable name");
    if (!(l < u)) throw ParseError("EmptyInterval", line, 1, "empty interval for " + name);
    out.emplace_back(name, Bounds{l, u});
  }
  return out;
}

AbstractEnv resolve_bounds(const ExprP& e, const std::vector<std::pair<std::string, Bounds>>& named) {
  AbstractEnv env;
  auto attach = [&](const BinderId& b) {
    if (!b.hint) return;
    for (const auto& [name, bounds] : named)
      if (*b.hint == name) env[b.id] = bounds;
  };
  for (const BinderId& b : free_vars(e)) attach(b);
  for (const Expr* x = e.get(); x->kind == EK::Abs; x = x->a.get()) attach(x->binder);
  return env;
}

}  // namespace rw
