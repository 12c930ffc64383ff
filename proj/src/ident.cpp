#include "rw/ident.hpp"

#include "rw/expr.hpp"

#include <map>
#include <mutex>
#include <unordered_map>

namespace rw {

Int clip_semantics(const Int& lo, const Int& hi, const Int& n) {
  if (lo <= n && n < hi) return n;
  Int top = hi - 1;
  Int r = n < top ? n : top;
  return r < lo ? lo : r;
}

namespace {

using V = Value;
using Args = std::vector<Value>;

Type A() { return ty::tvar(0, false); }
Type B() { return ty::tvar(1, false); }
Type P() { return ty::tvar(1, false); }
Type N() { return ty::tvar(0, true); }
Type Z() { return ty::Int(); }
Type Nat() { return ty::Nat(); }
Type Bool() { return ty::Bool(); }
Type fn(std::initializer_list<Type> ts) {
  std::vector<Type> v(ts);
  Type r = v.back();
  v.pop_back();
  return ty::arrows(v, r);
}

bool nat_inst(const Ident& id) { return !id.targs.empty() && id.targs[0] == ty::Nat(); }

// Loops over concrete recursion arguments are bounded to keep evaluation from
// hanging on absurd inputs; such inputs are rejected rather than approximated.
constexpr long kMaxUnroll = 50'000'000;

long to_count(const Int& n) {
  if (n < 0) return 0;
  if (n > kMaxUnroll) throw std::overflow_error("recursion argument too large");
  return n.convert_to<long>();
}

struct Universe {
  std::vector<std::unique_ptr<IdentFamily>> fams;
  std::unordered_map<std::string, const IdentFamily*> by_name;
  std::vector<const IdentFamily*> list;
  std::mutex mu;

  IdentFamily* def(const std::string& name, const std::string& symbol, int nparams, Type schematic,
                   IdentKind kind, Semantics sem, bool delta, bool builtin = false) {
    auto f = std::make_unique<IdentFamily>();
    f->id = static_cast<int>(fams.size());
    f->name = name;
    f->symbol = symbol;
    f->nparams = nparams;
    f->schematic = schematic;
    f->sem_arity = arity(schematic);
    f->kind = kind;
    f->sem = std::move(sem);
    f->delta = delta;
    f->builtin = builtin;
    IdentFamily* raw = f.get();
    fams.push_back(std::move(f));
    by_name[name] = raw;
    if (!symbol.empty()) by_name[symbol] = raw;
    list.push_back(raw);
    return raw;
  }
  void alias(const std::string& a, const std::string& canonical) { by_name[a] = by_name.at(canonical); }
  IdentFamily* elim(const std::string& name, int nparams, Type schematic, Semantics sem,
                    const std::string& group, int scrutinee) {
    auto* f = def(name, "", nparams, schematic, IdentKind::Eliminator, std::move(sem), false, true);
    f->rect_group = group;
    f->scrutinee = scrutinee;
    return f;
  }

  Universe() {
    auto arith = [this](const std::string& name, const std::string& sym,
                        std::function<Int(const Int&, const Int&)> op) {
      def(name, sym, 1, fn({N(), N(), N()}), IdentKind::Primitive,
          [op](const Ident& id, const Args& a) {
            Int r = op(a[0].num, a[1].num);
            if (nat_inst(id) && r < 0) r = 0;
            return V::number(std::move(r));
          },
          true);
    };
    arith("add", "+", [](const Int& x, const Int& y) { return x + y; });
    arith("sub", "-", [](const Int& x, const Int& y) { return x - y; });
    arith("mul", "*", [](const Int& x, const Int& y) { return x * y; });
    arith("div", "/", floor_div);
    arith("modulo", "mod", floor_mod);
    arith("pow", "^", pow_int);
    arith("shiftr", ">>", shiftr_int);
    arith("shiftl", "<<", shiftl_int);
    arith("land", "", land_int);
    arith("lor", "", lor_int);
    arith("min", "", [](const Int& x, const Int& y) { return x < y ? x : y; });
    arith("max", "", [](const Int& x, const Int& y) { return x < y ? y : x; });
    def("log2", "", 1, fn({N(), N()}), IdentKind::Primitive,
        [](const Ident&, const Args& a) { return V::number(log2_int(a[0].num)); }, true);

    auto cmp = [this](const std::string& name, const std::string& sym,
                      std::function<bool(const Int&, const Int&)> op) {
      def(name, sym, 1, fn({N(), N(), Bool()}), IdentKind::Primitive,
          [op](const Ident&, const Args& a) { return V::boolean(op(a[0].num, a[1].num)); }, true);
    };
    cmp("eqb", "==", [](const Int& x, const Int& y) { return x == y; });
    cmp("ltb", "<", [](const Int& x, const Int& y) { return x < y; });
    cmp("leb", "<=", [](const Int& x, const Int& y) { return x <= y; });
    cmp("gtb", ">", [](const Int& x, const Int& y) { return x > y; });
    cmp("geb", ">=", [](const Int& x, const Int& y) { return x >= y; });

    def("andb", "&&", 0, fn({Bool(), Bool(), Bool()}), IdentKind::Primitive,
        [](const Ident&, const Args& a) { return V::boolean(a[0].b && a[1].b); }, true);
    def("orb", "||", 0, fn({Bool(), Bool(), Bool()}), IdentKind::Primitive,
        [](const Ident&, const Args& a) { return V::boolean(a[0].b || a[1].b); }, true);
    def("negb", "", 0, fn({Bool(), Bool()}), IdentKind::Primitive,
        [](const Ident&, const Args& a) { return V::boolean(!a[0].b); }, true);
    def("opp", "", 0, fn({Z(), Z()}), IdentKind::Primitive,
        [](const Ident&, const Args& a) { return V::number(-a[0].num); }, true);
    def("of_nat", "", 0, fn({Nat(), Z()}), IdentKind::Primitive,
        [](const Ident&, const Args& a) { return V::number(a[0].num); }, true);
    def("to_nat", "", 0, fn({Z(), Nat()}), IdentKind::Primitive,
        [](const Ident&, const Args& a) { return V::number(a[0].num < 0 ? Int(0) : a[0].num); }, true);
    def("add_with_carry64", "", 0, fn({Z(), Z(), ty::prod(Z(), Z())}), IdentKind::Primitive,
        [](const Ident&, const Args& a) {
          Int s = a[0].num + a[1].num;
          Int m = pow2(64);
          return V::pair(V::number(floor_div(s, m)), V::number(floor_mod(s, m)));
        },
        true);

    // Constructors.
    def("S", "", 0, fn({Nat(), Nat()}), IdentKind::Constructor,
        [](const Ident&, const Args& a) { return V::number(a[0].num + 1); }, true, true);
    def("nil", "[]", 1, ty::list(A()), IdentKind::Constructor,
        [](const Ident&, const Args&) { return V::nil(); }, false, true);
    def("cons", "::", 1, fn({A(), ty::list(A()), ty::list(A())}), IdentKind::Constructor,
        [](const Ident&, const Args& a) { return V::cons(a[0], a[1]); }, false, true);
    def("pair", "", 2, fn({A(), B(), ty::prod(A(), B())}), IdentKind::Constructor,
        [](const Ident&, const Args& a) { return V::pair(a[0], a[1]); }, false, true);
    def("Some", "", 1, fn({A(), ty::option(A())}), IdentKind::Constructor,
        [](const Ident&, const Args& a) { return V::some(a[0]); }, false, true);
    def("None", "", 1, ty::option(A()), IdentKind::Constructor,
        [](const Ident&, const Args&) { return V::none(); }, false, true);

    // Eliminators. Type parameters: element/component types first, motive last.
    Type LA = ty::list(A());
    elim("list_rect", 2, fn({P(), fn({A(), LA, P(), P()}), LA, P()}),
         [](const Ident&, const Args& a) {
           std::vector<const Value*> cells;
           const Value* cur = &a[2];
           while (cur->tag == V::Tag::Cons) {
             cells.push_back(cur);
             cur = cur->y.get();
           }
           Value acc = a[0];
           for (size_t i = cells.size(); i-- > 0;)
             acc = a[1].apply(*cells[i]->x).apply(*cells[i]->y).apply(acc);
           return acc;
         },
         "list", 2);
    elim("list_case", 2, fn({P(), fn({A(), LA, P()}), LA, P()}),
         [](const Ident&, const Args& a) {
           if (a[2].tag == V::Tag::Nil) return a[0];
           return a[1].apply(*a[2].x).apply(*a[2].y);
         },
         "list", 2);
    elim("nth_default", 1, fn({A(), LA, Nat(), A()}),
         [](const Ident&, const Args& a) {
           const Value* cur = &a[1];
           Int i = a[2].num;
           while (cur->tag == V::Tag::Cons) {
             if (i == 0) return *cur->x;
             --i;
             cur = cur->y.get();
           }
           return a[0];
         },
         "list", 1);
    elim("nat_rect", 1, fn({A(), fn({Nat(), A(), A()}), Nat(), A()}),
         [](const Ident&, const Args& a) {
           long n = to_count(a[2].num);
           Value acc = a[0];
           for (long k = 0; k < n; ++k) acc = a[1].apply(V::number(k)).apply(acc);
           return acc;
         },
         "nat", 2);
    elim("bool_rect", 1, fn({A(), A(), Bool(), A()}),
         [](const Ident&, const Args& a) { return a[2].b ? a[0] : a[1]; }, "bool", 2);
    Type PAB = ty::prod(A(), B());
    Type P2 = ty::tvar(2, false);
    elim("prod_rect", 3, fn({fn({A(), B(), P2}), PAB, P2}),
         [](const Ident&, const Args& a) { return a[0].apply(*a[1].x).apply(*a[1].y); }, "prod", 1);
    elim("fst", 2, fn({PAB, A()}), [](const Ident&, const Args& a) { return *a[0].x; }, "prod", 0);
    elim("snd", 2, fn({PAB, B()}), [](const Ident&, const Args& a) { return *a[0].y; }, "prod", 0);
    elim("option_rect", 2, fn({fn({A(), P()}), P(), ty::option(A()), P()}),
         [](const Ident&, const Args& a) {
           if (a[2].tag == V::Tag::Some) return a[0].apply(*a[2].x);
           return a[1];
         },
         "option", 2);

    // List library.
    def("app", "++", 1, fn({LA, LA, LA}), IdentKind::Primitive,
        [](const Ident&, const Args& a) {
          auto xs = a[0].list_items();
          Value r = a[1];
          for (size_t i = xs.size(); i-- > 0;) r = V::cons(xs[i], r);
          return r;
        },
        true);
    def("length", "", 1, fn({LA, Nat()}), IdentKind::Primitive,
        [](const Ident&, const Args& a) { return V::number(Int(a[0].list_items().size())); }, true);
    def("rev", "", 1, fn({LA, LA}), IdentKind::Primitive,
        [](const Ident&, const Args& a) {
          Value r = V::nil();
          for (auto& x : a[0].list_items()) r = V::cons(x, r);
          return r;
        },
        true);
    def("map", "", 2, fn({fn({A(), B()}), LA, ty::list(B())}), IdentKind::Primitive,
        [](const Ident&, const Args& a) {
          std::vector<Value> out;
          for (auto& x : a[1].list_items()) out.push_back(a[0].apply(x));
          return V::list(out);
        },
        true);
    // fold_left : (A -> B -> A) -> list B -> A -> A
    def("fold_left", "", 2, fn({fn({A(), B(), A()}), ty::list(B()), A(), A()}), IdentKind::Primitive,
        [](const Ident&, const Args& a) {
          Value acc = a[2];
          for (auto& x : a[1].list_items()) acc = a[0].apply(acc).apply(x);
          return acc;
        },
        true);
    // fold_right : (B -> A -> A) -> A -> list B -> A
    def("fold_right", "", 2, fn({fn({B(), A(), A()}), A(), ty::list(B()), A()}), IdentKind::Primitive,
        [](const Ident&, const Args& a) {
          auto xs = a[2].list_items();
          Value acc = a[1];
          for (size_t i = xs.size(); i-- > 0;) acc = a[0].apply(xs[i]).apply(acc);
          return acc;
        },
        true);
    def("combine", "", 2, fn({LA, ty::list(B()), ty::list(PAB)}), IdentKind::Primitive,
        [](const Ident&, const Args& a) {
          auto xs = a[0].list_items();
          auto ys = a[1].list_items();
          std::vector<Value> out;
          for (size_t i = 0; i < xs.size() && i < ys.size(); ++i) out.push_back(V::pair(xs[i], ys[i]));
          return V::list(out);
        },
        true);
    def("seq", "", 0, fn({Nat(), Nat(), ty::list(Nat())}), IdentKind::Primitive,
        [](const Ident&, const Args& a) {
          long len = to_count(a[1].num);
          std::vector<Value> out;
          out.reserve(len);
          for (long k = 0; k < len; ++k) out.push_back(V::number(a[0].num + k));
          return V::list(out);
        },
        true);
    def("repeat", "", 1, fn({A(), Nat(), LA}), IdentKind::Primitive,
        [](const Ident&, const Args& a) {
          long n = to_count(a[1].num);
          Value r = V::nil();
          for (long k = 0; k < n; ++k) r = V::cons(a[0], r);
          return r;
        },
        true);

    def("clip", "", 0, fn({Z(), Z()}), IdentKind::Clip,
        [](const Ident& id, const Args& a) { return V::number(clip_semantics(id.lo, id.hi, a[0].num)); },
        true, true);
    def("clip_dyn", "", 0, fn({Z(), Z(), Z(), Z()}), IdentKind::Clip,
        [](const Ident&, const Args& a) { return V::number(clip_semantics(a[0].num, a[1].num, a[2].num)); },
        true, true);

    alias("Z.add", "add");
    alias("Nat.add", "add");
    alias("Z.sub", "sub");
    alias("Z.mul", "mul");
    alias("Pos.mul", "mul");
    alias("Z.div", "div");
    alias("Z.modulo", "modulo");
    alias("Z.pow", "pow");
    alias("Z.shiftr", "shiftr");
    alias("Z.shiftl", "shiftl");
    alias("Z.land", "land");
    alias("Z.lor", "lor");
    alias("Z.log2", "log2");
    alias("Z.eqb", "eqb");
    alias("Z.ltb", "ltb");
    alias("Z.leb", "leb");
    alias("Z.gtb", "gtb");
    alias("Z.geb", "geb");
    alias("Z.opp", "opp");
    alias("Z.of_nat", "of_nat");
    alias("Z.to_nat", "to_nat");
    alias("Pos.succ", "S");
    alias("List.app", "app");
    alias("List.length", "length");
    alias("List.rev", "rev");
    alias("List.map", "map");
    alias("List.fold_left", "fold_left");
    alias("List.fold_right", "fold_right");
    alias("List.combine", "combine");
    alias("List.seq", "seq");
    alias("List.repeat", "repeat");
    alias("List.nth_default", "nth_default");
  }
};

Universe& universe() {
  static auto* u = new Universe();
  return *u;
}

struct InstKey {
  int fam;
  std::vector<Type> targs;
  Int lo, hi;
  bool operator<(const InstKey& o) const {
    if (fam != o.fam) return fam < o.fam;
    if (targs != o.targs) return targs < o.targs;
    if (lo != o.lo) return lo < o.lo;
    return hi < o.hi;
  }
};

std::mutex g_inst_mu;
std::map<InstKey, std::unique_ptr<Ident>>& instances() {
  static auto* m = new std::map<InstKey, std::unique_ptr<Ident>>();
  return *m;
}

const Ident* intern_instance(const IdentFamily* fam, std::vector<Type> targs, const Int& lo, const Int& hi) {
  InstKey key{fam->id, targs, lo, hi};
  std::lock_guard<std::mutex> lk(g_inst_mu);
  auto& m = instances();
  auto it = m.find(key);
  if (it != m.end()) return it->second.get();
  auto id = std::make_unique<Ident>();
  id->fam = fam;
  id->targs = std::move(targs);
  id->lo = lo;
  id->hi = hi;
  id->type = subst(fam->schematic, id->targs);
  id->params = arg_types(id->type);
  id->result = result_type(id->type);
  auto node = std::make_shared<Expr>();
  node->kind = EK::IdentRef;
  node->type = id->type;
  node->ident = id.get();
  id->ref = node;
  const Ident* raw = id.get();
  m.emplace(std::move(key), std::move(id));
  return raw;
}

}  // namespace

namespace idents {

const IdentFamily* find(const std::string& name) {
  auto& u = universe();
  std::lock_guard<std::mutex> lk(u.mu);
  auto it = u.by_name.find(name);
  return it == u.by_name.end() ? nullptr : it->second;
}

const IdentFamily* get(const std::string& canonical) {
  const IdentFamily* f = find(canonical);
  if (!f) throw UnknownIdent("unknown identifier: " + canonical);
  return f;
}

const std::vector<const IdentFamily*>& all() { return universe().list; }

const IdentFamily* declare_uninterpreted(const std::string& name, Type type) {
  auto& u = universe();
  std::lock_guard<std::mutex> lk(u.mu);
  auto it = u.by_name.find(name);
  if (it != u.by_name.end()) {
    const IdentFamily* f = it->second;
    if (f->kind == IdentKind::Uninterpreted && f->schematic == type) return f;
    throw std::runtime_error("identifier '" + name + "' is already defined with a different signature");
  }
  return u.def(name, "", 0, type, IdentKind::Uninterpreted, Semantics{}, false);
}

const Ident* instantiate(const IdentFamily* fam, std::vector<Type> targs) {
  if (static_cast<int>(targs.size()) != fam->nparams)
    throw std::logic_error("wrong number of type arguments for " + fam->name);
  return intern_instance(fam, std::move(targs), 0, 0);
}

const Ident* clip(const Int& lo, const Int& hi) { return intern_instance(clip_family(), {}, lo, hi); }

const Ident* subst(const Ident* id, const TypeSubst& s) {
  if (!id->type->has_tvar) return id;
  std::vector<Type> targs;
  for (Type t : id->targs) targs.push_back(rw::subst(t, s));
  return intern_instance(id->fam, std::move(targs), id->lo, id->hi);
}

const IdentFamily* add() { static auto* f = get("add"); return f; }
const IdentFamily* mul() { static auto* f = get("mul"); return f; }
const IdentFamily* nil() { static auto* f = get("nil"); return f; }
const IdentFamily* cons() { static auto* f = get("cons"); return f; }
const IdentFamily* pair() { static auto* f = get("pair"); return f; }
const IdentFamily* succ() { static auto* f = get("S"); return f; }
const IdentFamily* some() { static auto* f = get("Some"); return f; }
const IdentFamily* none() { static auto* f = get("None"); return f; }
const IdentFamily* clip_family() { static auto* f = get("clip"); return f; }
const IdentFamily* clip_dyn() { static auto* f = get("clip_dyn"); return f; }

}  // namespace idents

Registry::Registry() {
  for (const IdentFamily* f : idents::all())
    if (f->builtin) add(f);
}

void Registry::add(const IdentFamily* fam) {
  if (fam->id >= static_cast<int>(present_.size())) present_.resize(fam->id + 1, false);
  present_[fam->id] = true;
}

bool Registry::contains(const IdentFamily* fam) const {
  return fam->id < static_cast<int>(present_.size()) && present_[fam->id];
}

const IdentFamily* Registry::lookup(const std::string& name) const {
  const IdentFamily* f = idents::find(name);
  return (f && contains(f)) ? f : nullptr;
}

std::vector<const IdentFamily*> Registry::families() const {
  std::vector<const IdentFamily*> out;
  for (const IdentFamily* f : idents::all())
    if (contains(f)) out.push_back(f);
  return out;
}

std::string show(const Ident& id) {
  if (id.fam == idents::clip_family()) return "clip_{" + id.lo.str() + "," + id.hi.str() + "}";
  return id.fam->name;
}

}  // namespace rw
