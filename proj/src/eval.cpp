#include "rw/eval.hpp"

#include <pthread.h>

#include <exception>
#include <unordered_set>

namespace rw {

TypeError::TypeError(std::string k, std::string p, const std::string& msg)
    : std::runtime_error(k + (p.empty() ? std::string(" at root") : " at " + p) + ": " + msg),
      kind(std::move(k)),
      path(std::move(p)) {}

namespace {

struct Checker {
  const Registry& reg;
  std::unordered_map<uint64_t, Type> env;
  std::unordered_map<uint64_t, Type> free;

  static std::string child(const std::string& p, int i) { return p.empty() ? std::to_string(i) : p + "." + std::to_string(i); }

  Type check(const Expr* e, const std::string& path) {
    switch (e->kind) {
      case EK::Literal:
        if (e->type->kind == TK::Nat && e->lit < 0) throw TypeError("TypeMismatch", path, "negative N literal");
        if (e->type->kind == TK::Arrow || e->type->kind == TK::List || e->type->kind == TK::Prod ||
            e->type->kind == TK::Option)
          throw TypeError("TypeMismatch", path, "literal of non-scalar type " + show(e->type));
        return e->type;
      case EK::Var: {
        auto it = env.find(e->binder.id);
        if (it != env.end()) {
          if (it->second != e->type)
            throw TypeError("TypeMismatch", path,
                            "variable used at " + show(e->type) + " but bound at " + show(it->second));
          return e->type;
        }
        if (!is_free_var_token(e->binder)) throw TypeError("UnboundVar", path, "unbound variable");
        auto [fit, fresh] = free.emplace(e->binder.id, e->type);
        if (!fresh && fit->second != e->type)
          throw TypeError("TypeMismatch", path, "free variable used at two types");
        return e->type;
      }
      case EK::IdentRef:
        if (!reg.contains(e->ident->fam))
          throw TypeError("UnknownIdent", path, "identifier '" + e->ident->name() + "' is not in the registry");
        if (e->type != e->ident->type) throw TypeError("TypeMismatch", path, "identifier annotation mismatch");
        return e->type;
      case EK::Abs: {
        Type bt = e->type->kind == TK::Arrow ? e->type->a : nullptr;
        if (!bt) throw TypeError("TypeMismatch", path, "abstraction with non-arrow type");
        auto saved = env.find(e->binder.id) != env.end() ? env[e->binder.id] : nullptr;
        env[e->binder.id] = bt;
        Type body = check(e->a.get(), child(path, 0));
        if (saved) env[e->binder.id] = saved; else env.erase(e->binder.id);
        if (body != e->type->b) throw TypeError("TypeMismatch", path, "abstraction body type mismatch");
        return e->type;
      }
      case EK::App: {
        Type f = check(e->a.get(), child(path, 0));
        if (f->kind != TK::Arrow)
          throw TypeError("TypeMismatch", child(path, 0), "applying a term of type " + show(f));
        Type a = check(e->b.get(), child(path, 1));
        if (a != f->a)
          throw TypeError("TypeMismatch", child(path, 1), "expected " + show(f->a) + ", got " + show(a));
        if (e->type != f->b) throw TypeError("TypeMismatch", path, "application annotation mismatch");
        return e->type;
      }
      case EK::LetIn: {
        Type bt = check(e->a.get(), child(path, 0));
        auto saved = env.find(e->binder.id) != env.end() ? env[e->binder.id] : nullptr;
        env[e->binder.id] = bt;
        Type body = check(e->b.get(), child(path, 1));
        if (saved) env[e->binder.id] = saved; else env.erase(e->binder.id);
        if (body != e->type) throw TypeError("TypeMismatch", path, "let annotation mismatch");
        return e->type;
      }
    }
    return nullptr;
  }
};

// Persistent environment for closures.
struct EnvNode {
  uint64_t id;
  Value v;
  std::shared_ptr<const EnvNode> next;
};
using Env = std::shared_ptr<const EnvNode>;

struct Interp : std::enable_shared_from_this<Interp> {
  ValueEnv outer;

  explicit Interp(ValueEnv o) : outer(std::move(o)) {}

  const Value& lookup(const Env& env, const BinderId& b) const {
    for (const EnvNode* n = env.get(); n; n = n->next.get())
      if (n->id == b.id) return n->v;
    auto it = outer.find(b.id);
    if (it == outer.end())
      throw std::runtime_error("denote: no value for variable " + (b.hint ? *b.hint : std::to_string(b.id)));
    return it->second;
  }

  Value eval(const Expr* e, Env env) const {
    while (true) {
      switch (e->kind) {
        case EK::Literal:
          switch (e->type->kind) {
            case TK::Bool: return Value::boolean(e->lit != 0);
            case TK::Unit: return Value::unit();
            default: return Value::number(e->lit);
          }
        case EK::Var: return lookup(env, e->binder);
        case EK::IdentRef: return ident_value(*e->ident);
        case EK::Abs: {
          auto self = shared_from_this();
          ExprP body = e->a;
          uint64_t id = e->binder.id;
          return Value::function([self, body, id, env](const Value& x) {
            return self->eval(body.get(), std::make_shared<const EnvNode>(EnvNode{id, x, env}));
          });
        }
        case EK::App: {
          Value f = eval(e->a.get(), env);
          Value x = eval(e->b.get(), env);
          return f.apply(x);
        }
        case EK::LetIn: {
          Value v = eval(e->a.get(), env);
          env = std::make_shared<const EnvNode>(EnvNode{e->binder.id, std::move(v), env});
          e = e->b.get();
          continue;
        }
      }
    }
  }
};

Value curry(const Ident& id, std::vector<Value> acc) {
  if (acc.size() == id.fam->sem_arity) return id.fam->sem(id, acc);
  const Ident* p = &id;
  return Value::function([p, acc](const Value& x) {
    std::vector<Value> next = acc;
    next.push_back(x);
    return curry(*p, std::move(next));
  });
}

}  // namespace

Type typecheck(const ExprP& e, const Registry& reg) {
  Checker c{reg, {}, {}};
  return c.check(e.get(), "");
}

Value ident_value(const Ident& id) {
  if (!id.fam->sem) throw UninterpretedIdent("identifier '" + id.name() + "' has no semantics");
  return curry(id, {});
}

Value denote(const ExprP& e, const ValueEnv& env) {
  auto interp = std::make_shared<Interp>(env);
  return interp->eval(e.get(), nullptr);
}

ExprP value_to_expr(const Value& v, Type t) {
  switch (t->kind) {
    case TK::Int:
    case TK::Nat: return mk_num(t, v.num);
    case TK::Bool: return mk_bool(v.b);
    case TK::Unit: return mk_unit();
    case TK::Prod: return mk_pair(value_to_expr(*v.x, t->a), value_to_expr(*v.y, t->b));
    case TK::List: {
      std::vector<ExprP> elems;
      for (const Value& x : v.list_items()) elems.push_back(value_to_expr(x, t->a));
      return mk_list(t->a, elems);
    }
    case TK::Option:
      if (v.tag == Value::Tag::None) return mk_ident(idents::instantiate(idents::none(), {t->a}));
      return mk_app(mk_ident(idents::instantiate(idents::some(), {t->a})), value_to_expr(*v.x, t->a));
    default: throw std::invalid_argument("value_to_expr: no literal form for type " + show(t));
  }
}

namespace {

struct DeepTask {
  const std::function<void()>* f;
  std::exception_ptr err;
};

void* deep_entry(void* p) {
  auto* t = static_cast<DeepTask*>(p);
  try {
    (*t->f)();
  } catch (...) {
    t->err = std::current_exception();
  }
  return nullptr;
}

}  // namespace

void run_deep(const std::function<void()>& f) {
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, size_t(1) << 30);
  DeepTask task{&f, nullptr};
  pthread_t th;
  if (pthread_create(&th, &attr, deep_entry, &task) != 0) {
    pthread_attr_destroy(&attr);
    f();
    return;
  }
  pthread_join(th, nullptr);
  pthread_attr_destroy(&attr);
  if (task.err) std::rethrow_exception(task.err);
}

}  // namespace rw
