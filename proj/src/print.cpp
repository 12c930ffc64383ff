#include "rw/syntax.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace rw {

namespace {

struct Infix {
  int level;
  int lctx, rctx;
};

bool infix_of(const IdentFamily* f, Infix& out) {
  const std::string& s = f->symbol;
  if (s.empty() || s == "[]") return false;
  if (s == "||") out = {10, 11, 10};
  else if (s == "&&") out = {20, 21, 20};
  else if (s == "==" || s == "<" || s == "<=" || s == ">" || s == ">=") out = {30, 31, 31};
  else if (s == "::" || s == "++") out = {40, 41, 40};
  else if (s == ">>" || s == "<<") out = {45, 45, 46};
  else if (s == "+" || s == "-") out = {50, 50, 51};
  else if (s == "*" || s == "/" || s == "mod") out = {60, 60, 61};
  else if (s == "^") out = {70, 71, 70};
  else return false;
  return true;
}

constexpr int kPrefix = 75;
constexpr int kApp = 100;
constexpr int kAtom = 101;

class Printer {
 public:
  explicit Printer(PrintOptions o) : opts_(o) {}

  std::string run(const ExprP& e) {
    for (const BinderId& b : free_vars(e)) {
      std::string n = free_name(b);
      reserved_.insert(n);
    }
    std::string out;
    go(e.get(), 0, out);
    return out;
  }

 private:
  PrintOptions opts_;
  std::set<std::string> reserved_;
  std::unordered_map<uint64_t, std::string> names_;
  std::multiset<std::string> in_scope_;
  size_t fallback_ = 0;

  static std::string free_name(const BinderId& b) {
    if (b.hint && !b.hint->empty()) return *b.hint;
    return "free" + std::to_string(b.id);
  }

  bool taken(const std::string& n) const {
    return reserved_.count(n) || in_scope_.count(n) || idents::find(n) != nullptr || n == "in" || n == "let" ||
           n == "fun" || n == "if" || n == "then" || n == "else" || n == "true" || n == "false" || n == "mod";
  }

  std::string bind(const BinderId& b) {
    std::string name;
    if (b.hint && !b.hint->empty()) {
      name = *b.hint;
      while (taken(name)) name += "'";
    } else {
      do name = "v" + std::to_string(fallback_++);
      while (taken(name));
    }
    names_[b.id] = name;
    in_scope_.insert(name);
    return name;
  }

  void unbind(const BinderId& b) {
    auto it = names_.find(b.id);
    if (it == names_.end()) return;
    in_scope_.erase(in_scope_.find(it->second));
    names_.erase(it);
  }

  static void open(int need, int ctx, std::string& out) {
    if (ctx > need) out += "(";
  }
  static void close(int need, int ctx, std::string& out) {
    if (ctx > need) out += ")";
  }

  void literal(const Expr* e, int ctx, std::string& out) {
    switch (e->type->kind) {
      case TK::Bool: out += e->lit != 0 ? "true" : "false"; return;
      case TK::Unit: out += "()"; return;
      default: break;
    }
    std::string s = to_string(e->lit);
    bool neg = e->lit < 0;
    if (neg && ctx > kPrefix) out += "(";
    out += s;
    if (opts_.annotate && e->type->kind == TK::Nat) out += "%N";
    if (neg && ctx > kPrefix) out += ")";
  }

  void ident(const Expr* e, size_t nargs, std::string& out) {
    const Ident* id = e->ident;
    std::string s;
    if (id->is_clip() && id->fam == idents::clip_family()) {
      s = "clip_{" + to_string(id->lo) + "," + to_string(id->hi) + "}";
    } else if (id->fam == idents::nil()) {
      s = "[]";
    } else {
      Infix inf;
      s = infix_of(id->fam, inf) ? "(" + id->fam->symbol + ")" : id->fam->name;
    }
    if (e->eager) s = "eagerly " + s;
    bool ascribe = opts_.annotate && id->fam->nparams > 0 && nargs < id->fam->sem_arity + (id->fam->sem_arity == 0);
    if (ascribe)
      out += "(" + s + " : " + show(id->type) + ")";
    else
      out += s;
  }

  void go(const Expr* e, int ctx, std::string& out) {
    switch (e->kind) {
      case EK::Literal: literal(e, ctx, out); return;
      case EK::Var: {
        auto it = names_.find(e->binder.id);
        if (it != names_.end()) {
          out += it->second;
          return;
        }
        std::string n = free_name(e->binder);
        if (opts_.annotate && opts_.ascribe_free)
          out += "(" + n + " : " + show(e->type) + ")";
        else
          out += n;
        return;
      }
      case EK::IdentRef: {
        bool wrap = e->eager && ctx > kApp;
        if (wrap) out += "(";
        ident(e, 0, out);
        if (wrap) out += ")";
        return;
      }
      case EK::Abs: {
        open(0, ctx, out);
        out += "\xCE\xBB";
        std::vector<BinderId> bound;
        const Expr* cur = e;
        while (cur->kind == EK::Abs) {
          std::string n = bind(cur->binder);
          bound.push_back(cur->binder);
          out += " (" + n + " : " + show(cur->type->a) + ")";
          cur = cur->a.get();
        }
        out += " . ";
        go(cur, 0, out);
        for (auto it = bound.rbegin(); it != bound.rend(); ++it) unbind(*it);
        close(0, ctx, out);
        return;
      }
      case EK::LetIn: {
        open(0, ctx, out);
        std::vector<BinderId> bound;
        const Expr* cur = e;
        while (cur->kind == EK::LetIn) {
          std::string rhs;
          go(cur->a.get(), 0, rhs);
          std::string n = bind(cur->binder);
          bound.push_back(cur->binder);
          out += "let " + n + " := " + rhs + " in ";
          cur = cur->b.get();
        }
        go(cur, 0, out);
        for (auto it = bound.rbegin(); it != bound.rend(); ++it) unbind(*it);
        close(0, ctx, out);
        return;
      }
      case EK::App: app(e, ctx, out); return;
    }
  }

  void app(const Expr* e, int ctx, std::string& out) {
    std::vector<const Expr*> args;
    const Expr* head = e;
    while (head->kind == EK::App) {
      args.push_back(head->b.get());
      head = head->a.get();
    }
    std::reverse(args.begin(), args.end());
    if (head->kind == EK::IdentRef && !head->eager) {
      const Ident* id = head->ident;
      Infix inf;
      if (args.size() == 2 && infix_of(id->fam, inf)) {
        if (id->fam == idents::cons()) {
          std::vector<const Expr*> elems;
          const Expr* cur = e;
          bool is_list = false;
          while (true) {
            if (cur->kind == EK::IdentRef && cur->ident->fam == idents::nil()) {
              is_list = true;
              break;
            }
            if (cur->kind == EK::App && cur->a->kind == EK::App && cur->a->a->kind == EK::IdentRef &&
                cur->a->a->ident->fam == idents::cons() && !cur->a->a->eager) {
              elems.push_back(cur->a->b.get());
              cur = cur->b.get();
              continue;
            }
            break;
          }
          if (is_list) {
            out += "[";
            for (size_t i = 0; i < elems.size(); ++i) {
              if (i) out += "; ";
              go(elems[i], 0, out);
            }
            out += "]";
            return;
          }
        }
        open(inf.level, ctx, out);
        go(args[0], inf.lctx, out);
        out += " " + id->fam->symbol + " ";
        go(args[1], inf.rctx, out);
        close(inf.level, ctx, out);
        return;
      }
      if (args.size() == 2 && id->fam == idents::pair()) {
        out += "(";
        go(args[0], 0, out);
        out += ", ";
        go(args[1], 0, out);
        out += ")";
        return;
      }
    }
    open(kApp, ctx, out);
    if (head->kind == EK::IdentRef)
      ident(head, args.size(), out);
    else
      go(head, kAtom, out);
    for (const Expr* a : args) {
      out += " ";
      go(a, kAtom, out);
    }
    close(kApp, ctx, out);
  }
};

}  // namespace

std::string print(const ExprP& e, PrintOptions opts) {
  Printer p(opts);
  return p.run(e);
}

}  // namespace rw
