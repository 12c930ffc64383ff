#include "rw/value.hpp"

#include <stdexcept>

namespace rw {

Value Value::number(Int n) {
  Value v;
  v.tag = Tag::Num;
  v.num = std::move(n);
  return v;
}
Value Value::boolean(bool b) {
  Value v;
  v.tag = Tag::Bool;
  v.b = b;
  return v;
}
Value Value::unit() { return Value{}; }
Value Value::pair(Value a, Value b) {
  Value v;
  v.tag = Tag::Pair;
  v.x = std::make_shared<const Value>(std::move(a));
  v.y = std::make_shared<const Value>(std::move(b));
  return v;
}
Value Value::nil() {
  Value v;
  v.tag = Tag::Nil;
  return v;
}
Value Value::cons(Value h, Value t) {
  Value v;
  v.tag = Tag::Cons;
  v.x = std::make_shared<const Value>(std::move(h));
  v.y = std::make_shared<const Value>(std::move(t));
  return v;
}
Value Value::none() {
  Value v;
  v.tag = Tag::None;
  return v;
}
Value Value::some(Value a) {
  Value v;
  v.tag = Tag::Some;
  v.x = std::make_shared<const Value>(std::move(a));
  return v;
}
Value Value::function(ValueFn f) {
  Value v;
  v.tag = Tag::Fun;
  v.fn = std::make_shared<const ValueFn>(std::move(f));
  return v;
}
Value Value::list(const std::vector<Value>& items) {
  Value l = nil();
  for (size_t i = items.size(); i-- > 0;) l = cons(items[i], std::move(l));
  return l;
}

Value Value::apply(const Value& arg) const {
  if (tag != Tag::Fun) throw std::logic_error("apply: not a function value");
  return (*fn)(arg);
}

std::vector<Value> Value::list_items() const {
  std::vector<Value> out;
  const Value* cur = this;
  while (cur->tag == Tag::Cons) {
    out.push_back(*cur->x);
    cur = cur->y.get();
  }
  if (cur->tag != Tag::Nil) throw std::logic_error("list_items: not a list");
  return out;
}

bool operator==(const Value& a, const Value& b) {
  const Value* p = &a;
  const Value* q = &b;
  // Iterate along list spines to keep recursion shallow on long lists.
  while (true) {
    if (p->tag == Value::Tag::Fun || q->tag == Value::Tag::Fun)
      throw std::logic_error("cannot compare function values");
    if (p->tag != q->tag) return false;
    switch (p->tag) {
      case Value::Tag::Num: return p->num == q->num;
      case Value::Tag::Bool: return p->b == q->b;
      case Value::Tag::Unit:
      case Value::Tag::Nil:
      case Value::Tag::None: return true;
      case Value::Tag::Some: return *p->x == *q->x;
      case Value::Tag::Pair:
      case Value::Tag::Cons:
        if (!(*p->x == *q->x)) return false;
        p = p->y.get();
        q = q->y.get();
        continue;
      case Value::Tag::Fun: return false;
    }
  }
}

std::string show(const Value& v) {
  switch (v.tag) {
    case Value::Tag::Num: return v.num.str();
    case Value::Tag::Bool: return v.b ? "true" : "false";
    case Value::Tag::Unit: return "()";
    case Value::Tag::Pair: return "(" + show(*v.x) + ", " + show(*v.y) + ")";
    case Value::Tag::Nil:
    case Value::Tag::Cons: {
      std::string s = "[";
      bool first = true;
      for (const auto& it : v.list_items()) {
        if (!first) s += "; ";
        first = false;
        s += show(it);
      }
      return s + "]";
    }
    case Value::Tag::None: return "None";
    case Value::Tag::Some: return "Some " + show(*v.x);
    case Value::Tag::Fun: return "<fun>";
  }
  return "?";
}

}  // namespace rw
