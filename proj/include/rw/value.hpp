#pragma once

#include "rw/bigint.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace rw {

struct Value;
using ValueFn = std::function<Value(const Value&)>;

// Semantic domain of the reference interpreter. Lists are cons cells so that
// cons is O(1).
struct Value {
  enum class Tag : uint8_t { Num, Bool, Unit, Pair, Nil, Cons, None, Some, Fun };
  Tag tag = Tag::Unit;
  Int num;
  bool b = false;
  std::shared_ptr<const Value> x, y;
  std::shared_ptr<const ValueFn> fn;

  static Value number(Int n);
  static Value boolean(bool v);
  static Value unit();
  static Value pair(Value a, Value b);
  static Value nil();
  static Value cons(Value h, Value t);
  static Value none();
  static Value some(Value v);
  static Value function(ValueFn f);
  static Value list(const std::vector<Value>& items);

  Value apply(const Value& arg) const;
  std::vector<Value> list_items() const;
  bool is_fun() const { return tag == Tag::Fun; }
};

// Structural equality on first-order values. Throws on functions.
bool operator==(const Value& a, const Value& b);
inline bool operator!=(const Value& a, const Value& b) { return !(a == b); }

std::string show(const Value& v);

}  // namespace rw
