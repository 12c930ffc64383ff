#include "rw/bigint.hpp"

#include <stdexcept>

namespace rw {

std::string to_string(const Int& n) { return n.str(); }

std::optional<Int> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return std::nullopt;
  for (size_t j = i; j < s.size(); ++j)
    if (s[j] < '0' || s[j] > '9') return std::nullopt;
  return Int(s);
}

Int floor_div(const Int& a, const Int& b) {
  if (b == 0) return 0;
  Int q = a / b;
  Int r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

Int floor_mod(const Int& a, const Int& b) {
  if (b == 0) return a;
  Int r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

// Exponents past this would not fit in memory anyway.
static constexpr unsigned kMaxShift = 1u << 20;

Int pow_int(const Int& base, const Int& exp) {
  if (exp < 0) return 0;
  if (base == 0) return exp == 0 ? 1 : 0;
  if (base == 1) return 1;
  if (base == -1) return (exp % 2 == 0) ? 1 : -1;
  if (exp > kMaxShift) throw std::overflow_error("pow: exponent too large");
  return boost::multiprecision::pow(base, exp.convert_to<unsigned>());
}

Int log2_int(const Int& n) {
  if (n <= 0) return 0;
  return Int(boost::multiprecision::msb(n));
}

Int shiftr_int(const Int& a, const Int& s) {
  if (s < 0) return shiftl_int(a, -s);
  if (s > kMaxShift) return a < 0 ? Int(-1) : Int(0);
  unsigned k = s.convert_to<unsigned>();
  if (a >= 0) return a >> k;
  return floor_div(a, pow2(k));
}

Int shiftl_int(const Int& a, const Int& s) {
  if (s < 0) return shiftr_int(a, -s);
  if (s > kMaxShift) throw std::overflow_error("shiftl: shift too large");
  return a * pow2(s.convert_to<unsigned>());
}

// Two's-complement bitwise ops on arbitrary-precision integers, evaluated on a
// width that covers both operands.
static Int twos(const Int& a, unsigned w) { return a >= 0 ? a : pow2(w) + a; }
static Int untwos(const Int& a, unsigned w) {
  return bit_test(a, w - 1) ? a - pow2(w) : a;
}
static unsigned width_for(const Int& a, const Int& b) {
  unsigned w = std::max(bit_length(a < 0 ? Int(-a) : a), bit_length(b < 0 ? Int(-b) : b));
  return w + 2;
}

Int land_int(const Int& a, const Int& b) {
  if (a >= 0 && b >= 0) return a & b;
  unsigned w = width_for(a, b);
  return untwos(twos(a, w) & twos(b, w), w);
}

Int lor_int(const Int& a, const Int& b) {
  if (a >= 0 && b >= 0) return a | b;
  unsigned w = width_for(a, b);
  return untwos(twos(a, w) | twos(b, w), w);
}

Int pow2(unsigned k) {
  Int r = 1;
  r <<= k;
  return r;
}

unsigned bit_length(const Int& n) {
  if (n <= 0) return 0;
  return static_cast<unsigned>(boost::multiprecision::msb(n)) + 1;
}

}  // namespace rw
