#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace rw {

using Int = boost::multiprecision::cpp_int;

std::string to_string(const Int& n);
std::optional<Int> parse_int(const std::string& s);

// Integer operations with total, Coq-style conventions: division and modulo
// round toward negative infinity, x / 0 = 0, x mod 0 = x.
Int floor_div(const Int& a, const Int& b);
Int floor_mod(const Int& a, const Int& b);
Int pow_int(const Int& base, const Int& exp);  // negative exponent gives 0
Int log2_int(const Int& n);                    // floor log2, 0 for n <= 0
Int shiftr_int(const Int& a, const Int& s);    // negative shift shifts left
Int shiftl_int(const Int& a, const Int& s);
Int land_int(const Int& a, const Int& b);
Int lor_int(const Int& a, const Int& b);
Int pow2(unsigned k);
unsigned bit_length(const Int& n);  // for n >= 0

}  // namespace rw
