#pragma once

#include <string>

#include "ratdyn/rational_map.hpp"
#include "ratdyn/registry.hpp"
#include "ratdyn/test_function.hpp"

namespace ratdyn {

// Map expressions:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary | unary)*     juxtaposition multiplies
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' integer)?
//   primary := number | 'z' | 'i' | '(' expr ')'
//
// Numbers are decimals with optional exponent; rationals are written as
// quotients (16/27). Division by a constant is folded into the numerator.
// A registry name, optionally followed by ':' and a parameter expression
// (power_map_n:3, quadratic_family:0.2+0.1i), selects a catalog map.
// Throws ParseError on malformed input and NotCoprime when numerator and
// denominator share a root.
RationalMap parse_map(const std::string& text);

// Same as parse_map but also reports the catalog record when the text names
// one.
struct ParsedMap {
  RationalMap map;
  std::string canonical;  // the input text, trimmed
  std::optional<ExampleRecord> example;
};
ParsedMap parse_map_spec(const std::string& text);

// Test-function expressions use the same grammar over z, zbar (also
// conj(z)), re(z), im(z) and i; division only by constants. The result is a
// monomial table in z and conj(z).
TestFunction parse_test_function(const std::string& text);

// A single complex number such as "0.5", "-2", "1+2i", "inf".
SpherePoint parse_point(const std::string& text);

}  // namespace ratdyn
