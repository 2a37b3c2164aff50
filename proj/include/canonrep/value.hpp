#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace canonrep {

using Rational = mpq_class;

/// Parses "p/q", "p", or a finite decimal such as "-0.25" exactly.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

/// A point of Q^d. Values order lexicographically by coordinate; that
/// order is the canonical sort order everywhere in the library.
struct Value {
  std::vector<Rational> coords;

  Value() = default;
  explicit Value(std::vector<Rational> c) : coords(std::move(c)) {}
  Value(std::initializer_list<Rational> c) : coords(c) {}

  std::size_t dim() const noexcept { return coords.size(); }
  bool is_zero() const;

  friend std::strong_ordering operator<=>(const Value& a, const Value& b);
  friend bool operator==(const Value& a, const Value& b);
};

Value operator+(const Value& a, const Value& b);
Value operator-(const Value& a, const Value& b);
Value operator*(const Rational& s, const Value& v);
Value zero_value(std::size_t dim);

/// Coordinates [offset, offset + len) of v.
Value slice(const Value& v, std::size_t offset, std::size_t len);
Value concat(const Value& a, const Value& b);

/// Squared Euclidean norm, exact.
Rational squared_norm(const Value& v);
Rational max_abs_coord(const Value& v);
std::vector<double> to_doubles(const Value& v);

std::string to_string(const Value& v);

using ValuePath = std::vector<Value>;
std::string to_string(const ValuePath& path);

/// A finitely supported law on values, sorted by value, no repeated values.
using DiscreteLaw = std::vector<std::pair<Value, Rational>>;

/// Sorts and merges equal values (probabilities summed).
DiscreteLaw aggregate_law(std::vector<std::pair<Value, Rational>> atoms);

}  // namespace canonrep
