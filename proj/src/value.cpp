#include "canonrep/value.hpp"

#include <algorithm>
#include <cctype>

#include "canonrep/error.hpp"

namespace canonrep {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

Rational parse_integer(std::string_view s, std::string_view whole) {
  std::string_view body = s;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
  if (!all_digits(body)) throw Error(ErrorKind::Parse, "not a rational: '" + std::string(whole) + "'");
  std::string digits(s.front() == '+' ? s.substr(1) : s);
  return Rational(mpz_class(digits, 10));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw Error(ErrorKind::Parse, "empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_integer(text.substr(0, slash), text);
    std::string_view den_text = text.substr(slash + 1);
    if (!all_digits(den_text)) throw Error(ErrorKind::Parse, "bad denominator in '" + std::string(text) + "'");
    mpz_class den(std::string(den_text), 10);
    if (den == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + std::string(text) + "'");
    Rational q(num.get_num(), den);
    q.canonicalize();
    return q;
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    if (!frac_part.empty() && !all_digits(frac_part)) {
      throw Error(ErrorKind::Parse, "not a decimal: '" + std::string(text) + "'");
    }
    bool negative = !int_part.empty() && int_part.front() == '-';
    std::string_view int_digits = int_part;
    if (!int_digits.empty() && (int_digits.front() == '-' || int_digits.front() == '+')) int_digits.remove_prefix(1);
    if (int_digits.empty() && frac_part.empty()) throw Error(ErrorKind::Parse, "not a decimal: '" + std::string(text) + "'");
    if (!int_digits.empty() && !all_digits(int_digits)) throw Error(ErrorKind::Parse, "not a decimal: '" + std::string(text) + "'");
    std::string digits = std::string(int_digits) + std::string(frac_part);
    mpz_class num(digits.empty() ? "0" : digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_part.size());
    Rational q(negative ? mpz_class(-num) : num, den);
    q.canonicalize();
    return q;
  }
  return parse_integer(text, text);
}

std::string to_string(const Rational& q) { return q.get_str(); }

bool Value::is_zero() const {
  return std::all_of(coords.begin(), coords.end(), [](const Rational& c) { return sgn(c) == 0; });
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  const std::size_t n = std::min(a.coords.size(), b.coords.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = cmp(a.coords[i], b.coords[i]);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
  }
  return a.coords.size() <=> b.coords.size();
}

bool operator==(const Value& a, const Value& b) { return (a <=> b) == std::strong_ordering::equal; }

Value operator+(const Value& a, const Value& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "adding values of different dimension");
  Value out = a;
  for (std::size_t i = 0; i < out.coords.size(); ++i) out.coords[i] += b.coords[i];
  return out;
}

Value operator-(const Value& a, const Value& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "subtracting values of different dimension");
  Value out = a;
  for (std::size_t i = 0; i < out.coords.size(); ++i) out.coords[i] -= b.coords[i];
  return out;
}

Value operator*(const Rational& s, const Value& v) {
  Value out = v;
  for (auto& c : out.coords) c *= s;
  return out;
}

Value zero_value(std::size_t dim) { return Value(std::vector<Rational>(dim, Rational(0))); }

Value slice(const Value& v, std::size_t offset, std::size_t len) {
  return Value(std::vector<Rational>(v.coords.begin() + static_cast<std::ptrdiff_t>(offset),
                                     v.coords.begin() + static_cast<std::ptrdiff_t>(offset + len)));
}

Value concat(const Value& a, const Value& b) {
  Value out = a;
  out.coords.insert(out.coords.end(), b.coords.begin(), b.coords.end());
  return out;
}

Rational squared_norm(const Value& v) {
  Rational s = 0;
  for (const auto& c : v.coords) s += c * c;
  return s;
}

Rational max_abs_coord(const Value& v) {
  Rational m = 0;
  for (const auto& c : v.coords) {
    Rational a = abs(c);
    if (a > m) m = a;
  }
  return m;
}

std::vector<double> to_doubles(const Value& v) {
  std::vector<double> out;
  out.reserve(v.coords.size());
  for (const auto& c : v.coords) out.push_back(c.get_d());
  return out;
}

std::string to_string(const Value& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.coords.size(); ++i) {
    if (i) out += ",";
    out += v.coords[i].get_str();
  }
  return out + ")";
}

std::string to_string(const ValuePath& path) {
  std::string out = "[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += " ";
    out += to_string(path[i]);
  }
  return out + "]";
}

DiscreteLaw aggregate_law(std::vector<std::pair<Value, Rational>> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  DiscreteLaw out;
  for (auto& [v, p] : atoms) {
    if (!out.empty() && out.back().first == v) {
      out.back().second += p;
    } else {
      out.emplace_back(std::move(v), std::move(p));
    }
  }
  return out;
}

}  // namespace canonrep
