#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace capflow {

// |a - b| relative to the larger magnitude; 0 when both sides are zero.
inline double relative_gap(double a, double b) {
  if (a == b) return 0.0;
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) / scale;
}

// Residual of the identity lhs == rhs, measured against the magnitude of the
// terms that produced both sides. Using the term scale keeps the residual
// meaningful when the identity's true value sits near zero (heavy
// cancellation), and it scales linearly with the data, so tolerances are
// unit-free.
inline double identity_residual(double lhs, double rhs, double term_scale) {
  const double gap = std::fabs(lhs - rhs);
  if (gap == 0.0) return 0.0;
  const double denom = std::max({std::fabs(lhs), std::fabs(rhs), term_scale});
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return gap / denom;
}

inline bool nearly_equal(double a, double b, double tol) {
  return relative_gap(a, b) <= tol;
}

// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, static_cast<std::size_t>(ptr - buf));
}

inline std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

inline std::optional<long long> parse_integer(std::string_view text) {
  long long value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

// Fixed-point rendering. snprintf converts the exact binary value with ties
// resolved to the even digit; "-0.0" is normalized to "0.0".
inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string text(buf);
  if (text.front() == '-' &&
      text.find_first_not_of("0.", 1) == std::string::npos) {
    text.erase(0, 1);
  }
  return text;
}

}  // namespace capflow
