#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace quantguard {

/// The target no-alarm probability gamma as an exact coprime fraction n1/n2.
///
/// All three sample-size theorems depend on the denominator n2 exactly, so
/// gamma is only constructible from exact integer input (a decimal string or
/// an integer pair), never from binary floating point.
struct RationalLevel {
  std::uint64_t n1 = 0;  ///< numerator
  std::uint64_t n2 = 1;  ///< denominator

  /// Builds gamma = n1/n2 reduced to lowest terms. Requires 0 < n1/n2 < 1.
  static RationalLevel from_integers(std::uint64_t n1, std::uint64_t n2);

  /// Parses "0.95", ".95", or "19/20" with exact gcd reduction.
  /// Rejects anything else (signs, exponents, floats) with a UsageError.
  static RationalLevel parse(std::string_view text);

  double value() const { return static_cast<double>(n1) / static_cast<double>(n2); }
  double complement() const {  // 1 - gamma, computed from the exact pair
    return static_cast<double>(n2 - n1) / static_cast<double>(n2);
  }

  /// Canonical form "n1/n2".
  std::string str() const;

  bool operator==(const RationalLevel&) const = default;
};

}  // namespace quantguard
