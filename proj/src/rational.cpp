#include "quantguard/rational.hpp"

#include <cctype>
#include <numeric>

#include "quantguard/errors.hpp"

namespace quantguard {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  if (!all_digits(s) || s.size() > 19) {
    throw UsageError("malformed gamma: bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  std::uint64_t v = 0;
  for (char c : s) v = v * 10 + static_cast<std::uint64_t>(c - '0');
  return v;
}

}  // namespace

RationalLevel RationalLevel::from_integers(std::uint64_t n1, std::uint64_t n2) {
  if (n2 == 0) throw UsageError("gamma denominator must be positive");
  if (n1 == 0 || n1 >= n2) throw UsageError("gamma must lie strictly inside (0,1)");
  const std::uint64_t g = std::gcd(n1, n2);
  return RationalLevel{n1 / g, n2 / g};
}

RationalLevel RationalLevel::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const std::uint64_t a = parse_u64(text.substr(0, slash), "numerator");
    const std::uint64_t b = parse_u64(text.substr(slash + 1), "denominator");
    return from_integers(a, b);
  }
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    throw UsageError("malformed gamma '" + std::string(text) +
                     "': expected a decimal like 0.95 or a fraction like 19/20");
  }
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = text.substr(dot + 1);
  if (!whole.empty() && whole != "0") {
    throw UsageError("gamma must lie strictly inside (0,1): '" + std::string(text) + "'");
  }
  if (frac.empty() || frac.size() > 18 || !all_digits(frac)) {
    throw UsageError("malformed gamma '" + std::string(text) + "'");
  }
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  for (char c : frac) {
    num = num * 10 + static_cast<std::uint64_t>(c - '0');
    den *= 10;
  }
  return from_integers(num, den);
}

std::string RationalLevel::str() const {
  return std::to_string(n1) + "/" + std::to_string(n2);
}

}  // namespace quantguard
