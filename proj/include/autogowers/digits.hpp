#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "autogowers/value.hpp"

namespace autogowers {

/// Base-k digit word, most significant digit first. Empty word = 0.
struct DigitWord {
  int base = 2;
  std::vector<int> digits;

  DigitWord() = default;
  DigitWord(int k, std::vector<int> ds) : base(k), digits(std::move(ds)) {
    for (int d : digits)
      if (d < 0 || d >= base) throw std::invalid_argument("digit out of range");
  }

  size_t size() const { return digits.size(); }
  bool empty() const { return digits.empty(); }

  BigInt value() const {
    BigInt v = 0;
    for (int d : digits) v = v * base + d;
    return v;
  }

  std::uint64_t value_u64() const {
    std::uint64_t v = 0;
    for (int d : digits) v = v * static_cast<std::uint64_t>(base) + d;
    return v;
  }

  DigitWord concat(const DigitWord& other) const {
    if (base != other.base) throw std::invalid_argument("base mismatch");
    DigitWord w = *this;
    w.digits.insert(w.digits.end(), other.digits.begin(), other.digits.end());
    return w;
  }

  std::string str() const {
    std::string s;
    for (size_t i = 0; i < digits.size(); ++i) {
      if (base > 10 && i) s += '.';
      s += std::to_string(digits[i]);
    }
    return s;
  }

  friend bool operator==(const DigitWord& a, const DigitWord& b) {
    return a.base == b.base && a.digits == b.digits;
  }
};

/// (n)_k, or (n)_k^l when a length is given (truncated / zero-padded).
inline DigitWord expand(BigInt n, int k, int length = -1) {
  if (k < 2) throw std::invalid_argument("base must be >= 2");
  if (n < 0) throw std::invalid_argument("negative n");
  std::vector<int> ds;
  while (n > 0) {
    ds.push_back(static_cast<int>(n % k));
    n /= k;
  }
  if (length >= 0) {
    while (static_cast<int>(ds.size()) < length) ds.push_back(0);
    ds.resize(length);
  }
  std::reverse(ds.begin(), ds.end());
  return DigitWord(k, std::move(ds));
}

inline DigitWord expand(std::uint64_t n, int k, int length = -1) {
  return expand(BigInt(n), k, length);
}

/// length_k(n) = |(n)_k|
inline int digit_length(BigInt n, int k) {
  int l = 0;
  while (n > 0) {
    n /= k;
    ++l;
  }
  return l;
}

/// gcd_k^*: greatest common divisor of the set that is coprime to k.
/// Empty set (or {0}) yields 0 by the gcd convention upstream callers handle.
inline BigInt gcd_coprime_to(const std::vector<BigInt>& values, int k) {
  BigInt g = 0;
  for (const auto& v : values) g = boost::multiprecision::gcd(g, v);
  if (g == 0) return 0;
  // strip the part of g sharing factors with k
  while (true) {
    BigInt c = boost::multiprecision::gcd(g, BigInt(k));
    if (c == 1) break;
    while (g % c == 0) g /= c;
  }
  return g;
}

/// largest divisor of n coprime to k
inline std::uint64_t coprime_part(std::uint64_t n, std::uint64_t k) {
  while (true) {
    std::uint64_t g = std::gcd(n, k);
    if (g == 1) return n;
    while (n % g == 0) n /= g;
  }
}

}  // namespace autogowers
