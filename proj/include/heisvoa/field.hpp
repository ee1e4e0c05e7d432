#pragma once

// Prime field arithmetic and characteristic-p binomial coefficients.

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace heisvoa {

/// An element of GF(p). The residue is always canonical (0 <= value < p);
/// the modulus lives in the PrimeField that produced it.
struct Fp {
  std::uint32_t value = 0;

  constexpr Fp() = default;
  constexpr explicit Fp(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(const Fp&, const Fp&) = default;
  friend std::ostream& operator<<(std::ostream& os, Fp a) { return os << a.value; }
};

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

/// Runtime prime field GF(p). Validates primality on construction.
class PrimeField {
 public:
  static constexpr std::uint32_t kMaxPrime = (1u << 31) - 1;
  static constexpr std::uint32_t kTableLimit = 1u << 16;

  explicit PrimeField(std::uint32_t p) : p_(p) {
    if (!is_prime(p) || p > kMaxPrime)
      throw std::invalid_argument("characteristic must be a prime below 2^31, got " + std::to_string(p));
    if (p <= kTableLimit) {
      fact_.resize(p);
      inv_fact_.resize(p);
      fact_[0] = Fp(1);
      for (std::uint32_t i = 1; i < p; ++i) fact_[i] = mul(fact_[i - 1], Fp(i));
      inv_fact_[p - 1] = inv(fact_[p - 1]);
      for (std::uint32_t i = p - 1; i > 0; --i) inv_fact_[i - 1] = mul(inv_fact_[i], Fp(i));
    }
  }

  std::uint32_t p() const { return p_; }

  Fp operator()(std::int64_t n) const {
    std::int64_t r = n % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return Fp(static_cast<std::uint32_t>(r));
  }

  Fp zero() const { return Fp(0); }
  Fp one() const { return Fp(1); }

  Fp add(Fp a, Fp b) const {
    std::uint32_t s = a.value + b.value;
    return Fp(s >= p_ ? s - p_ : s);
  }
  Fp sub(Fp a, Fp b) const { return Fp(a.value >= b.value ? a.value - b.value : a.value + p_ - b.value); }
  Fp neg(Fp a) const { return Fp(a.value == 0 ? 0 : p_ - a.value); }
  Fp mul(Fp a, Fp b) const {
    return Fp(static_cast<std::uint32_t>(static_cast<std::uint64_t>(a.value) * b.value % p_));
  }

  Fp pow(Fp a, std::uint64_t e) const {
    Fp r = one();
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  Fp inv(Fp a) const {
    if (a.value == 0) throw std::domain_error("inverse of zero in GF(" + std::to_string(p_) + ")");
    return pow(a, p_ - 2);
  }
  Fp div(Fp a, Fp b) const { return mul(a, inv(b)); }

  /// (-1)^k
  Fp sign(std::int64_t k) const { return (k % 2 == 0) ? one() : neg(one()); }

  /// C(m, n) for m, n >= 0, by Lucas' theorem (digit-wise in base p).
  Fp binom(std::uint64_t m, std::uint64_t n) const {
    if (n > m) return zero();
    Fp r = one();
    while (n > 0 || m > 0) {
      std::uint32_t mi = static_cast<std::uint32_t>(m % p_);
      std::uint32_t ni = static_cast<std::uint32_t>(n % p_);
      if (ni > mi) return zero();
      r = mul(r, small_binom(mi, ni));
      m /= p_;
      n /= p_;
    }
    return r;
  }

  /// C(m, k) for any integer m, using C(-n, k) = (-1)^k C(n+k-1, k) when m < 0.
  Fp binom_signed_top(std::int64_t m, std::uint64_t k) const {
    if (m >= 0) return binom(static_cast<std::uint64_t>(m), k);
    std::uint64_t n = static_cast<std::uint64_t>(-m);
    Fp b = binom(n + k - 1, k);
    return (k % 2 == 0) ? b : neg(b);
  }

  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

 private:
  Fp small_binom(std::uint32_t m, std::uint32_t n) const {
    if (!fact_.empty()) return mul(fact_[m], mul(inv_fact_[n], inv_fact_[m - n]));
    Fp num = one(), den = one();
    for (std::uint32_t i = 0; i < n; ++i) {
      num = mul(num, Fp(m - i));
      den = mul(den, Fp(i + 1));
    }
    return div(num, den);
  }

  std::uint32_t p_;
  std::vector<Fp> fact_;
  std::vector<Fp> inv_fact_;
};

/// C(m, n) mod p. Throws std::invalid_argument if p is not prime.
inline Fp binom_mod_p(std::uint64_t m, std::uint64_t n, std::uint32_t p) { return PrimeField(p).binom(m, n); }

/// C(-n, k) mod p for n >= 1.
inline Fp signed_binom(std::uint64_t n, std::uint64_t k, std::uint32_t p) {
  if (n == 0) throw std::invalid_argument("signed_binom requires n >= 1");
  return PrimeField(p).binom_signed_top(-static_cast<std::int64_t>(n), k);
}

}  // namespace heisvoa
