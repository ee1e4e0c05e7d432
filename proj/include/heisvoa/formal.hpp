#pragma once

// Characteristic-p formal calculus on finitely supported Laurent polynomials:
// Hasse derivatives, formal Taylor shifts, binomial expansions and the
// delta-function identities, all checked coefficient-wise on finite windows.

#include <concepts>
#include <cstdint>
#include <map>
#include <utility>

#include "heisvoa/field.hpp"

namespace heisvoa {

/// A GF(p)-linear space whose elements are values of type `Space::value_type`.
template <class S>
concept LinearSpace = requires(const S& s, const typename S::value_type& a, Fp c) {
  typename S::value_type;
  { s.field() } -> std::convertible_to<const PrimeField&>;
  { s.zero() } -> std::convertible_to<typename S::value_type>;
  { s.add(a, a) } -> std::convertible_to<typename S::value_type>;
  { s.scale(c, a) } -> std::convertible_to<typename S::value_type>;
  { s.is_zero(a) } -> std::convertible_to<bool>;
};

/// The field itself as a one-dimensional space.
class ScalarSpace {
 public:
  using value_type = Fp;
  explicit ScalarSpace(const PrimeField& F) : F_(&F) {}
  const PrimeField& field() const { return *F_; }
  Fp zero() const { return F_->zero(); }
  Fp add(Fp a, Fp b) const { return F_->add(a, b); }
  Fp scale(Fp c, Fp a) const { return F_->mul(c, a); }
  bool is_zero(Fp a) const { return a.value == 0; }

 private:
  const PrimeField* F_;
};

/// Sum_e coeff[e] x^e with finitely many nonzero coefficients in V.
/// Zero coefficients are never stored.
template <class V>
class LaurentPoly {
 public:
  using coefficient_type = V;
  using container = std::map<std::int64_t, V>;

  LaurentPoly() = default;

  template <LinearSpace S>
  static LaurentPoly monomial(const S& space, std::int64_t e, V c) {
    LaurentPoly f;
    f.add_term(space, e, std::move(c));
    return f;
  }

  template <LinearSpace S>
  void add_term(const S& space, std::int64_t e, const V& c) {
    if (space.is_zero(c)) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
      return;
    }
    it->second = space.add(it->second, c);
    if (space.is_zero(it->second)) terms_.erase(it);
  }

  /// Coefficient of x^e (zero when absent).
  template <LinearSpace S>
  V coeff(const S& space, std::int64_t e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? space.zero() : it->second;
  }

  const container& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  friend bool operator==(const LaurentPoly&, const LaurentPoly&) = default;

 private:
  container terms_;
};

template <LinearSpace S>
class LaurentSpace {
 public:
  using value_type = LaurentPoly<typename S::value_type>;
  explicit LaurentSpace(S inner) : inner_(std::move(inner)) {}
  const PrimeField& field() const { return inner_.field(); }
  const S& inner() const { return inner_; }
  value_type zero() const { return {}; }
  value_type add(const value_type& a, const value_type& b) const {
    value_type r = a;
    for (const auto& [e, c] : b.terms()) r.add_term(inner_, e, c);
    return r;
  }
  value_type scale(Fp c, const value_type& a) const {
    value_type r;
    if (c.value == 0) return r;
    for (const auto& [e, v] : a.terms()) r.add_term(inner_, e, inner_.scale(c, v));
    return r;
  }
  bool is_zero(const value_type& a) const { return a.empty(); }

 private:
  S inner_;
};

/// k-th Hasse derivative: x^m -> C(m, k) x^{m-k}, with C(m, k) for negative m
/// taken as the integer binomial reduced mod p.
template <LinearSpace S>
LaurentPoly<typename S::value_type> hasse_derive(const S& space, std::uint64_t k,
                                                 const LaurentPoly<typename S::value_type>& f) {
  const PrimeField& F = space.field();
  LaurentPoly<typename S::value_type> out;
  for (const auto& [m, c] : f.terms()) {
    const Fp b = F.binom_signed_top(m, k);
    if (b.value == 0) continue;
    out.add_term(space, m - static_cast<std::int64_t>(k), space.scale(b, c));
  }
  return out;
}

/// Exponent window [lo, hi] (inclusive) for finite coefficient comparisons.
struct Window {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool contains(std::int64_t e) const { return lo <= e && e <= hi; }
};

/// Two-variable polynomial in x (outer key) and z (inner key).
template <class V>
using BiLaurent = std::map<std::pair<std::int64_t, std::int64_t>, V>;

/// Coefficients of x^a z^b in f(x+z) = sum_k z^k d^{(k)} f(x), for a in
/// x_window and 0 <= b <= max_z. Each coefficient comes from the single term
/// x^{a+b} of f, so the result is exact wherever a+b lies in f's support.
template <LinearSpace S>
BiLaurent<typename S::value_type> taylor_shift(const S& space, const LaurentPoly<typename S::value_type>& f,
                                               Window x_window, std::uint64_t max_z) {
  const PrimeField& F = space.field();
  BiLaurent<typename S::value_type> out;
  for (const auto& [m, c] : f.terms()) {
    for (std::uint64_t b = 0; b <= max_z; ++b) {
      const std::int64_t a = m - static_cast<std::int64_t>(b);
      if (!x_window.contains(a)) continue;
      const Fp coef = F.binom_signed_top(m, b);
      if (coef.value == 0) continue;
      auto v = space.scale(coef, c);
      auto key = std::make_pair(a, static_cast<std::int64_t>(b));
      auto it = out.find(key);
      if (it == out.end()) {
        out.emplace(key, std::move(v));
      } else {
        it->second = space.add(it->second, v);
        if (space.is_zero(it->second)) out.erase(it);
      }
    }
  }
  return out;
}

/// (s x1 + t x2)^n expanded in nonnegative powers of the second summand,
/// returned as a map (exponent of x1, exponent of x2) -> coefficient, for
/// second-summand powers 0..max_second.
inline BiLaurent<Fp> binomial_expand(const PrimeField& F, std::int64_t n, Fp s, Fp t, std::uint64_t max_second) {
  BiLaurent<Fp> out;
  for (std::uint64_t k = 0; k <= max_second; ++k) {
    Fp c = F.binom_signed_top(n, k);
    if (c.value == 0) continue;
    // s^{n-k}: n-k may be negative, s must then be invertible.
    const std::int64_t first = n - static_cast<std::int64_t>(k);
    Fp sp = first >= 0 ? F.pow(s, static_cast<std::uint64_t>(first))
                       : F.pow(F.inv(s), static_cast<std::uint64_t>(-first));
    c = F.mul(c, F.mul(sp, F.pow(t, k)));
    if (c.value != 0) out[{first, static_cast<std::int64_t>(k)}] = c;
  }
  return out;
}

/// m-th then n-th Hasse derivative equals C(m+n, m) times the (m+n)-th one,
/// on every monomial x^e with e in the window.
inline bool verify_hasse_composition(const PrimeField& F, std::uint64_t m, std::uint64_t n, Window window) {
  ScalarSpace sp(F);
  const Fp c = F.binom(m + n, m);
  for (std::int64_t e = window.lo; e <= window.hi; ++e) {
    auto f = LaurentPoly<Fp>::monomial(sp, e, F.one());
    auto lhs = hasse_derive(sp, m, hasse_derive(sp, n, f));
    auto rhs_raw = hasse_derive(sp, m + n, f);
    LaurentPoly<Fp> rhs;
    for (const auto& [ex, v] : rhs_raw.terms()) rhs.add_term(sp, ex, F.mul(c, v));
    if (!(lhs == rhs)) return false;
  }
  return true;
}

namespace detail {

// Outer variable x2, inner coefficients are Laurent polynomials in x1.
using DeltaPoly = LaurentPoly<LaurentPoly<Fp>>;

inline DeltaPoly delta_x2_inverse(const PrimeField& F, std::int64_t radius) {
  // x2^{-1} delta(x1/x2) = sum_k x1^k x2^{-k-1}
  ScalarSpace sp(F);
  LaurentSpace<ScalarSpace> ls(sp);
  DeltaPoly d;
  for (std::int64_t k = -radius; k <= radius; ++k)
    d.add_term(ls, -k - 1, LaurentPoly<Fp>::monomial(sp, k, F.one()));
  return d;
}

inline BiLaurent<Fp> flatten(const DeltaPoly& d, std::int64_t radius) {
  BiLaurent<Fp> out;
  for (const auto& [b, inner] : d.terms())
    for (const auto& [a, c] : inner.terms())
      if (a >= -radius && a <= radius && b >= -radius && b <= radius) out[{a, b}] = c;
  return out;
}

inline BiLaurent<Fp> restrict_window(const BiLaurent<Fp>& f, std::int64_t radius) {
  BiLaurent<Fp> out;
  for (const auto& [key, c] : f)
    if (key.first >= -radius && key.first <= radius && key.second >= -radius && key.second <= radius)
      out[key] = c;
  return out;
}

}  // namespace detail

/// Checks, for every coefficient x1^a x2^b with |a|, |b| <= radius, that
///   d_{x2}^{(n)} x2^{-1} delta(x1/x2)
///     = (x1 - x2)^{-n-1} - (-x2 + x1)^{-n-1}
///     = (-1)^n d_{x1}^{(n)} x2^{-1} delta(x1/x2).
inline bool verify_delta_identity(const PrimeField& F, std::uint64_t n, std::int64_t radius) {
  ScalarSpace sp(F);
  LaurentSpace<ScalarSpace> ls(sp);
  const std::int64_t N = static_cast<std::int64_t>(n);
  // Enlarge the materialized delta so every windowed coefficient is exact.
  const std::int64_t r = radius + N + 1;
  const auto delta = detail::delta_x2_inverse(F, r);

  const auto lhs = detail::flatten(hasse_derive(ls, n, delta), radius);

  detail::DeltaPoly dx1;
  for (const auto& [b, inner] : delta.terms()) dx1.add_term(ls, b, hasse_derive(sp, n, inner));
  auto rhs2 = detail::flatten(dx1, radius);
  if (n % 2 == 1)
    for (auto& [key, c] : rhs2) c = F.neg(c);

  // Middle expression: both expansions are in nonnegative powers of the second summand.
  const std::uint64_t terms = static_cast<std::uint64_t>(2 * r + 1);
  const auto e1 = binomial_expand(F, -N - 1, F.one(), F.neg(F.one()), terms);
  BiLaurent<Fp> mid;
  for (const auto& [key, c] : e1) mid[key] = F.add(mid[key], c);
  const auto e2 = binomial_expand(F, -N - 1, F.neg(F.one()), F.one(), terms);
  for (const auto& [key, c] : e2) {
    // e2 is written in (x2, x1) order: first summand -x2, second x1.
    auto swapped = std::make_pair(key.second, key.first);
    mid[swapped] = F.sub(mid[swapped], c);
  }
  std::erase_if(mid, [](const auto& kv) { return kv.second.value == 0; });
  mid = detail::restrict_window(mid, radius);

  return lhs == mid && mid == rhs2;
}

}  // namespace heisvoa
