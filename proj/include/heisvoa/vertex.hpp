#pragma once

// Vertex operators Y_W(u, x) for u in V(l,0), acting on any module W that
// exposes the Heisenberg modes. For a leading factor a_{-n} of u = a_{-n} u',
//
//   Y_W(a_{-n} u', x) = A Y_W(u', x) + Y_W(u', x) B,
//   A =  sum_{j>=0} C(n+j-1, j) a_{-n-j} x^j,
//   B = -(-1)^n sum_{j>=0} C(n+j-1, j) a_j x^{-n-j},
//
// with Y_W(1, x) = 1. Each coefficient u_m w is computed exactly.

#include <concepts>
#include <cstdint>
#include <map>
#include <tuple>
#include <type_traits>
#include <unordered_map>

#include "heisvoa/fock.hpp"
#include "heisvoa/formal.hpp"

namespace heisvoa {

/// A module over the Heisenberg modes. `truncation_bound(wt, len, w)` must return K with
/// u_k w = 0 for all k >= K whenever u is a creation monomial of weight wt and length len;
/// `annihilation_reach(w)` bounds the positive modes that can act nontrivially on w.
template <class A>
concept ModeAction = LinearSpace<A> && requires(const A& a, const typename A::value_type& w, Mode m) {
  { a.act(m, w) } -> std::convertible_to<typename A::value_type>;
  { a.annihilation_reach(w) } -> std::convertible_to<std::int64_t>;
  { a.truncation_bound(std::int64_t{}, std::uint32_t{}, w) } -> std::convertible_to<std::int64_t>;
};

/// V(l,0) or M(l, lambda0) acting on itself through act_mode.
class FockAction : public FockSpace {
 public:
  explicit FockAction(const FockContext& ctx) : FockSpace(ctx.field()), ctx_(&ctx) {}
  explicit FockAction(FockContext&&) = delete;  // keeps a pointer to the context
  const FockContext& context() const { return *ctx_; }
  FockVector act(Mode m, const FockVector& w) const { return act_mode(*ctx_, m, w); }
  std::int64_t annihilation_reach(const FockVector& w) const { return w.max_weight(); }
  std::int64_t truncation_bound(std::int64_t weight, std::uint32_t, const FockVector& w) const {
    return weight + w.max_weight();
  }

 private:
  const FockContext* ctx_;
};

/// Coefficients of Y(u, x)w for exponents inside `window`. `singular_complete` records
/// whether the window reaches below the truncation bound, i.e. every nonzero coefficient
/// with exponent < window.lo is known to vanish.
template <class V>
struct OperatorLaurent {
  LaurentPoly<V> series;
  Window window;
  bool singular_complete = false;
};

template <ModeAction A>
class VertexEvaluator {
 public:
  using vector_type = typename A::value_type;

  explicit VertexEvaluator(A action) : action_(std::move(action)) {}

  const A& action() const { return action_; }
  const PrimeField& field() const { return action_.field(); }

  /// u_m w for a creation monomial u.
  vector_type product(const FockMonomial& u, std::int64_t m, const vector_type& w) {
    if constexpr (std::is_same_v<vector_type, FockVector>) {
      FockVector out;
      for (const auto& [mono, c] : w.terms()) out.add_scaled(field(), c, cached(u, m, mono));
      return out;
    } else {
      return compute(u, m, w);
    }
  }

  /// u_m w for an arbitrary u in V(l,0).
  vector_type product(const FockVector& u, std::int64_t m, const vector_type& w) {
    vector_type out = action_.zero();
    for (const auto& [mono, c] : u.terms()) out = action_.add(out, action_.scale(c, product(mono, m, w)));
    return out;
  }

  /// K such that u_k w = 0 for k >= K.
  std::int64_t truncation_bound(const FockVector& u, const vector_type& w) const {
    std::int64_t k = 0;
    for (const auto& [mono, c] : u.terms()) k = std::max(k, action_.truncation_bound(mono.weight(), mono.length(), w));
    return k;
  }

  /// Y(u, x)w restricted to exponents in `window` (exponent of u_m w is -m-1).
  OperatorLaurent<vector_type> vertex_operator(const FockVector& u, const vector_type& w, Window window) {
    if (window.lo > window.hi) throw std::invalid_argument("empty exponent window");
    OperatorLaurent<vector_type> out;
    out.window = window;
    const std::int64_t bound = truncation_bound(u, w);
    out.singular_complete = window.lo <= -bound;
    for (std::int64_t e = std::max(window.lo, -bound); e <= window.hi; ++e)
      out.series.add_term(action_, e, product(u, -e - 1, w));
    return out;
  }

  std::size_t cache_size() const { return cache_.size(); }

 private:
  // Monomials are interned so a cache key is three integers.
  std::uint32_t intern(const FockMonomial& m) {
    auto it = ids_.find(m);
    if (it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(ids_.size());
    ids_.emplace(m, id);
    return id;
  }

  const FockVector& cached(const FockMonomial& u, std::int64_t m, const FockMonomial& w) {
    const std::uint64_t key = (static_cast<std::uint64_t>(intern(u)) << 40) ^
                              (static_cast<std::uint64_t>(intern(w)) << 12) ^
                              static_cast<std::uint64_t>(m + 2048);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    FockVector value = compute(u, m, FockVector::basis(w));
    return cache_.emplace(key, std::move(value)).first->second;
  }

  vector_type compute(const FockMonomial& u, std::int64_t m, const vector_type& w) {
    if (m < -2000 || m > 2000) throw std::out_of_range("mode index outside the supported range");
    const PrimeField& F = field();
    if (u.is_vacuum()) return m == -1 ? w : action_.zero();
    if (action_.is_zero(w)) return w;
    if (m >= action_.truncation_bound(u.weight(), u.length(), w)) return action_.zero();

    const Factor lead = u.factors().front();
    const std::int64_t n = lead.depth;
    const FockMonomial rest = u.without(lead.gen, n);
    vector_type out = action_.zero();

    // A-part: sum_j C(n+j-1, j) a_{-n-j} (rest_{m+j} w)
    const std::int64_t rest_bound = action_.truncation_bound(rest.weight(), rest.length(), w);
    for (std::int64_t j = 0; m + j < rest_bound; ++j) {
      const Fp c = F.binom(static_cast<std::uint64_t>(n + j - 1), static_cast<std::uint64_t>(j));
      if (c.value == 0) continue;
      vector_type inner = product(rest, m + j, w);
      if (action_.is_zero(inner)) continue;
      out = action_.add(out, action_.scale(c, action_.act(Mode{lead.gen, -n - j}, inner)));
    }

    // B-part: -(-1)^n sum_j C(n+j-1, j) rest_{m-n-j} (a_j w)
    const Fp sign = F.neg(F.sign(n));
    const std::int64_t reach = action_.annihilation_reach(w);
    for (std::int64_t j = 0; j <= reach; ++j) {
      const Fp c = F.mul(sign, F.binom(static_cast<std::uint64_t>(n + j - 1), static_cast<std::uint64_t>(j)));
      if (c.value == 0) continue;
      vector_type aw = action_.act(Mode{lead.gen, j}, w);
      if (action_.is_zero(aw)) continue;
      out = action_.add(out, action_.scale(c, product(rest, m - n - j, aw)));
    }
    return out;
  }

  A action_;
  std::unordered_map<FockMonomial, std::uint32_t, FockMonomialHash> ids_;
  std::unordered_map<std::uint64_t, FockVector> cache_;
};

/// u_n v in V(l,0) (or in M(l, lambda0) when the context carries a zero-mode character).
inline FockVector product_nth(const FockContext& ctx, const FockVector& u, std::int64_t n, const FockVector& v) {
  VertexEvaluator<FockAction> ev{FockAction(ctx)};
  return ev.product(u, n, v);
}

inline OperatorLaurent<FockVector> vertex_operator(const FockContext& ctx, const FockVector& u, const FockVector& v,
                                                   Window window) {
  VertexEvaluator<FockAction> ev{FockAction(ctx)};
  return ev.vertex_operator(u, v, window);
}

}  // namespace heisvoa
