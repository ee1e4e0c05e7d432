#pragma once

// The Heisenberg Fock space V(l,0) = S(h_+): sparse vectors over the PBW basis
// of creation monomials, the action of the modes u(n), and the divided-power
// derivations D^{(k)}.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "heisvoa/field.hpp"
#include "heisvoa/linalg.hpp"

namespace heisvoa {

/// u^{(gen)}(deg); `gen` is zero-based.
struct Mode {
  int gen = 0;
  std::int64_t deg = 0;
  friend constexpr auto operator<=>(const Mode&, const Mode&) = default;
};

/// u^{(gen)}(-depth)^exp inside a monomial.
struct Factor {
  std::int64_t depth = 1;
  int gen = 0;
  std::uint32_t exp = 1;
  friend constexpr auto operator<=>(const Factor&, const Factor&) = default;
};

/// Normal-ordered creation monomial; factors sorted by (depth, gen), exponents >= 1.
/// The empty monomial is the vacuum.
class FockMonomial {
 public:
  FockMonomial() = default;

  /// Builds a canonical monomial from arbitrary factors (merging repeats).
  explicit FockMonomial(std::vector<Factor> factors) {
    std::sort(factors.begin(), factors.end(),
              [](const Factor& a, const Factor& b) { return std::tie(a.depth, a.gen) < std::tie(b.depth, b.gen); });
    for (const auto& f : factors) {
      if (f.depth < 1) throw std::invalid_argument("creation factors need depth >= 1");
      if (f.exp == 0) continue;
      if (!factors_.empty() && factors_.back().depth == f.depth && factors_.back().gen == f.gen)
        factors_.back().exp += f.exp;
      else
        factors_.push_back(f);
    }
    for (const auto& f : factors_) {
      weight_ += f.depth * f.exp;
      length_ += f.exp;
    }
  }

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_vacuum() const { return factors_.empty(); }
  std::int64_t weight() const { return weight_; }
  /// Number of creation operators counted with multiplicity.
  std::uint32_t length() const { return length_; }

  std::uint32_t exponent(int gen, std::int64_t depth) const {
    for (const auto& f : factors_)
      if (f.gen == gen && f.depth == depth) return f.exp;
    return 0;
  }

  FockMonomial times(int gen, std::int64_t depth, std::uint32_t e = 1) const {
    auto fs = factors_;
    fs.push_back({depth, gen, e});
    return FockMonomial(std::move(fs));
  }

  /// Removes one copy of u^{(gen)}(-depth); the factor must be present.
  FockMonomial without(int gen, std::int64_t depth) const {
    FockMonomial out = *this;
    for (auto it = out.factors_.begin(); it != out.factors_.end(); ++it) {
      if (it->gen == gen && it->depth == depth) {
        if (--it->exp == 0) out.factors_.erase(it);
        out.weight_ -= depth;
        out.length_ -= 1;
        return out;
      }
    }
    throw std::logic_error("factor not present in monomial");
  }

  FockMonomial operator*(const FockMonomial& other) const {
    auto fs = factors_;
    fs.insert(fs.end(), other.factors_.begin(), other.factors_.end());
    return FockMonomial(std::move(fs));
  }

  /// Canonical basis order: by weight, then lexicographically on factors.
  friend std::strong_ordering operator<=>(const FockMonomial& a, const FockMonomial& b) {
    if (auto c = a.weight_ <=> b.weight_; c != 0) return c;
    return a.factors_ <=> b.factors_;
  }
  friend bool operator==(const FockMonomial& a, const FockMonomial& b) { return a.factors_ == b.factors_; }

  /// Grammar form: `u1(-2)^3 u2(-1)`, or `1` for the vacuum. Generators print one-based.
  std::string str() const {
    if (factors_.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& f : factors_) {
      if (!first) os << ' ';
      first = false;
      os << 'u' << (f.gen + 1) << "(-" << f.depth << ')';
      if (f.exp > 1) os << '^' << f.exp;
    }
    return os.str();
  }

 private:
  std::vector<Factor> factors_;
  std::int64_t weight_ = 0;
  std::uint32_t length_ = 0;
};

struct FockMonomialHash {
  std::size_t operator()(const FockMonomial& m) const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (const auto& f : m.factors()) {
      h ^= std::hash<std::int64_t>{}(f.depth * 131 + f.gen * 7 + f.exp * 1000003) + 0x9e3779b9 + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Sparse GF(p)-combination of creation monomials; zero coefficients are never stored.
class FockVector {
 public:
  using container = std::map<FockMonomial, Fp>;

  FockVector() = default;
  static FockVector basis(const FockMonomial& m) {
    FockVector v;
    v.terms_.emplace(m, Fp(1));
    return v;
  }
  static FockVector vacuum() { return basis(FockMonomial{}); }

  const container& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const PrimeField& F, const FockMonomial& m, Fp c) {
    if (c.value == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (inserted) return;
    it->second = F.add(it->second, c);
    if (it->second.value == 0) terms_.erase(it);
  }

  void add_scaled(const PrimeField& F, Fp c, const FockVector& other) {
    if (c.value == 0) return;
    for (const auto& [m, a] : other.terms_) add_term(F, m, F.mul(c, a));
  }

  Fp coeff(const FockMonomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Fp(0) : it->second;
  }

  /// Largest weight among the terms (0 for the zero vector).
  std::int64_t max_weight() const {
    std::int64_t w = 0;
    for (const auto& [m, c] : terms_) w = std::max(w, m.weight());
    return w;
  }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    const auto w = terms_.begin()->first.weight();
    return std::all_of(terms_.begin(), terms_.end(), [w](const auto& t) { return t.first.weight() == w; });
  }

  friend bool operator==(const FockVector&, const FockVector&) = default;

  /// Canonical text: `2*u1(-1)^2 + u2(-3)`, `0` for the zero vector.
  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      if (m.is_vacuum())
        os << c.value;
      else if (c.value == 1)
        os << m.str();
      else
        os << c.value << '*' << m.str();
    }
    return os.str();
  }

 private:
  container terms_;
};

/// Parameters of the Heisenberg vertex algebra V(l,0) and its module M(l, lambda0).
class FockContext {
 public:
  /// `gram` must be a symmetric invertible d x d matrix over GF(p); `lambda0` has d entries
  /// (empty means zero).
  FockContext(std::uint32_t p, int dim, std::int64_t level, FpMatrix gram, std::vector<Fp> lambda0 = {})
      : F_(p), d_(dim), level_(F_(level)), gram_(std::move(gram)), lambda0_(std::move(lambda0)) {
    if (dim < 1) throw std::invalid_argument("dim h must be >= 1");
    if (gram_.rows() != static_cast<std::size_t>(dim) || gram_.cols() != static_cast<std::size_t>(dim))
      throw std::invalid_argument("gram matrix must be dim x dim");
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        if (gram_(i, j).value >= p) throw std::invalid_argument("gram entries must be residues mod p");
        if (gram_(i, j) != gram_(j, i)) throw std::invalid_argument("gram matrix must be symmetric");
      }
    if (!inverse(F_, gram_)) throw std::invalid_argument("gram matrix must be invertible over GF(p)");
    if (lambda0_.empty()) lambda0_.assign(dim, Fp(0));
    if (lambda0_.size() != static_cast<std::size_t>(dim)) throw std::invalid_argument("lambda0 needs dim entries");
  }

  /// Orthonormal-basis context: gram = identity.
  static FockContext standard(std::uint32_t p, int dim, std::int64_t level) {
    return FockContext(p, dim, level, FpMatrix::identity(dim));
  }

  const PrimeField& field() const { return F_; }
  std::uint32_t p() const { return F_.p(); }
  int dim() const { return d_; }
  Fp level() const { return level_; }
  const FpMatrix& gram() const { return gram_; }
  Fp pairing(int i, int j) const { return gram_(i, j); }
  const std::vector<Fp>& lambda0() const { return lambda0_; }

  bool gram_is_diagonal() const {
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j)
        if (i != j && gram_(i, j).value != 0) return false;
    return true;
  }

  /// The same algebra acting on itself: zero-mode character reset to 0.
  FockContext adjoint() const { return FockContext(F_.p(), d_, level_.value, gram_, {}); }

  FockContext with_lambda0(std::vector<Fp> l0) const { return FockContext(F_.p(), d_, level_.value, gram_, std::move(l0)); }

 private:
  PrimeField F_;
  int d_;
  Fp level_;
  FpMatrix gram_;
  std::vector<Fp> lambda0_;
};

class FockSpace {
 public:
  using value_type = FockVector;
  explicit FockSpace(const PrimeField& F) : F_(&F) {}
  const PrimeField& field() const { return *F_; }
  FockVector zero() const { return {}; }
  FockVector add(const FockVector& a, const FockVector& b) const {
    FockVector r = a;
    r.add_scaled(*F_, F_->one(), b);
    return r;
  }
  FockVector scale(Fp c, const FockVector& a) const {
    FockVector r;
    r.add_scaled(*F_, c, a);
    return r;
  }
  bool is_zero(const FockVector& a) const { return a.is_zero(); }

 private:
  const PrimeField* F_;
};

inline FockVector generator_vector(int gen) { return FockVector::basis(FockMonomial({{1, gen, 1}})); }

inline FockVector subtract(const PrimeField& F, const FockVector& a, const FockVector& b) {
  FockVector r = a;
  r.add_scaled(F, F.neg(F.one()), b);
  return r;
}

inline FockVector scaled(const PrimeField& F, Fp c, const FockVector& a) {
  FockVector r;
  r.add_scaled(F, c, a);
  return r;
}

/// Product in the commutative algebra S(h_+).
inline FockVector multiply(const PrimeField& F, const FockVector& a, const FockVector& b) {
  FockVector r;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) r.add_term(F, ma * mb, F.mul(ca, cb));
  return r;
}

/// u(n) on a single monomial.
///  n < 0: multiplication by u(n);
///  n > 0: sum over factors v(-n): multiplicity * n * <u,v> * level, one copy removed;
///  n = 0: the scalar lambda0(u).
inline FockVector act_mode(const FockContext& ctx, Mode m, const FockMonomial& mono) {
  const PrimeField& F = ctx.field();
  FockVector out;
  if (m.gen < 0 || m.gen >= ctx.dim()) throw std::out_of_range("mode generator index out of range");
  if (m.deg < 0) {
    out.add_term(F, mono.times(m.gen, -m.deg), F.one());
  } else if (m.deg == 0) {
    out.add_term(F, mono, ctx.lambda0()[m.gen]);
  } else {
    const Fp base = F.mul(F(m.deg), ctx.level());
    for (const auto& f : mono.factors()) {
      if (f.depth != m.deg) continue;
      const Fp g = ctx.pairing(m.gen, f.gen);
      if (g.value == 0) continue;
      out.add_term(F, mono.without(f.gen, f.depth), F.mul(F.mul(F(f.exp), base), g));
    }
  }
  return out;
}

inline FockVector act_mode(const FockContext& ctx, Mode m, const FockVector& v) {
  const PrimeField& F = ctx.field();
  FockVector out;
  for (const auto& [mono, c] : v.terms()) out.add_scaled(F, c, act_mode(ctx, m, mono));
  return out;
}

/// Applies u(n) `times` times.
inline FockVector act_mode_power(const FockContext& ctx, Mode m, std::uint32_t times, FockVector v) {
  for (std::uint32_t i = 0; i < times && !v.is_zero(); ++i) v = act_mode(ctx, m, v);
  return v;
}

/// Coefficients of e^{zD} v = sum_k z^k D^{(k)} v for k = 0..max_order.
/// D^{(j)} u(-n) = (-1)^j C(-n, j) u(-n-j) = C(n+j-1, j) u(-n-j); products follow the
/// coproduct D^{(k)} -> sum D^{(k-i)} (x) D^{(i)}, i.e. e^{zD} is multiplicative.
inline std::vector<FockVector> exp_zD(const FockContext& ctx, const FockVector& v, std::uint64_t max_order) {
  const PrimeField& F = ctx.field();
  std::vector<FockVector> result(max_order + 1);
  for (const auto& [mono, coeff] : v.terms()) {
    // series[k] holds the z^k coefficient of the running product.
    std::vector<FockVector> series(max_order + 1);
    series[0] = FockVector::vacuum();
    for (const auto& f : mono.factors()) {
      for (std::uint32_t copy = 0; copy < f.exp; ++copy) {
        std::vector<FockVector> next(max_order + 1);
        for (std::uint64_t k = 0; k <= max_order; ++k) {
          if (series[k].is_zero()) continue;
          for (std::uint64_t j = 0; k + j <= max_order; ++j) {
            const Fp c = F.binom(static_cast<std::uint64_t>(f.depth) + j - 1, j);
            if (c.value == 0) continue;
            const FockMonomial shifted({{f.depth + static_cast<std::int64_t>(j), f.gen, 1}});
            for (const auto& [m2, c2] : series[k].terms()) next[k + j].add_term(F, m2 * shifted, F.mul(c, c2));
          }
        }
        series = std::move(next);
      }
    }
    for (std::uint64_t k = 0; k <= max_order; ++k) result[k].add_scaled(F, coeff, series[k]);
  }
  return result;
}

inline FockVector act_D(const FockContext& ctx, std::uint64_t k, const FockVector& v) {
  return std::move(exp_zD(ctx, v, k)[k]);
}

/// All monomials of exactly weight w in d generators, in canonical order.
inline std::vector<FockMonomial> monomials_of_weight(int d, std::int64_t w) {
  std::vector<FockMonomial> out;
  std::vector<Factor> cur;
  // Choose factors in non-decreasing (depth, gen) order.
  std::function<void(std::int64_t, std::int64_t, int)> rec = [&](std::int64_t remaining, std::int64_t min_depth,
                                                                   int min_gen) {
    if (remaining == 0) {
      out.emplace_back(cur);
      return;
    }
    for (std::int64_t depth = min_depth; depth <= remaining; ++depth) {
      for (int gen = (depth == min_depth ? min_gen : 0); gen < d; ++gen) {
        cur.push_back({depth, gen, 1});
        rec(remaining - depth, depth, gen);
        cur.pop_back();
      }
    }
  };
  rec(w, 1, 0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// PBW basis of all monomials with weight <= max_weight.
inline std::vector<FockMonomial> monomial_basis(int d, std::int64_t max_weight) {
  std::vector<FockMonomial> out;
  for (std::int64_t w = 0; w <= max_weight; ++w) {
    auto part = monomials_of_weight(d, w);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace heisvoa
