#pragma once

// The submodule J(l, lambda) of V(l,0) generated by
//   (u(-m)^p - lambda_m(u)^p) 1   (m >= 1)   and   (u(-n) - lambda_n(u)) 1   (p | n),
// normal forms modulo J, the D-stability test deciding when J is an ideal, and the
// p-th power vertex operator identities on V(l,0) and on the quotient.
//
// The elements u(-m)^p and u(-n), p | n, are central in U(h^), so J is the ideal of
// S(h_+) generated by the same polynomials and the rewriting
//   u(-n) -> lambda_n (p | n),   u(-m)^p -> lambda_m^p
// is confluent; its normal forms are the monomials with p-free depths and exponents < p.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "heisvoa/axioms.hpp"
#include "heisvoa/fock.hpp"
#include "heisvoa/linalg.hpp"
#include "heisvoa/report.hpp"
#include "heisvoa/vertex.hpp"

namespace heisvoa {

/// Zero-mode character lambda0 and central character lambda on h_+, finitely supported.
/// Generators are zero-based here; the JSON form is one-based.
class LambdaSpec {
 public:
  LambdaSpec() = default;
  LambdaSpec(std::uint32_t p, int dim, std::int64_t level) : p_(p), dim_(dim), level_(level), lambda0_(dim, Fp(0)) {}

  std::uint32_t p() const { return p_; }
  int dim() const { return dim_; }
  std::int64_t level() const { return level_; }
  const std::vector<Fp>& lambda0() const { return lambda0_; }
  void set_lambda0(std::vector<Fp> l0) {
    if (l0.size() != static_cast<std::size_t>(dim_)) throw std::invalid_argument("lambda0 needs dim entries");
    lambda0_ = std::move(l0);
  }

  /// lambda(u^{(gen)}(-depth)).
  Fp at(int gen, std::int64_t depth) const {
    auto it = values_.find({gen, depth});
    return it == values_.end() ? Fp(0) : it->second;
  }
  void set(int gen, std::int64_t depth, Fp value) {
    if (gen < 0 || gen >= dim_) throw std::out_of_range("lambda generator index out of range");
    if (depth < 1) throw std::invalid_argument("lambda depth must be >= 1");
    if (value.value >= p_) throw std::invalid_argument("lambda value must be a residue mod p");
    if (value.value == 0)
      values_.erase({gen, depth});
    else
      values_[{gen, depth}] = value;
  }
  const std::map<std::pair<int, std::int64_t>, Fp>& values() const { return values_; }

  /// True iff lambda vanishes on every depth >= 2.
  bool in_Lambda() const {
    for (const auto& [key, v] : values_)
      if (key.second >= 2) return false;
    return true;
  }

  std::int64_t max_depth() const {
    std::int64_t d = 0;
    for (const auto& [key, v] : values_) d = std::max(d, key.second);
    return d;
  }

  friend bool operator==(const LambdaSpec&, const LambdaSpec&) = default;

 private:
  std::uint32_t p_ = 2;
  int dim_ = 1;
  std::int64_t level_ = 1;
  std::vector<Fp> lambda0_;
  std::map<std::pair<int, std::int64_t>, Fp> values_;
};

/// p-th power generators for depths 1..max_depth, then the linear ones at p-divisible depths.
inline std::vector<FockVector> ideal_generators(const FockContext& ctx, const LambdaSpec& lambda, std::int64_t max_depth) {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  const PrimeField& F = ctx.field();
  const std::uint32_t p = ctx.p();
  std::vector<FockVector> out;
  for (std::int64_t m = 1; m <= max_depth; ++m)
    for (int i = 0; i < ctx.dim(); ++i) {
      FockVector g = FockVector::basis(FockMonomial({{m, i, p}}));
      g.add_term(F, FockMonomial{}, F.neg(F.pow(lambda.at(i, m), p)));
      out.push_back(std::move(g));
    }
  for (std::int64_t n = p; n <= max_depth; n += p)
    for (int i = 0; i < ctx.dim(); ++i) {
      FockVector g = FockVector::basis(FockMonomial({{n, i, 1}}));
      g.add_term(F, FockMonomial{}, F.neg(lambda.at(i, n)));
      out.push_back(std::move(g));
    }
  return out;
}

inline bool is_quotient_basis_monomial(const FockMonomial& m, std::uint32_t p) {
  for (const auto& f : m.factors())
    if (f.depth % p == 0 || f.exp >= p) return false;
  return true;
}

inline FockVector normal_form(const FockContext& ctx, const LambdaSpec& lambda, const FockVector& v) {
  const PrimeField& F = ctx.field();
  const std::uint32_t p = ctx.p();
  FockVector out;
  for (const auto& [mono, c] : v.terms()) {
    Fp coeff = c;
    std::vector<Factor> kept;
    for (const auto& f : mono.factors()) {
      const Fp lam = lambda.at(f.gen, f.depth);
      if (f.depth % p == 0) {
        coeff = F.mul(coeff, F.pow(lam, f.exp));
      } else {
        const std::uint32_t q = f.exp / p, r = f.exp % p;
        coeff = F.mul(coeff, F.pow(lam, static_cast<std::uint64_t>(p) * q));
        if (r) kept.push_back({f.depth, f.gen, r});
      }
      if (coeff.value == 0) break;
    }
    if (coeff.value != 0) out.add_term(F, FockMonomial(std::move(kept)), coeff);
  }
  return out;
}

inline bool in_ideal(const FockContext& ctx, const LambdaSpec& lambda, const FockVector& v) {
  return normal_form(ctx, lambda, v).is_zero();
}

/// L(l, lambda0, lambda) = V(l,0)/J as a module over the modes: act on a representative,
/// then reduce. Weight bounds are those of the representatives in V(l,0).
class QuotientAction : public FockSpace {
 public:
  QuotientAction(const FockContext& ctx, const LambdaSpec& lambda) : FockSpace(ctx.field()), ctx_(&ctx), lambda_(&lambda) {}
  // Both arguments are held by pointer.
  QuotientAction(FockContext&&, const LambdaSpec&) = delete;
  QuotientAction(const FockContext&, LambdaSpec&&) = delete;
  const FockContext& context() const { return *ctx_; }
  const LambdaSpec& lambda() const { return *lambda_; }
  FockVector act(Mode m, const FockVector& w) const { return normal_form(*ctx_, *lambda_, act_mode(*ctx_, m, w)); }
  std::int64_t annihilation_reach(const FockVector& w) const { return w.max_weight(); }
  std::int64_t truncation_bound(std::int64_t weight, std::uint32_t, const FockVector& w) const {
    return weight + w.max_weight();
  }

 private:
  const FockContext* ctx_;
  const LambdaSpec* lambda_;
};

/// D^{(k)} u(-n)^p 1 in closed form: zero unless k = rp, then C(n+r-1, r) u(-n-r)^p 1.
inline FockVector d_power_closed_form(const FockContext& ctx, int gen, std::int64_t n, std::uint64_t k) {
  if (n < 1) throw std::invalid_argument("depth must be >= 1");
  const PrimeField& F = ctx.field();
  const std::uint32_t p = ctx.p();
  FockVector out;
  if (k % p != 0) return out;
  const std::uint64_t r = k / p;
  out.add_term(F, FockMonomial({{n + static_cast<std::int64_t>(r), gen, p}}),
               F.binom(static_cast<std::uint64_t>(n) + r - 1, r));
  return out;
}

/// Compares the closed form with act_D on u_i(-n)^p 1 for n <= max_n, k <= max_k, and
/// D^{(k)} u(-n) 1 = 0 for p | n, p does not divide k.
inline CheckResult check_d_power_closed_forms(const FockContext& ctx, std::int64_t max_n, std::uint64_t max_k) {
  const std::uint32_t p = ctx.p();
  CheckResult res{"D_power_closed_forms"};
  for (int i = 0; i < ctx.dim(); ++i) {
    for (std::int64_t n = 1; n <= max_n; ++n) {
      const FockVector base = FockVector::basis(FockMonomial({{n, i, p}}));
      const auto series = exp_zD(ctx, base, max_k);
      for (std::uint64_t k = 0; k <= max_k; ++k) {
        ++res.cases;
        const FockVector expect = d_power_closed_form(ctx, i, n, k);
        if (!(series[k] == expect)) {
          res.fail("D^{(k)} u(-n)^p 1 differs from the closed form",
                   {{"v", to_text(base)}, {"k", to_text(static_cast<std::int64_t>(k))}, {"lhs", to_text(series[k])},
                    {"rhs", to_text(expect)}});
          return res;
        }
      }
    }
    for (std::int64_t n = p; n <= static_cast<std::int64_t>(max_n) * p; n += p) {
      const FockVector lin = FockVector::basis(FockMonomial({{n, i, 1}}));
      const auto series = exp_zD(ctx, lin, max_k);
      for (std::uint64_t k = 1; k <= max_k; ++k) {
        if (k % p == 0) continue;
        ++res.cases;
        if (!series[k].is_zero()) {
          res.fail("D^{(k)} u(-n) 1 != 0 for p | n, p not dividing k",
                   {{"v", to_text(lin)}, {"k", to_text(static_cast<std::int64_t>(k))}, {"lhs", to_text(series[k])},
                    {"rhs", "0"}});
          return res;
        }
      }
    }
  }
  return res;
}

struct StabilityResult {
  bool stable = true;
  std::uint64_t cases = 0;
  // First D^{(k)} g outside J, with its normal form.
  std::optional<FockVector> generator;
  std::uint64_t k = 0;
  FockVector image;
  FockVector image_normal_form;
};

/// Default search bounds: deep enough to expose every nonzero entry of lambda.
inline std::int64_t stability_depth(const FockContext& ctx, const LambdaSpec& lambda) {
  return std::max<std::int64_t>(lambda.max_depth(), 2) + ctx.p();
}
inline std::uint64_t stability_max_k(const FockContext& ctx, const LambdaSpec& lambda) {
  return static_cast<std::uint64_t>(std::max<std::int64_t>(lambda.max_depth(), 2)) * ctx.p();
}

/// Applies D^{(k)}, 1 <= k <= max_k, to every generator of depth <= max_depth and tests
/// membership of the image in J by normal form. J is stable iff no image escapes, since
/// D^{(k)} acts on products through the coproduct.
inline StabilityResult check_D_stability(const FockContext& ctx, const LambdaSpec& lambda, std::uint64_t max_k,
                                         std::int64_t max_depth) {
  if (max_k < ctx.p()) throw std::invalid_argument("max_k must be at least p");
  StabilityResult res;
  for (const auto& g : ideal_generators(ctx, lambda, max_depth)) {
    const auto series = exp_zD(ctx, g, max_k);
    for (std::uint64_t k = 1; k <= max_k; ++k) {
      ++res.cases;
      FockVector nf = normal_form(ctx, lambda, series[k]);
      if (!nf.is_zero()) {
        res.stable = false;
        res.generator = g;
        res.k = k;
        res.image = series[k];
        res.image_normal_form = std::move(nf);
        return res;
      }
    }
  }
  return res;
}

inline StabilityResult check_D_stability(const FockContext& ctx, const LambdaSpec& lambda) {
  return check_D_stability(ctx, lambda, stability_max_k(ctx, lambda), stability_depth(ctx, lambda));
}

namespace detail {

// c * a(k)^p as an operator on a module vector, for the p-th power of a single mode.
template <ModeAction A>
typename A::value_type mode_power(const A& W, Mode m, std::uint32_t p, typename A::value_type w) {
  for (std::uint32_t i = 0; i < p && !W.is_zero(w); ++i) w = W.act(m, w);
  return w;
}

}  // namespace detail

/// Y_W(u(-n)^p 1, x) w, coefficients in [-window, window], by the closed form
///   sum_j C(n+j-1, j) a_{-n-j}^p x^{jp} + (-1)^{n+1} sum_j C(n+j-1, j) a_j^p x^{-p(n+j)}.
template <ModeAction A>
LaurentPoly<typename A::value_type> pth_power_closed_form(const A& W, int gen, std::int64_t n,
                                                          const typename A::value_type& w, std::int64_t window) {
  const PrimeField& F = W.field();
  const std::uint32_t p = F.p();
  LaurentPoly<typename A::value_type> out;
  for (std::int64_t j = 0; j * p <= window; ++j) {
    const Fp c = F.binom(static_cast<std::uint64_t>(n + j - 1), static_cast<std::uint64_t>(j));
    if (c.value) out.add_term(W, j * p, W.scale(c, detail::mode_power(W, Mode{gen, -n - j}, p, w)));
  }
  const Fp sign = F.sign(n + 1);
  for (std::int64_t j = 0; p * (n + j) <= window; ++j) {
    const Fp c = F.mul(sign, F.binom(static_cast<std::uint64_t>(n + j - 1), static_cast<std::uint64_t>(j)));
    if (c.value) out.add_term(W, -static_cast<std::int64_t>(p) * (n + j), W.scale(c, detail::mode_power(W, Mode{gen, j}, p, w)));
  }
  return out;
}

/// (A^p + B^p) w with A = sum_j C(n+j-1, j) a_{-n-j} x^j and
/// B = -(-1)^n sum_j C(n+j-1, j) a_j x^{-n-j}, each applied p times as a series.
/// Terms outside [-window, window] are dropped as soon as they appear: A only raises
/// exponents and B only lowers them, so nothing dropped can return.
template <ModeAction A>
LaurentPoly<typename A::value_type> pth_power_direct(const A& W, int gen, std::int64_t n,
                                                     const typename A::value_type& w, std::int64_t window) {
  const PrimeField& F = W.field();
  const std::uint32_t p = F.p();
  using Series = LaurentPoly<typename A::value_type>;

  Series a_part = Series::monomial(W, 0, w);
  for (std::uint32_t step = 0; step < p; ++step) {
    Series next;
    for (const auto& [e, vec] : a_part.terms())
      for (std::int64_t j = 0; e + j <= window; ++j) {
        const Fp c = F.binom(static_cast<std::uint64_t>(n + j - 1), static_cast<std::uint64_t>(j));
        if (c.value) next.add_term(W, e + j, W.scale(c, W.act(Mode{gen, -n - j}, vec)));
      }
    a_part = std::move(next);
  }

  Series b_part = Series::monomial(W, 0, w);
  const Fp sign = F.neg(F.sign(n));
  for (std::uint32_t step = 0; step < p; ++step) {
    Series next;
    for (const auto& [e, vec] : b_part.terms()) {
      const std::int64_t reach = W.annihilation_reach(vec);
      for (std::int64_t j = 0; j <= reach && e - n - j >= -window; ++j) {
        const Fp c = F.mul(sign, F.binom(static_cast<std::uint64_t>(n + j - 1), static_cast<std::uint64_t>(j)));
        if (c.value) next.add_term(W, e - n - j, W.scale(c, W.act(Mode{gen, j}, vec)));
      }
    }
    b_part = std::move(next);
  }

  Series out;
  for (const auto& [e, vec] : a_part.terms())
    if (e >= -window && e <= window) out.add_term(W, e, vec);
  for (const auto& [e, vec] : b_part.terms())
    if (e >= -window && e <= window) out.add_term(W, e, vec);
  return out;
}

/// Three-way comparison of Y_W(u_gen(-n)^p 1, x) w on exponents [-window, window]:
/// the vertex-operator recursion, the closed form, and the direct A^p + B^p expansion.
template <ModeAction A>
CheckResult check_pth_power_series(VertexEvaluator<A>& module, int gen, std::int64_t n,
                                   std::span<const typename A::value_type> vectors, std::int64_t window) {
  const auto& W = module.action();
  const std::uint32_t p = W.field().p();
  CheckResult res{"pth_power_series"};
  const FockVector u = FockVector::basis(FockMonomial({{n, gen, p}}));
  for (const auto& w : vectors) {
    ++res.cases;
    const auto rec = module.vertex_operator(u, w, Window{-window, window}).series;
    const auto closed = pth_power_closed_form(W, gen, n, w, window);
    const auto direct = pth_power_direct(W, gen, n, w, window);
    for (std::int64_t e = -window; e <= window; ++e) {
      const auto a = rec.coeff(W, e), b = closed.coeff(W, e), c = direct.coeff(W, e);
      if (!(a == b) || !(b == c)) {
        res.fail("p-th power vertex operator routes disagree",
                 {{"u", to_text(u)}, {"w", to_text(w)}, {"exponent", to_text(e)}, {"recursion", to_text(a)},
                  {"closed_form", to_text(b)}, {"direct", to_text(c)}});
        return res;
      }
    }
  }
  return res;
}

/// Quotient basis monomials (p-free depths, exponents < p) of weight <= max_weight.
inline std::vector<FockMonomial> quotient_basis(int dim, std::uint32_t p, std::int64_t max_weight) {
  std::vector<FockMonomial> out;
  for (const auto& m : monomial_basis(dim, max_weight))
    if (is_quotient_basis_monomial(m, p)) out.push_back(m);
  return out;
}

/// On V(l,0)/J with lambda in Lambda: u(n) = 0 for p | n, u(n)^p = 0 for n != -1 and
/// u(-1)^p = lambda_1(u)^p, for |n| <= window on the given quotient basis monomials.
inline CheckResult check_quotient_module_property(const FockContext& ctx, const LambdaSpec& lambda,
                                                  std::span<const FockMonomial> basis, std::int64_t window) {
  const PrimeField& F = ctx.field();
  const std::uint32_t p = ctx.p();
  QuotientAction Q(ctx, lambda);
  CheckResult res{"quotient_module_property"};
  if (!lambda.in_Lambda()) throw std::invalid_argument("lambda must vanish on depths >= 2");
  for (const auto& mono : basis) {
    const FockVector w = FockVector::basis(mono);
    for (int i = 0; i < ctx.dim(); ++i) {
      for (std::int64_t n = -window; n <= window; ++n) {
        const std::string mode = "u" + std::to_string(i + 1) + "(" + std::to_string(n) + ")";
        if (n % static_cast<std::int64_t>(p) == 0) {
          ++res.cases;
          const FockVector out = Q.act(Mode{i, n}, w);
          if (!out.is_zero()) {
            res.fail("p-divisible mode acts nontrivially", {{"mode", mode}, {"w", to_text(w)}, {"lhs", to_text(out)}, {"rhs", "0"}});
            return res;
          }
        }
        ++res.cases;
        const FockVector pw = detail::mode_power(Q, Mode{i, n}, p, w);
        const FockVector expect = n == -1 ? scaled(F, F.pow(lambda.at(i, 1), p), w) : FockVector{};
        if (!(pw == expect)) {
          res.fail("p-th power of a mode is not the expected scalar",
                   {{"mode", mode + "^p"}, {"w", to_text(w)}, {"lhs", to_text(pw)}, {"rhs", to_text(expect)}});
          return res;
        }
      }
    }
  }
  return res;
}

/// Monomials with p-free depths <= max_depth and every exponent < p: a basis of the quotient
/// truncated to those variables. Its size is p^{#(i, n)}.
inline std::vector<FockMonomial> truncated_quotient_basis(int dim, std::uint32_t p, std::int64_t max_depth) {
  std::vector<FockMonomial> out{FockMonomial{}};
  for (std::int64_t n = 1; n <= max_depth; ++n) {
    if (n % p == 0) continue;
    for (int i = 0; i < dim; ++i) {
      std::vector<FockMonomial> next;
      for (const auto& m : out)
        for (std::uint32_t e = 0; e < p; ++e) next.push_back(e ? m.times(i, n, e) : m);
      out = std::move(next);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Rank of the normal forms of all monomials in depths <= max_depth with exponents <= max_exp.
inline std::size_t quotient_rank(const FockContext& ctx, const LambdaSpec& lambda, std::int64_t max_depth,
                                 std::uint32_t max_exp) {
  const PrimeField& F = ctx.field();
  std::vector<FockMonomial> all{FockMonomial{}};
  for (std::int64_t n = 1; n <= max_depth; ++n)
    for (int i = 0; i < ctx.dim(); ++i) {
      std::vector<FockMonomial> next;
      for (const auto& m : all)
        for (std::uint32_t e = 0; e <= max_exp; ++e) next.push_back(e ? m.times(i, n, e) : m);
      all = std::move(next);
    }
  std::map<FockMonomial, std::size_t> index;
  std::vector<FockVector> images;
  for (const auto& m : all) {
    images.push_back(normal_form(ctx, lambda, FockVector::basis(m)));
    for (const auto& [mm, c] : images.back().terms()) index.emplace(mm, index.size());
  }
  SubspaceBuilder space(F, index.size());
  for (const auto& img : images) {
    FpVector row(index.size());
    for (const auto& [mm, c] : img.terms()) row[index.at(mm)] = c;
    space.insert(row);
  }
  return space.dim();
}

/// For each v with nonzero normal form, the span of v under the annihilation modes
/// u_i(n), 1 <= n <= max_depth, in the truncated quotient contains the vacuum.
/// Vectors must be supported on depths <= max_depth.
inline CheckResult check_quotient_maximality(const FockContext& ctx, const LambdaSpec& lambda,
                                             std::span<const FockVector> vectors, std::int64_t max_depth) {
  const PrimeField& F = ctx.field();
  QuotientAction Q(ctx, lambda);
  CheckResult res{"quotient_maximality"};
  const auto basis = truncated_quotient_basis(ctx.dim(), ctx.p(), max_depth);
  std::map<FockMonomial, std::size_t> index;
  for (const auto& m : basis) index.emplace(m, index.size());
  auto coords = [&](const FockVector& v) {
    FpVector row(basis.size());
    for (const auto& [m, c] : v.terms()) {
      auto it = index.find(m);
      if (it == index.end()) throw std::invalid_argument("vector outside the truncated quotient");
      row[it->second] = c;
    }
    return row;
  };
  FpVector vacuum(basis.size());
  vacuum[index.at(FockMonomial{})] = F.one();
  for (const auto& v0 : vectors) {
    const FockVector v = normal_form(ctx, lambda, v0);
    if (v.is_zero()) continue;
    ++res.cases;
    SubspaceBuilder space(F, basis.size());
    std::vector<FockVector> frontier{v};
    space.insert(coords(v));
    while (!frontier.empty()) {
      std::vector<FockVector> next;
      for (const auto& x : frontier)
        for (int i = 0; i < ctx.dim(); ++i)
          for (std::int64_t n = 1; n <= max_depth; ++n) {
            FockVector y = Q.act(Mode{i, n}, x);
            if (!y.is_zero() && space.insert(coords(y))) next.push_back(std::move(y));
          }
      frontier = std::move(next);
    }
    if (!space.contains(vacuum)) {
      res.fail("submodule generated by a vector outside J misses the vacuum",
               {{"v", to_text(v0)}, {"lhs", std::to_string(space.dim()) + "-dimensional span"}, {"rhs", "contains 1"}});
      return res;
    }
  }
  return res;
}

}  // namespace heisvoa
