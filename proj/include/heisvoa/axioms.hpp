#pragma once

// Executable checks of the vertex-algebra axioms on V(l,0) and its Fock modules.
// Every identity is compared coefficient by coefficient in exact arithmetic; the
// first mismatch is returned with its inputs and both sides.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "heisvoa/fock.hpp"
#include "heisvoa/formal.hpp"
#include "heisvoa/report.hpp"
#include "heisvoa/vertex.hpp"

namespace heisvoa {

/// Borcherds identity for u, v in V and w in the module W:
///   (u_m v)_n w = sum_{i>=0} (-1)^i C(m,i) (u_{m-i} v_{n+i} w - (-1)^m v_{m+n-i} u_i w)
/// for all (m, n) in the given ranges.
template <ModeAction A>
CheckResult check_borcherds(VertexEvaluator<FockAction>& algebra, VertexEvaluator<A>& module, const FockVector& u,
                            const FockVector& v, const typename A::value_type& w, Window m_range, Window n_range) {
  const PrimeField& F = algebra.field();
  const auto& W = module.action();
  CheckResult res{"borcherds"};
  const std::int64_t kv = module.truncation_bound(v, w);
  const std::int64_t ku = module.truncation_bound(u, w);
  for (std::int64_t m = m_range.lo; m <= m_range.hi; ++m) {
    const FockVector umv = algebra.product(u, m, v);
    for (std::int64_t n = n_range.lo; n <= n_range.hi; ++n) {
      ++res.cases;
      auto lhs = module.product(umv, n, w);
      auto rhs = W.zero();
      const std::int64_t limit = std::max(kv - n, ku);
      const Fp sm = F.sign(m);
      for (std::int64_t i = 0; i < limit; ++i) {
        const Fp c = F.mul(F.sign(i), F.binom_signed_top(m, static_cast<std::uint64_t>(i)));
        if (c.value == 0) continue;
        auto t1 = module.product(u, m - i, module.product(v, n + i, w));
        auto t2 = module.product(v, m + n - i, module.product(u, i, w));
        rhs = W.add(rhs, W.scale(c, W.add(t1, W.scale(F.neg(sm), t2))));
      }
      if (!(lhs == rhs)) {
        res.fail("Borcherds identity mismatch",
                 {{"u", to_text(u)}, {"v", to_text(v)}, {"w", to_text(w)}, {"m", to_text(m)}, {"n", to_text(n)},
                  {"lhs", to_text(lhs)}, {"rhs", to_text(rhs)}});
        return res;
      }
    }
  }
  return res;
}

/// Skew symmetry Y(u,x)v = e^{xD} Y(v,-x)u, coefficient-wise:
///   u_n v = sum_{i>=0} (-1)^{i+n+1} D^{(i)} v_{n+i} u.
inline CheckResult check_skew(VertexEvaluator<FockAction>& algebra, const FockVector& u, const FockVector& v,
                              Window n_range) {
  const FockContext& ctx = algebra.action().context();
  const PrimeField& F = ctx.field();
  CheckResult res{"skew_symmetry"};
  const std::int64_t bound = u.max_weight() + v.max_weight();
  for (std::int64_t n = n_range.lo; n <= n_range.hi; ++n) {
    ++res.cases;
    const FockVector lhs = algebra.product(u, n, v);
    FockVector rhs;
    for (std::int64_t i = 0; n + i < bound; ++i) {
      const FockVector inner = algebra.product(v, n + i, u);
      if (inner.is_zero()) continue;
      rhs.add_scaled(F, F.sign(i + n + 1), act_D(ctx, static_cast<std::uint64_t>(i), inner));
    }
    if (!(lhs == rhs)) {
      res.fail("skew symmetry mismatch",
               {{"u", to_text(u)}, {"v", to_text(v)}, {"n", to_text(n)}, {"lhs", to_text(lhs)}, {"rhs", to_text(rhs)}});
      return res;
    }
  }
  return res;
}

/// Conjugation formula Y_W(e^{zD}u, x) = Y_W(u, x+z): for k <= max_k the z^k coefficient of
/// the Taylor shift of Y_W(u,x)w must equal Y_W(D^{(k)}u, x)w on the exponent window.
template <ModeAction A>
CheckResult check_conjugation(const FockContext& algebra_ctx, VertexEvaluator<A>& module, const FockVector& u,
                              const typename A::value_type& w, Window exponents, std::uint64_t max_k) {
  const auto& W = module.action();
  CheckResult res{"conjugation"};
  const auto base = module.vertex_operator(u, w, Window{exponents.lo, exponents.hi + static_cast<std::int64_t>(max_k)});
  const auto shifted = taylor_shift(W, base.series, exponents, max_k);
  const auto derivs = exp_zD(algebra_ctx, u, max_k);
  for (std::uint64_t k = 0; k <= max_k; ++k) {
    const auto direct = module.vertex_operator(derivs[k], w, exponents);
    for (std::int64_t a = exponents.lo; a <= exponents.hi; ++a) {
      ++res.cases;
      auto it = shifted.find({a, static_cast<std::int64_t>(k)});
      auto lhs = direct.series.coeff(W, a);
      auto rhs = it == shifted.end() ? W.zero() : it->second;
      if (!(lhs == rhs)) {
        res.fail("conjugation formula mismatch",
                 {{"u", to_text(u)}, {"w", to_text(w)}, {"k", to_text(static_cast<std::int64_t>(k))},
                  {"exponent", to_text(a)}, {"lhs", to_text(lhs)}, {"rhs", to_text(rhs)}});
        return res;
      }
    }
  }
  return res;
}

/// (x1 - x2)^power [a(x1), b(x2)] w = 0 for generators a = u^{(gen_a)}, b = u^{(gen_b)},
/// checked on the coefficients x1^A x2^B with |A|, |B| <= radius.
template <ModeAction A>
CheckResult check_weak_comm_generators(VertexEvaluator<A>& module, int gen_a, int gen_b,
                                       const typename A::value_type& w, std::uint32_t power, std::int64_t radius) {
  const PrimeField& F = module.field();
  const auto& W = module.action();
  CheckResult res{"weak_commutativity"};
  const FockVector a = generator_vector(gen_a);
  const FockVector b = generator_vector(gen_b);
  for (std::int64_t ea = -radius; ea <= radius; ++ea) {
    for (std::int64_t eb = -radius; eb <= radius; ++eb) {
      ++res.cases;
      auto total = W.zero();
      for (std::uint32_t t = 0; t <= power; ++t) {
        const std::int64_t m = static_cast<std::int64_t>(power) - t - 1 - ea;
        const std::int64_t n = -eb - 1 + t;
        const Fp c = F.mul(F.binom(power, t), F.sign(t));
        auto ab = module.product(a, m, module.product(b, n, w));
        auto ba = module.product(b, n, module.product(a, m, w));
        total = W.add(total, W.scale(c, W.add(ab, W.scale(F.neg(F.one()), ba))));
      }
      if (!W.is_zero(total)) {
        res.fail("(x1-x2)^k [a(x1), b(x2)] has a nonzero coefficient",
                 {{"a", to_text(a)}, {"b", to_text(b)}, {"w", to_text(w)},
                  {"power", to_text(static_cast<std::int64_t>(power))}, {"x1_exponent", to_text(ea)},
                  {"x2_exponent", to_text(eb)}, {"lhs", to_text(total)}, {"rhs", "0"}});
        return res;
      }
    }
  }
  return res;
}

/// Vacuum-like test: first D^{(k)} w = 0 for 1 <= k <= max_d (the precondition), then
/// v_n w = 0 for every v in `spanning` and 0 <= n <= max_n.
/// `derive(k, w)` and `product(v, n, w)` describe the module.
template <class Vec, class DeriveFn, class ProductFn, class IsZeroFn>
CheckResult check_vacuum_like(DeriveFn derive, ProductFn product, IsZeroFn is_zero, std::span<const FockVector> spanning,
                              const Vec& w, std::uint64_t max_d, std::int64_t max_n) {
  CheckResult res{"vacuum_like"};
  for (std::uint64_t k = 1; k <= max_d; ++k) {
    ++res.cases;
    auto dw = derive(k, w);
    if (!is_zero(dw)) {
      res.fail("precondition violated: D^{(k)} w != 0",
               {{"w", to_text(w)}, {"k", to_text(static_cast<std::int64_t>(k))}, {"lhs", to_text(dw)}, {"rhs", "0"}});
      return res;
    }
  }
  for (const auto& v : spanning) {
    for (std::int64_t n = 0; n <= max_n; ++n) {
      ++res.cases;
      auto vw = product(v, n, w);
      if (!is_zero(vw)) {
        res.fail("v_n w != 0 for n >= 0",
                 {{"v", to_text(v)}, {"w", to_text(w)}, {"n", to_text(n)}, {"lhs", to_text(vw)}, {"rhs", "0"}});
        return res;
      }
    }
  }
  return res;
}

/// D^{(m)} D^{(n)} v = C(m+n, n) D^{(m+n)} v for all m, n <= max_order.
inline CheckResult check_D_composition(const FockContext& ctx, std::span<const FockVector> vectors,
                                       std::uint64_t max_order) {
  const PrimeField& F = ctx.field();
  CheckResult res{"D_composition"};
  for (const auto& v : vectors) {
    const auto series = exp_zD(ctx, v, 2 * max_order);
    for (std::uint64_t n = 0; n <= max_order; ++n) {
      const auto outer = exp_zD(ctx, series[n], max_order);
      for (std::uint64_t m = 0; m <= max_order; ++m) {
        ++res.cases;
        const FockVector lhs = outer[m];
        const FockVector rhs = scaled(F, F.binom(m + n, n), series[m + n]);
        if (!(lhs == rhs)) {
          res.fail("D^{(m)}D^{(n)} != C(m+n,n) D^{(m+n)}",
                   {{"v", to_text(v)}, {"m", to_text(static_cast<std::int64_t>(m))},
                    {"n", to_text(static_cast<std::int64_t>(n))}, {"lhs", to_text(lhs)}, {"rhs", to_text(rhs)}});
          return res;
        }
      }
    }
  }
  return res;
}

/// u(kp) and u(k)^p commute with every mode v(n), |n| <= max_mode, on the given vectors.
inline CheckResult check_centrality(const FockContext& ctx, std::span<const FockVector> vectors, std::int64_t max_k,
                                    std::int64_t max_mode) {
  const PrimeField& F = ctx.field();
  const std::int64_t p = ctx.p();
  CheckResult res{"centrality"};
  for (int i = 0; i < ctx.dim(); ++i) {
    for (std::int64_t k = -max_k; k <= max_k; ++k) {
      struct Central {
        std::string name;
        std::function<FockVector(const FockVector&)> apply;
      };
      const std::vector<Central> centrals = {
          {"u" + std::to_string(i + 1) + "(" + std::to_string(k * p) + ")",
           [&, k](const FockVector& x) { return act_mode(ctx, Mode{i, k * p}, x); }},
          {"u" + std::to_string(i + 1) + "(" + std::to_string(k) + ")^p",
           [&, k](const FockVector& x) { return act_mode_power(ctx, Mode{i, k}, ctx.p(), x); }},
      };
      for (const auto& c : centrals) {
        for (int j = 0; j < ctx.dim(); ++j) {
          for (std::int64_t n = -max_mode; n <= max_mode; ++n) {
            for (const auto& b : vectors) {
              ++res.cases;
              const FockVector lhs = c.apply(act_mode(ctx, Mode{j, n}, b));
              const FockVector rhs = act_mode(ctx, Mode{j, n}, c.apply(b));
              if (!(lhs == rhs)) {
                res.fail("central element fails to commute with a mode",
                         {{"central", c.name}, {"mode", "u" + std::to_string(j + 1) + "(" + std::to_string(n) + ")"},
                          {"vector", to_text(b)}, {"lhs", to_text(lhs)}, {"rhs", to_text(rhs)}});
                return res;
              }
            }
          }
        }
      }
    }
  }
  (void)F;
  return res;
}

/// 1_n v = delta_{n,-1} v, u_n 1 = D^{(-n-1)} u (zero for n >= 0), truncation u_n v = 0 for
/// n >= wt u + wt v, and the grading shift wt(u_n v) = wt u + wt v - n - 1.
inline CheckResult check_vacuum_axioms(VertexEvaluator<FockAction>& algebra, std::span<const FockMonomial> basis,
                                       Window n_range) {
  const FockContext& ctx = algebra.action().context();
  CheckResult res{"vacuum_creation_grading"};
  const FockVector one = FockVector::vacuum();
  for (const auto& mono : basis) {
    const FockVector u = FockVector::basis(mono);
    for (std::int64_t n = n_range.lo; n <= n_range.hi; ++n) {
      ++res.cases;
      const FockVector lhs1 = algebra.product(one, n, u);
      const FockVector rhs1 = n == -1 ? u : FockVector{};
      if (!(lhs1 == rhs1)) {
        res.fail("vacuum property 1_n v", {{"v", to_text(u)}, {"n", to_text(n)}, {"lhs", to_text(lhs1)}, {"rhs", to_text(rhs1)}});
        return res;
      }
      const FockVector lhs2 = algebra.product(u, n, one);
      const FockVector rhs2 = n >= 0 ? FockVector{} : act_D(ctx, static_cast<std::uint64_t>(-n - 1), u);
      if (!(lhs2 == rhs2)) {
        res.fail("creation property u_n 1", {{"u", to_text(u)}, {"n", to_text(n)}, {"lhs", to_text(lhs2)}, {"rhs", to_text(rhs2)}});
        return res;
      }
    }
    for (const auto& other : basis) {
      const FockVector v = FockVector::basis(other);
      const std::int64_t bound = mono.weight() + other.weight();
      for (std::int64_t n = n_range.lo; n <= std::max(n_range.hi, bound); ++n) {
        ++res.cases;
        const FockVector prod = algebra.product(u, n, v);
        if (n >= bound && !prod.is_zero()) {
          res.fail("truncation u_n v = 0 for n >= wt u + wt v",
                   {{"u", to_text(u)}, {"v", to_text(v)}, {"n", to_text(n)}, {"lhs", to_text(prod)}, {"rhs", "0"}});
          return res;
        }
        for (const auto& [m, c] : prod.terms()) {
          if (m.weight() != bound - n - 1) {
            res.fail("grading shift wt(u_n v) = wt u + wt v - n - 1",
                     {{"u", to_text(u)}, {"v", to_text(v)}, {"n", to_text(n)}, {"lhs", to_text(prod)},
                      {"rhs", "weight " + std::to_string(bound - n - 1)}});
            return res;
          }
        }
      }
    }
  }
  return res;
}

}  // namespace heisvoa
