#pragma once

// Segal-Sugawara conformal vector of V(l,0) and Virasoro checks.
// With a diagonal form <u_i, u_j> = g_i delta_ij,
//   omega = sum_i (2 l g_i)^{-1} u_i(-1)^2 1,   L(n) = omega_{n+1}.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "heisvoa/fock.hpp"
#include "heisvoa/report.hpp"
#include "heisvoa/vertex.hpp"

namespace heisvoa {

inline void require_conformal(const FockContext& ctx) {
  if (ctx.p() == 2) throw std::invalid_argument("conformal structure needs p > 2");
  if (ctx.level().value == 0) throw std::invalid_argument("conformal structure needs a nonzero level");
  if (!ctx.gram_is_diagonal()) throw std::invalid_argument("conformal structure needs a diagonal gram matrix");
}

inline FockVector conformal_vector(const FockContext& ctx) {
  require_conformal(ctx);
  const PrimeField& F = ctx.field();
  FockVector omega;
  for (int i = 0; i < ctx.dim(); ++i) {
    const Fp c = F.inv(F.mul(F(2), F.mul(ctx.level(), ctx.pairing(i, i))));
    omega.add_term(F, FockMonomial({{1, i, 2}}), c);
  }
  return omega;
}

/// The Virasoro modes L(n) acting on V(l,0) (or M(l, lambda0)).
class Virasoro {
 public:
  explicit Virasoro(const FockContext& ctx) : ctx_(&ctx), omega_(conformal_vector(ctx)), eval_(FockAction(ctx)) {}
  explicit Virasoro(FockContext&&) = delete;

  const FockVector& omega() const { return omega_; }
  FockVector L(std::int64_t n, const FockVector& v) { return eval_.product(omega_, n + 1, v); }

  /// c with [L(2), L(-2)]1 = (c/2) 1.
  Fp central_charge() {
    const PrimeField& F = ctx_->field();
    const FockVector one = FockVector::vacuum();
    const FockVector bracket = subtract(F, L(2, L(-2, one)), L(-2, L(2, one)));
    return F.mul(F(2), bracket.coeff(FockMonomial{}));
  }

 private:
  const FockContext* ctx_;
  FockVector omega_;
  VertexEvaluator<FockAction> eval_;
};

/// [L(m), L(n)]v = (m-n)L(m+n)v + (1/2)C(m+1,3) delta_{m+n,0} c v with c = dim h,
/// for m, n in `range` and v in `vectors`.
inline CheckResult check_virasoro_bracket(const FockContext& ctx, std::span<const FockVector> vectors, Window range) {
  const PrimeField& F = ctx.field();
  Virasoro vir(ctx);
  CheckResult res{"virasoro_bracket"};
  const Fp c = F(ctx.dim());
  const Fp half = F.inv(F(2));
  for (const auto& v : vectors) {
    for (std::int64_t m = range.lo; m <= range.hi; ++m) {
      for (std::int64_t n = range.lo; n <= range.hi; ++n) {
        ++res.cases;
        const FockVector lhs = subtract(F, vir.L(m, vir.L(n, v)), vir.L(n, vir.L(m, v)));
        FockVector rhs = scaled(F, F(m - n), vir.L(m + n, v));
        if (m + n == 0) rhs.add_scaled(F, F.mul(half, F.mul(F.binom_signed_top(m + 1, 3), c)), v);
        if (!(lhs == rhs)) {
          res.fail("Virasoro bracket mismatch", {{"v", to_text(v)}, {"m", to_text(m)}, {"n", to_text(n)},
                                                 {"lhs", to_text(lhs)}, {"rhs", to_text(rhs)}});
          return res;
        }
      }
    }
  }
  ++res.cases;
  const Fp extracted = vir.central_charge();
  if (extracted != c) {
    res.fail("central charge differs from dim h", {{"lhs", to_text(extracted)}, {"rhs", to_text(c)}});
  }
  return res;
}

/// L(-1) = D^{(1)} and L(0)v = wt(v) v on homogeneous basis vectors.
inline CheckResult check_virasoro_grading(const FockContext& ctx, std::span<const FockMonomial> basis) {
  const PrimeField& F = ctx.field();
  Virasoro vir(ctx);
  CheckResult res{"virasoro_grading"};
  for (const auto& mono : basis) {
    const FockVector v = FockVector::basis(mono);
    ++res.cases;
    const FockVector l1 = vir.L(-1, v);
    const FockVector d1 = act_D(ctx, 1, v);
    if (!(l1 == d1)) {
      res.fail("L(-1) differs from D^{(1)}", {{"v", to_text(v)}, {"lhs", to_text(l1)}, {"rhs", to_text(d1)}});
      return res;
    }
    ++res.cases;
    const FockVector l0 = vir.L(0, v);
    const FockVector expect = scaled(F, F(mono.weight()), v);
    if (!(l0 == expect)) {
      res.fail("L(0) is not the weight operator", {{"v", to_text(v)}, {"lhs", to_text(l0)}, {"rhs", to_text(expect)}});
      return res;
    }
  }
  return res;
}

/// L(0) annihilates each of the given vectors.
inline CheckResult check_L0_kills(const FockContext& ctx, std::span<const FockVector> vectors) {
  Virasoro vir(ctx);
  CheckResult res{"L0_kills_ideal_generators"};
  for (const auto& g : vectors) {
    ++res.cases;
    const FockVector out = vir.L(0, g);
    if (!out.is_zero()) {
      res.fail("L(0) does not annihilate an ideal generator", {{"v", to_text(g)}, {"lhs", to_text(out)}, {"rhs", "0"}});
      return res;
    }
  }
  return res;
}

}  // namespace heisvoa
