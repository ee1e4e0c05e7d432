#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "heisvoa/axioms.hpp"
#include "heisvoa/bulk.hpp"
#include "heisvoa/vertex.hpp"

using namespace heisvoa;

namespace {

// Module action with every annihilation mode doubled: the level relation on the module
// no longer matches the algebra, so the Borcherds identity must fail somewhere.
class DoubledAnnihilation : public FockSpace {
 public:
  explicit DoubledAnnihilation(const FockContext& ctx) : FockSpace(ctx.field()), ctx_(&ctx) {}
  FockVector act(Mode m, const FockVector& w) const {
    FockVector out = act_mode(*ctx_, m, w);
    return m.deg > 0 ? scaled(field(), field()(2), out) : out;
  }
  std::int64_t annihilation_reach(const FockVector& w) const { return w.max_weight(); }
  std::int64_t truncation_bound(std::int64_t weight, std::uint32_t, const FockVector& w) const {
    return weight + w.max_weight();
  }

 private:
  const FockContext* ctx_;
};

// :a(j) b(k): applied to w: creation modes (index < 0) to the left.
FockVector normal_ordered(const FockContext& ctx, int a, std::int64_t j, int b, std::int64_t k, const FockVector& w) {
  if (j < 0) return act_mode(ctx, Mode{a, j}, act_mode(ctx, Mode{b, k}, w));
  return act_mode(ctx, Mode{b, k}, act_mode(ctx, Mode{a, j}, w));
}

// (a(-n) b(-1) 1)_m w from Y = :d^{(n-1)}a(x) b(x):, with d^{(n-1)} x^{-j-1} = C(-j-1, n-1) x^{-j-n}.
FockVector two_generator_oracle(const FockContext& ctx, int a, std::int64_t n, int b, std::int64_t m, const FockVector& w) {
  const PrimeField& F = ctx.field();
  const std::int64_t W = w.max_weight();
  FockVector out;
  for (std::int64_t j = m - n - W - 2; j <= W + 1; ++j) {
    const std::int64_t k = m - n - j;
    const Fp c = F.binom_signed_top(-j - 1, static_cast<std::uint64_t>(n - 1));
    if (c.value == 0) continue;
    out.add_scaled(F, c, normal_ordered(ctx, a, j, b, k, w));
  }
  return out;
}

}  // namespace

TEST(Vertex, GeneratorFieldIsModeAction) {
  const auto ctx = FockContext::standard(5, 2, 3);
  VertexEvaluator<FockAction> ev{FockAction(ctx)};
  for (const auto& m : monomial_basis(2, 4))
    for (int i = 0; i < 2; ++i)
      for (std::int64_t n = -5; n <= 5; ++n) {
        const FockVector w = FockVector::basis(m);
        ASSERT_EQ(ev.product(generator_vector(i), n, w), act_mode(ctx, Mode{i, n}, w));
      }
}

TEST(Vertex, QuadraticFieldsMatchNormalOrdering) {
  const auto ctx = FockContext::standard(7, 2, 2);
  VertexEvaluator<FockAction> ev{FockAction(ctx)};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (std::int64_t n = 1; n <= 3; ++n) {
        const FockVector u = FockVector::basis(FockMonomial({{n, a, 1}, {1, b, 1}}));
        for (const auto& wm : monomial_basis(2, 3))
          for (std::int64_t m = -4; m <= 5; ++m) {
            const FockVector w = FockVector::basis(wm);
            ASSERT_EQ(ev.product(u, m, w), two_generator_oracle(ctx, a, n, b, m, w))
                << u.str() << " _" << m << " " << w.str();
          }
      }
}

TEST(Vertex, VacuumAndCreation) {
  const auto ctx = FockContext::standard(3, 1, 1);
  for (const auto& m : monomial_basis(1, 5)) {
    const FockVector v = FockVector::basis(m);
    EXPECT_EQ(product_nth(ctx, FockVector::vacuum(), -1, v), v);
    EXPECT_EQ(product_nth(ctx, v, -1, FockVector::vacuum()), v);
    EXPECT_TRUE(product_nth(ctx, v, 0, FockVector::vacuum()).is_zero());
  }
  VertexEvaluator<FockAction> ev{FockAction(ctx)};
  EXPECT_TRUE(check_vacuum_axioms(ev, monomial_basis(1, 5), Window{-5, 5}).passed());
}

TEST(Vertex, TruncationBound) {
  const auto ctx = FockContext::standard(5, 2, 1);
  const auto basis = monomial_basis(2, 3);
  for (const auto& u : basis)
    for (const auto& w : basis)
      for (std::int64_t k = u.weight() + w.weight(); k <= u.weight() + w.weight() + 3; ++k)
        EXPECT_TRUE(product_nth(ctx, FockVector::basis(u), k, FockVector::basis(w)).is_zero());
}

TEST(Vertex, ProductExamples) {
  const auto ctx = FockContext::standard(5, 1, 1);
  const FockVector u = generator_vector(0);
  EXPECT_EQ(product_nth(ctx, u, 1, u), FockVector::vacuum());
  EXPECT_TRUE(product_nth(ctx, u, 5, FockVector::basis(FockMonomial({{2, 0, 2}}))).is_zero());
}

TEST(Vertex, ModeRangeGuard) {
  const auto ctx = FockContext::standard(5, 1, 1);
  const FockVector u = FockVector::basis(FockMonomial({{1, 0, 2}}));
  EXPECT_THROW(product_nth(ctx, u, -3000, u), std::out_of_range);
}

TEST(Vertex, BulkEngineMatchesGenericEvaluator) {
  for (auto [p, d, l] : std::vector<std::tuple<std::uint32_t, int, std::int64_t>>{{3, 1, 1}, {5, 2, 1}, {3, 2, 2}}) {
    const auto alg = FockContext::standard(p, d, l);
    for (const auto& mod : {alg, alg.with_lambda0(std::vector<Fp>(static_cast<std::size_t>(d), Fp(2)))}) {
      VertexEvaluator<FockAction> ev{FockAction(mod)};
      IndexedProducts bulk(mod);
      const auto basis = monomial_basis(d, 3);
      for (const auto& u : basis)
        for (const auto& w : basis)
          for (std::int64_t k = -4; k <= 4; ++k) {
            const auto a = ev.product(u, k, FockVector::basis(w));
            const auto b = bulk.dense_to_vector(bulk.product(bulk.id(u), k, bulk.id(w)));
            ASSERT_EQ(a, b) << u.str() << "_" << k << " " << w.str();
          }
    }
  }
}

TEST(Vertex, BorcherdsGenericAndBulk) {
  const auto alg = FockContext::standard(3, 2, 2);
  const auto mod = alg.with_lambda0({Fp(1), Fp(2)});
  VertexEvaluator<FockAction> A{FockAction(alg)};
  VertexEvaluator<FockAction> M{FockAction(mod)};
  const auto basis = monomial_basis(2, 2);
  for (const auto& u : basis)
    for (const auto& v : basis)
      for (const auto& w : basis)
        ASSERT_TRUE(check_borcherds(A, M, FockVector::basis(u), FockVector::basis(v), FockVector::basis(w), Window{-3, 3},
                                    Window{-3, 3})
                        .passed());
  const auto all = [](const auto&, const auto&, const auto&) { return true; };
  EXPECT_TRUE(check_borcherds_exhaustive(alg, mod, basis, basis, basis, Window{-3, 3}, Window{-3, 3}, all).passed());
}

TEST(Vertex, BorcherdsDetectsInconsistentModule) {
  const auto ctx = FockContext::standard(5, 1, 1);
  VertexEvaluator<FockAction> A{FockAction(ctx)};
  VertexEvaluator<DoubledAnnihilation> M{DoubledAnnihilation(ctx)};
  const FockVector a = generator_vector(0);
  const auto r = check_borcherds(A, M, a, a, FockVector::vacuum(), Window{-2, 2}, Window{-2, 2});
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.counterexample.empty());
}

TEST(Vertex, SkewSymmetryAndConjugation) {
  const auto ctx = FockContext::standard(3, 2, 1);
  VertexEvaluator<FockAction> ev{FockAction(ctx)};
  const auto basis = monomial_basis(2, 3);
  for (const auto& u : basis)
    for (const auto& v : basis) {
      ASSERT_TRUE(check_skew(ev, FockVector::basis(u), FockVector::basis(v), Window{-4, 4}).passed());
      ASSERT_TRUE(check_conjugation(ctx, ev, FockVector::basis(u), FockVector::basis(v), Window{-4, 4}, 4).passed());
    }
}

TEST(Vertex, WeakCommutativityNeedsSecondPower) {
  const auto ctx = FockContext::standard(5, 2, 1);
  VertexEvaluator<FockAction> ev{FockAction(ctx)};
  for (const auto& w : monomial_basis(2, 3)) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) EXPECT_TRUE(check_weak_comm_generators(ev, a, b, FockVector::basis(w), 2, 4).passed());
  }
  // (x1 - x2)[a(x1), a(x2)] = l x2^{-1} d/dx... is nonzero at nonzero level.
  EXPECT_FALSE(check_weak_comm_generators(ev, 0, 0, FockVector::vacuum(), 1, 4).passed());
  // Orthogonal generators commute outright.
  EXPECT_TRUE(check_weak_comm_generators(ev, 0, 1, FockVector::vacuum(), 0, 4).passed());
}

TEST(Vertex, VacuumLikeRejectsNonVacuum) {
  const auto ctx = FockContext::standard(5, 1, 1);
  VertexEvaluator<FockAction> ev{FockAction(ctx)};
  std::vector<FockVector> span;
  for (const auto& m : monomial_basis(1, 3)) span.push_back(FockVector::basis(m));
  auto derive = [&](std::uint64_t k, const FockVector& w) { return act_D(ctx, k, w); };
  auto prod = [&](const FockVector& v, std::int64_t n, const FockVector& w) { return ev.product(v, n, w); };
  auto zero = [](const FockVector& x) { return x.is_zero(); };
  EXPECT_TRUE(check_vacuum_like<FockVector>(derive, prod, zero, span, FockVector::vacuum(), 4, 6).passed());
  EXPECT_FALSE(check_vacuum_like<FockVector>(derive, prod, zero, span, generator_vector(0), 4, 6).passed());
}

TEST(Vertex, VertexOperatorWindow) {
  const auto ctx = FockContext::standard(5, 1, 1);
  const FockVector a = generator_vector(0);
  const auto Y = vertex_operator(ctx, a, a, Window{-3, 3});
  EXPECT_TRUE(Y.singular_complete);
  // a(x)a(-1)1 = 1 x^{-2} + a(-1)^2 1 + higher: x^{-2} coefficient is a_1 a = 1.
  EXPECT_EQ(Y.series.coeff(FockAction(ctx), -2), FockVector::vacuum());
  EXPECT_THROW(vertex_operator(ctx, a, a, Window{2, 1}), std::invalid_argument);
}
