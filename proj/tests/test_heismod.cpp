#include <gtest/gtest.h>

#include <random>
#include <set>
#include <vector>

#include "heisvoa/heismod.hpp"

using namespace heisvoa;

namespace {

using Key = std::vector<std::uint32_t>;

Key key_of(const FpVector& v) {
  Key k;
  for (auto x : v) k.push_back(x.value);
  return k;
}

// The submodule generated by v, enumerated element by element: every time a new generator
// enters, the set is replaced by all sums s + c g, and the operators are applied to g.
std::set<Key> brute_submodule(const PrimeField& F, const std::vector<FpMatrix>& ops, const FpVector& v) {
  std::set<Key> elems{Key(v.size(), 0)};
  std::vector<FpVector> queue{v};
  while (!queue.empty()) {
    const FpVector g = queue.back();
    queue.pop_back();
    if (elems.count(key_of(g))) continue;
    std::set<Key> next;
    for (const auto& s : elems)
      for (std::uint32_t c = 0; c < F.p(); ++c) {
        Key t(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) t[i] = F.add(Fp(s[i]), F.mul(Fp(c), g[i])).value;
        next.insert(t);
      }
    elems = std::move(next);
    for (const auto& op : ops) queue.push_back(apply(F, op, g));
  }
  return elems;
}

// Irreducible iff every nonzero vector generates the whole space.
bool brute_irreducible(const HeisModule& W) {
  const PrimeField& F = W.field();
  const auto ops = W.operator_matrices();
  std::size_t total = 1;
  for (std::size_t i = 0; i < W.dim(); ++i) total *= W.p();
  for (std::size_t idx = 1; idx < total; ++idx) {
    FpVector v(W.dim());
    std::size_t t = idx;
    for (auto& x : v) {
      x = Fp(static_cast<std::uint32_t>(t % W.p()));
      t /= W.p();
    }
    if (brute_submodule(F, ops, v).size() != total) return false;
  }
  return true;
}

LambdaSpec lambda_with(std::uint32_t p, int dim, std::vector<std::tuple<int, std::int64_t, std::uint32_t>> entries) {
  LambdaSpec L(p, dim, 1);
  for (auto [i, n, v] : entries) L.set(i, n, Fp(v));
  return L;
}

}  // namespace

TEST(HeisModule, ModeSetValidation) {
  EXPECT_THROW(ModeSet(3, 1, {{0, 3}}), std::invalid_argument);
  EXPECT_THROW(ModeSet(3, 1, {{1, 1}}), std::invalid_argument);
  EXPECT_THROW(ModeSet(3, 1, {{0, 0}}), std::invalid_argument);
  const ModeSet T(5, 2, {{1, 2}, {0, 1}, {0, 2}, {0, 1}});
  ASSERT_EQ(T.size(), 3u);
  EXPECT_EQ(T.pairs()[0], (std::pair<int, std::int64_t>{0, 1}));
  EXPECT_EQ(T.pairs()[2], (std::pair<int, std::int64_t>{1, 2}));
  EXPECT_EQ(ModeSet::up_to(3, 2, 4).size(), 6u);
}

TEST(HeisModule, IrreducibleSatisfiesHeisenbergRelations) {
  const auto ctx = FockContext::standard(5, 2, 3);
  const ModeSet T(5, 2, {{0, 1}, {1, 2}});
  const auto W = build_irreducible(ctx, T, lambda_with(5, 2, {{0, 1, 2}}), 5);
  const PrimeField& F = W.field();
  ASSERT_EQ(W.dim(), 25u);
  // [u_i(n), u_j(-m)] = n delta_ij delta_nm l g_i by direct matrix products.
  for (const auto& a : W.modes())
    for (const auto& b : W.modes()) {
      const FpMatrix ab = multiply(F, W.matrix(a), W.matrix(b));
      const FpMatrix ba = multiply(F, W.matrix(b), W.matrix(a));
      const bool paired = a.gen == b.gen && a.deg + b.deg == 0;
      const Fp c = paired ? F.mul(F(a.deg), F(3)) : Fp(0);
      ASSERT_EQ(subtract(F, ab, ba), scale(F, c, FpMatrix::identity(W.dim()))) << mode_name(a) << " " << mode_name(b);
    }
  EXPECT_TRUE(check_module_invariants(W).passed());
  EXPECT_TRUE(check_C0(W).passed());
  // u1(-1)^5 acts as lambda^5 = 2.
  EXPECT_EQ(matrix_power(F, W.matrix(Mode{0, -1}), 5), scale(F, Fp(2), FpMatrix::identity(W.dim())));
  EXPECT_THROW(W.matrix(Mode{0, 2}), std::out_of_range);
}

TEST(HeisModule, InvariantsDetectWrongLevel) {
  const auto ctx = FockContext::standard(3, 1, 1);
  const auto W = build_irreducible(ctx, ModeSet(3, 1, {{0, 1}}), lambda_with(3, 1, {}), 3);
  HeisModule bad(3, 1, 2, W.gram(), W.mode_window(), W.dim(), W.central());
  for (const auto& [m, a] : W.actions()) bad.set_action(m, a);
  const auto r = check_module_invariants(bad);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.note, "level relation violated");
}

TEST(HeisModule, IrreducibilityMatchesExhaustiveSearch) {
  for (std::uint32_t p : {3u, 5u}) {
    const auto ctx = FockContext::standard(p, 1, 1);
    const ModeSet T(p, 1, {{0, 1}});
    const auto W = build_irreducible(ctx, T, lambda_with(p, 1, {{0, 1, 1}}), p);
    const auto W2 = build_irreducible(ctx, T, lambda_with(p, 1, {{0, 1, 2}}), p);
    EXPECT_TRUE(brute_irreducible(W));
    EXPECT_TRUE(is_irreducible(W));
    if (p == 3) {
      for (const auto& S : {direct_sum(W, W2), direct_sum(W, W)}) {
        EXPECT_FALSE(brute_irreducible(S));
        EXPECT_FALSE(is_irreducible(S));
      }
    }
  }
}

TEST(HeisModule, SameCharacterSumIsReducibleDeterministically) {
  // W + W has a single central block; only the vacuum enumeration can see the splitting.
  const auto ctx = FockContext::standard(3, 1, 1);
  const auto W = build_irreducible(ctx, ModeSet(3, 1, {{0, 1}, {0, 2}}), lambda_with(3, 1, {}), 3);
  std::mt19937_64 rng(5);
  const auto S = conjugate(direct_sum(W, W), random_invertible(W.field(), 2 * W.dim(), rng));
  EXPECT_FALSE(is_irreducible(S, 0));
  const auto d = decompose(S);
  EXPECT_TRUE(d.ok());
  EXPECT_EQ(d.summands.size(), 2u);
}

TEST(HeisModule, DecomposeConjugatedSum) {
  const auto ctx = FockContext::standard(3, 2, 1);
  const ModeSet T(3, 2, {{0, 1}, {1, 1}});
  const auto A = build_irreducible(ctx, T, lambda_with(3, 2, {{0, 1, 1}}), 3);
  const auto B = build_irreducible(ctx, T, lambda_with(3, 2, {{0, 1, 2}, {1, 1, 1}}), 3);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 3; ++trial) {
    const auto S = conjugate(direct_sum(A, B), random_invertible(A.field(), A.dim() + B.dim(), rng));
    const auto d = decompose(S);
    ASSERT_TRUE(d.ok()) << d.note;
    ASSERT_EQ(d.summands.size(), 2u);
    std::set<std::uint32_t> first_lambdas;
    for (const auto& s : d.summands) {
      EXPECT_EQ(s.basis.size(), 9u);
      EXPECT_TRUE(s.irreducible);
      const auto part = restrict_module(S, s.basis);
      const bool isoA = find_intertwiner(part, A).has_value();
      const bool isoB = find_intertwiner(part, B).has_value();
      EXPECT_NE(isoA, isoB);
      first_lambdas.insert(s.tag.at(0, 1).value);
    }
    EXPECT_EQ(first_lambdas, (std::set<std::uint32_t>{1, 2}));
  }
}

TEST(HeisModule, IntertwinerIntertwines) {
  const auto ctx = FockContext::standard(5, 1, 1);
  const auto A = build_irreducible(ctx, ModeSet(5, 1, {{0, 1}}), lambda_with(5, 1, {{0, 1, 3}}), 5);
  std::mt19937_64 rng(2);
  const auto B = conjugate(A, random_invertible(A.field(), A.dim(), rng));
  const auto X = find_intertwiner(A, B);
  ASSERT_TRUE(X.has_value());
  const PrimeField& F = A.field();
  for (const auto& m : A.modes()) EXPECT_EQ(multiply(F, *X, A.matrix(m)), multiply(F, B.matrix(m), *X));
  const auto C = build_irreducible(ctx, ModeSet(5, 1, {{0, 1}}), lambda_with(5, 1, {{0, 1, 4}}), 5);
  EXPECT_FALSE(find_intertwiner(A, C).has_value());
}

TEST(HeisModule, IntegrateRecoversZeroConstantPolynomial) {
  const ModeSet T(5, 2, {{0, 1}, {1, 1}, {0, 2}});
  const PolyAlgebra P(5, T);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = P.random(rng, 0.3, true);
    std::map<std::size_t, PolyElement> family;
    for (std::size_t k = 0; k < T.size(); ++k) family[k] = P.n_partial(k, f);
    EXPECT_EQ(integrate_family(P, family), f);
  }
}

TEST(HeisModule, IntegrateRejectsBadFamilies) {
  const ModeSet T(3, 1, {{0, 1}, {0, 2}});
  const PolyAlgebra P(3, T);
  PolyElement top;
  top.add_term(P.field(), {2, 0}, Fp(1));
  EXPECT_THROW(integrate_family(P, {{0, top}}), IntegrationError);
  PolyElement a, b;
  a.add_term(P.field(), {0, 1}, Fp(1));  // d/dx0 f = x1
  b.add_term(P.field(), {0, 0}, Fp(1));  // 2 d/dx1 f = 1, incompatible with the above
  EXPECT_THROW(integrate_family(P, {{0, a}, {1, b}}), IntegrationError);
}

TEST(HeisModule, RepairVacuumProducesVacuumVector) {
  const auto ctx = FockContext::standard(3, 1, 1);
  const ModeSet T(3, 1, {{0, 1}, {0, 2}});
  const auto A = build_irreducible(ctx, T, lambda_with(3, 1, {{0, 1, 1}}), 3);
  const auto B = build_irreducible(ctx, T, lambda_with(3, 1, {{0, 1, 2}}), 3);
  std::mt19937_64 rng(23);
  const auto S = conjugate(direct_sum(A, B), random_invertible(A.field(), A.dim() + B.dim(), rng));
  const PrimeField& F = S.field();
  std::uniform_int_distribution<std::uint32_t> coef(0, 2);
  for (int trial = 0; trial < 10; ++trial) {
    FpVector v(S.dim());
    for (auto& x : v) x = Fp(coef(rng));
    const auto h = repair_vacuum(S, v);
    FpVector diff(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) diff[i] = F.sub(v[i], h[i]);
    for (const auto& m : S.positive_modes()) EXPECT_TRUE(is_zero_vector(apply(F, S.matrix(m), diff)));
  }
}

TEST(HeisModule, NonSemisimpleCentralModeFailsC0) {
  // One central mode u(-3) acting as a Jordan block; no variables.
  HeisModule W(3, 1, 1, {Fp(1)}, 3, 2, LambdaSpec(3, 1, 1));
  FpMatrix J(2, 2);
  J(0, 1) = Fp(1);
  W.set_action(Mode{0, -3}, J);
  EXPECT_TRUE(check_module_invariants(W).passed());
  EXPECT_FALSE(central_blocks(W).has_value());
  EXPECT_FALSE(check_C0(W).passed());
  EXPECT_THROW(decompose(W), std::invalid_argument);

  HeisModule V(3, 1, 1, {Fp(1)}, 3, 2, LambdaSpec(3, 1, 1));
  V.set_action(Mode{0, 3}, J);
  const auto r = check_C0(V);
  EXPECT_FALSE(r.passed());
  EXPECT_NE(r.note.find("(i)"), std::string::npos);
}

TEST(HeisModule, CentralBlocksTagCharacters) {
  const auto ctx = FockContext::standard(3, 1, 1);
  LambdaSpec L = lambda_with(3, 1, {{0, 1, 2}, {0, 3, 1}});
  L.set_lambda0({Fp(2)});
  const auto W = build_irreducible(ctx, ModeSet(3, 1, {{0, 1}}), L, 3);
  const auto blocks = central_blocks(W);
  ASSERT_TRUE(blocks.has_value());
  ASSERT_EQ(blocks->size(), 1u);
  EXPECT_EQ((*blocks)[0].tag.at(0, 1).value, 2u);
  EXPECT_EQ((*blocks)[0].tag.at(0, 3).value, 1u);
  EXPECT_EQ((*blocks)[0].tag.lambda0()[0].value, 2u);
}
