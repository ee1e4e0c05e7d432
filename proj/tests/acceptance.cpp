// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "heisvoa/axioms.hpp"
#include "heisvoa/bulk.hpp"
#include "heisvoa/conformal.hpp"
#include "heisvoa/heismod.hpp"
#include "heisvoa/quotient.hpp"

using namespace heisvoa;

namespace {

struct Outcome {
  bool ok = true;
  std::uint64_t cases = 0;
  std::string why;

  // Records r; keeps the first failure.
  bool take(const CheckResult& r, const std::string& where) {
    cases += r.cases;
    if (!r.passed() && ok) {
      ok = false;
      why = where + ": " + r.id + ": " + r.note;
      for (const auto& [k, v] : r.counterexample) why += "; " + k + " = " + v;
    }
    return ok;
  }
  bool expect(bool cond, const std::string& what) {
    ++cases;
    if (!cond && ok) {
      ok = false;
      why = what;
    }
    return ok;
  }
};

struct Triple {
  std::uint32_t p;
  int d;
  std::int64_t level;
};

const std::vector<Triple> kAxiomTriples = {{3, 1, 1}, {3, 2, 2}, {5, 1, 1}, {5, 2, 1}};

std::vector<FockVector> as_vectors(const std::vector<FockMonomial>& ms) {
  std::vector<FockVector> out;
  for (const auto& m : ms) out.push_back(FockVector::basis(m));
  return out;
}

std::string tag(const Triple& t) {
  return "(p,d,l)=(" + std::to_string(t.p) + "," + std::to_string(t.d) + "," + std::to_string(t.level) + ")";
}

// 1. Lucas binomials against Pascal's triangle reduced mod p.
Outcome criterion1() {
  Outcome o;
  for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
    const PrimeField F(p);
    std::vector<std::vector<std::uint32_t>> row(201);
    for (std::size_t m = 0; m <= 200; ++m) {
      row[m].assign(201, 0);
      row[m][0] = 1;
      for (std::size_t n = 1; n <= m; ++n) row[m][n] = (row[m - 1][n - 1] + (n <= m - 1 ? row[m - 1][n] : 0)) % p;
    }
    for (std::uint64_t m = 0; m <= 200; ++m)
      for (std::uint64_t n = 0; n <= 200; ++n)
        if (!o.expect(F.binom(m, n).value == row[m][n],
                      "C(" + std::to_string(m) + "," + std::to_string(n) + ") mod " + std::to_string(p)))
          return o;
  }
  return o;
}

// 2. Borcherds, skew symmetry, conjugation and weak commutativity on V(l,0).
// Rank 1: every basis triple of weight <= 5. Rank 2: each element of weight <= 5 and
// combined weight <= 9 for Borcherds; all pairs of weight <= 5 for the other identities.
Outcome criterion2() {
  Outcome o;
  const Window win{-4, 4};
  for (const auto& t : kAxiomTriples) {
    const auto ctx = FockContext::standard(t.p, t.d, t.level);
    const auto basis = monomial_basis(t.d, 5);
    const std::int64_t total = t.d == 1 ? 15 : 9;
    if (!o.take(check_borcherds_exhaustive(ctx, ctx, basis, basis, basis, win, win,
                                           [total](const FockMonomial& u, const FockMonomial& v, const FockMonomial& w) {
                                             return u.weight() + v.weight() + w.weight() <= total;
                                           }),
                tag(t)))
      return o;
    VertexEvaluator<FockAction> ev{FockAction(ctx)};
    for (const auto& u : basis)
      for (const auto& v : basis) {
        if (!o.take(check_skew(ev, FockVector::basis(u), FockVector::basis(v), win), tag(t))) return o;
        if (!o.take(check_conjugation(ctx, ev, FockVector::basis(u), FockVector::basis(v), win, 2), tag(t))) return o;
      }
    for (int a = 0; a < t.d; ++a)
      for (int b = 0; b < t.d; ++b)
        for (const auto& w : basis)
          if (!o.take(check_weak_comm_generators(ev, a, b, FockVector::basis(w), 2, 4), tag(t))) return o;
  }
  return o;
}

// 3. u(kp) and u(k)^p commute with every mode on the weight <= 5 basis, |k| <= 3.
Outcome criterion3() {
  Outcome o;
  for (const auto& t : kAxiomTriples) {
    const auto ctx = FockContext::standard(t.p, t.d, t.level);
    const auto vs = as_vectors(monomial_basis(t.d, 5));
    const std::int64_t max_mode = std::max<std::int64_t>(5, 3 * t.p) + 1;
    if (!o.take(check_centrality(ctx, vs, 3, max_mode), tag(t))) return o;
  }
  return o;
}

// 4. Closed forms of D^{(k)} u(-n)^p 1 for n <= 3, k <= 3p.
Outcome criterion4() {
  Outcome o;
  for (std::uint32_t p : {3u, 5u})
    for (int d : {1, 2})
      if (!o.take(check_d_power_closed_forms(FockContext::standard(p, d, 1), 3, 3 * p), "p=" + std::to_string(p)))
        return o;
  return o;
}

// 5. D-stability grid: stable iff lambda_2 = 0, with a verified witness otherwise.
Outcome criterion5() {
  Outcome o;
  for (std::uint32_t p : {3u, 5u, 7u}) {
    const auto ctx = FockContext::standard(p, 1, 1);
    for (std::uint32_t l1 = 0; l1 < p; ++l1)
      for (std::uint32_t l2 = 0; l2 < 2; ++l2) {
        LambdaSpec L(p, 1, 1);
        L.set(0, 1, Fp(l1));
        L.set(0, 2, Fp(l2));
        const auto s = check_D_stability(ctx, L);
        const std::string where = "p=" + std::to_string(p) + " lambda=(" + std::to_string(l1) + "," + std::to_string(l2) + ")";
        o.cases += s.cases;
        if (!o.expect(s.stable == (l2 == 0), where + ": stability verdict")) return o;
        if (s.stable) continue;
        // Recompute the witness: the image of a generator of J that leaves J.
        if (!o.expect(s.generator.has_value(), where + ": missing witness")) return o;
        if (!o.expect(in_ideal(ctx, L, *s.generator), where + ": witness generator is not in J")) return o;
        const FockVector image = act_D(ctx, s.k, *s.generator);
        if (!o.expect(image == s.image && !in_ideal(ctx, L, image), where + ": witness image")) return o;
      }
  }
  return o;
}

// 6. Y(u(-n)^p 1, x) for n = 1, 2 on |exponent| <= 3p: recursion, closed form and the
// direct expansion of A^p + B^p agree, on V(l,0) and on the quotient.
Outcome criterion6() {
  Outcome o;
  for (std::uint32_t p : {3u, 5u})
    for (int d : {1, 2}) {
      const auto ctx = FockContext::standard(p, d, 1);
      VertexEvaluator<FockAction> adj{FockAction(ctx)};
      const auto ws = as_vectors(monomial_basis(d, d == 1 ? 5 : 3));
      LambdaSpec L(p, d, 1);
      L.set(0, 1, Fp(1));
      if (d == 2) L.set(1, 1, Fp(2));
      VertexEvaluator<QuotientAction> quo{QuotientAction(ctx, L)};
      const auto qs = as_vectors(quotient_basis(d, p, d == 1 ? 2 * p : p));
      const std::string where = "p=" + std::to_string(p) + " d=" + std::to_string(d);
      for (int gen = 0; gen < d; ++gen)
        for (std::int64_t n = 1; n <= 2; ++n) {
          if (!o.take(check_pth_power_series(adj, gen, n, std::span<const FockVector>(ws), 3 * p), where + " adjoint")) return o;
          if (!o.take(check_pth_power_series(quo, gen, n, std::span<const FockVector>(qs), 3 * p), where + " quotient")) return o;
        }
    }
  return o;
}

// 7. On the quotient basis of weight <= 2p: u(kp) = 0, u(n)^p = 0 for n != -1,
// u(-1)^p = lambda_1^p.
Outcome criterion7() {
  Outcome o;
  for (std::uint32_t p : {3u, 5u})
    for (int d : {1, 2}) {
      const auto ctx = FockContext::standard(p, d, 1);
      LambdaSpec L(p, d, 1);
      L.set(0, 1, Fp(2));
      if (d == 2) L.set(1, 1, Fp(1));
      const auto basis = quotient_basis(d, p, 2 * p);
      if (!o.take(check_quotient_module_property(ctx, L, basis, 3 * p), "p=" + std::to_string(p) + " d=" + std::to_string(d)))
        return o;
    }
  return o;
}

struct ModuleCase {
  std::uint32_t p;
  std::vector<std::pair<int, std::int64_t>> T;
};

const std::vector<ModuleCase> kModuleCases = {{3, {{0, 1}}}, {3, {{0, 1}, {0, 2}}}, {5, {{0, 1}}}};

LambdaSpec lambda1(std::uint32_t p, std::uint32_t value) {
  LambdaSpec L(p, 1, 1);
  L.set(0, 1, Fp(value));
  return L;
}

// 8. Irreducible modules pass is_irreducible; direct sums (same or different character) fail.
Outcome criterion8() {
  Outcome o;
  for (const auto& mc : kModuleCases) {
    const auto ctx = FockContext::standard(mc.p, 1, 1);
    const ModeSet T(mc.p, 1, mc.T);
    const std::string where = "p=" + std::to_string(mc.p) + " |T|=" + std::to_string(mc.T.size());
    for (std::uint32_t l = 0; l < mc.p; ++l) {
      const auto W = build_irreducible(ctx, T, lambda1(mc.p, l), mc.p);
      if (!o.expect(is_irreducible(W), where + ": irreducible module rejected")) return o;
    }
    const auto A = build_irreducible(ctx, T, lambda1(mc.p, 1), mc.p);
    const auto B = build_irreducible(ctx, T, lambda1(mc.p, 2), mc.p);
    if (!o.expect(!is_irreducible(direct_sum(A, B)), where + ": direct sum with distinct characters accepted")) return o;
    if (!o.expect(!is_irreducible(direct_sum(A, A)), where + ": direct sum with equal characters accepted")) return o;
  }
  return o;
}

// 9. Decomposition of conjugated sums, integration round trips and vacuum repair.
Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(2024);
  for (const auto& mc : kModuleCases) {
    if (mc.p != 3) continue;
    const auto ctx = FockContext::standard(3, 1, 1);
    const ModeSet T(3, 1, mc.T);
    const auto A = build_irreducible(ctx, T, lambda1(3, 1), 3);
    const auto B = build_irreducible(ctx, T, lambda1(3, 2), 3);
    const std::string where = "|T|=" + std::to_string(mc.T.size());
    for (int trial = 0; trial < 20; ++trial) {
      const auto S = conjugate(direct_sum(A, B), random_invertible(A.field(), 2 * A.dim(), rng));
      const auto D = decompose(S, 20, rng());
      if (!o.expect(D.ok() && D.residual == 0, where + ": decomposition not clean: " + D.note)) return o;
      if (!o.expect(D.summands.size() == 2, where + ": expected 2 summands")) return o;
      for (const auto& s : D.summands)
        if (!o.expect(s.basis.size() == A.dim() && s.irreducible, where + ": summand dimension or irreducibility")) return o;
    }
  }

  const ModeSet T(5, 2, {{0, 1}, {1, 1}, {0, 2}});
  const PolyAlgebra P(5, T);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = P.random(rng, 0.3, true);
    std::map<std::size_t, PolyElement> family;
    for (std::size_t k = 0; k < T.size(); ++k) family[k] = P.n_partial(k, f);
    if (!o.expect(integrate_family(P, family) == f, "integration round trip")) return o;
  }

  for (int trial = 0; trial < 50; ++trial) {
    const auto& mc = kModuleCases[static_cast<std::size_t>(trial) % kModuleCases.size()];
    const auto ctx = FockContext::standard(mc.p, 1, 1);
    const ModeSet Tm(mc.p, 1, mc.T);
    const auto A = build_irreducible(ctx, Tm, lambda1(mc.p, 1), mc.p);
    const auto B = build_irreducible(ctx, Tm, lambda1(mc.p, 0), mc.p);
    const auto S = conjugate(direct_sum(A, B), random_invertible(A.field(), 2 * A.dim(), rng));
    const PrimeField& F = S.field();
    std::uniform_int_distribution<std::uint32_t> coef(0, mc.p - 1);
    FpVector v(S.dim());
    for (auto& x : v) x = Fp(coef(rng));
    FpVector h;
    try {
      h = repair_vacuum(S, v);
    } catch (const RepairError& e) {
      o.expect(false, std::string("repair_vacuum: ") + e.what());
      return o;
    }
    FpVector diff(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) diff[i] = F.sub(v[i], h[i]);
    for (const auto& m : S.positive_modes())
      if (!o.expect(is_zero_vector(apply(F, S.matrix(m), diff)), "repair_vacuum: v - h is not a vacuum vector")) return o;
  }
  return o;
}

// 10. Virasoro relations with central charge d, L(-1) = D^{(1)}, L(0) grading, L(0) J = 0.
Outcome criterion10() {
  Outcome o;
  for (std::uint32_t p : {3u, 5u, 7u})
    for (int d : {1, 2}) {
      const auto ctx = FockContext::standard(p, d, 1);
      const std::string where = "p=" + std::to_string(p) + " d=" + std::to_string(d);
      const auto basis = monomial_basis(d, 5);
      const auto vs = as_vectors(basis);
      if (!o.take(check_virasoro_bracket(ctx, vs, Window{-3, 3}), where)) return o;
      Virasoro vir(ctx);
      if (!o.expect(vir.central_charge().value == static_cast<std::uint32_t>(d) % p, where + ": central charge")) return o;
      if (!o.take(check_virasoro_grading(ctx, basis), where)) return o;
      LambdaSpec L(p, d, 1);
      L.set(0, 1, Fp(1));
      L.set(d - 1, p, Fp(1));
      if (!o.take(check_L0_kills(ctx, ideal_generators(ctx, L, 2 * p)), where)) return o;
    }
  return o;
}

struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + HEISVOA_CLI + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// 11. Identical reports for repeated seeded runs; exit codes 0 (pass) and 2 (usage).
Outcome criterion11() {
  Outcome o;
  const std::string data = std::string("\"") + HEISVOA_TEST_DATA + "/";
  const std::vector<std::string> seeded = {"verify all --p 3 --dim 1 --max-weight 3 --seed 5 --lambda " + data + "lambda_p3.json\"",
                                           "verify all --p 5 --dim 2 --level 1 --max-weight 2 --seed 7"};
  for (const auto& args : seeded) {
    const auto a = run_cli(args), b = run_cli(args);
    if (!o.expect(a.code == 0 && b.code == 0, "exit code of: " + args)) return o;
    if (!o.expect(!a.out.empty() && a.out == b.out, "reports differ for: " + args)) return o;
  }
  const std::vector<std::pair<std::string, int>> codes = {
      {"verify axioms --p 5 --dim 1 --max-weight 3 --seed 7", 0},
      {"verify ideal --p 3 --lambda " + data + "bad_lambda_p3.json\"", 0},
      {"decompose " + data + "double_p3.json\"", 0},
      {"verify conformal --p 2", 2},
      {"verify axioms --p 6", 2},
      {"product \"u1(-1\" 1 1", 2},
      {"decompose " + data + "broken_level_p3.json\"", 2},
  };
  for (const auto& [args, code] : codes)
    if (!o.expect(run_cli(args).code == code, "exit code of: " + args)) return o;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Lucas binomials match Pascal mod p", criterion1},
      {"vertex algebra axioms on basis triples", criterion2},
      {"centrality of u(kp) and u(k)^p", criterion3},
      {"closed forms of divided powers of D", criterion4},
      {"D-stability grid with witnesses", criterion5},
      {"p-th power vertex operators", criterion6},
      {"quotient module property", criterion7},
      {"irreducibility test", criterion8},
      {"decomposition, integration, vacuum repair", criterion9},
      {"Virasoro structure", criterion10},
      {"CLI determinism and exit codes", criterion11},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.why = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu %s: %s (%llu cases, %.1fs)\n", i + 1, o.ok ? "PASS" : "FAIL", criteria[i].first.c_str(),
                static_cast<unsigned long long>(o.cases), secs);
    if (!o.ok) {
      std::printf("    %s\n", o.why.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
