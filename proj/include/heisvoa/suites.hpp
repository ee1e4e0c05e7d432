#pragma once

// The verification suites behind `heisvoa verify`. Each suite is a list of named checks;
// a report is deterministic for fixed parameters (timings are opt-in).

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "heisvoa/axioms.hpp"
#include "heisvoa/bulk.hpp"
#include "heisvoa/conformal.hpp"
#include "heisvoa/heismod.hpp"
#include "heisvoa/quotient.hpp"
#include "heisvoa/serialize.hpp"

namespace heisvoa {

/// Bad parameters for a suite (CLI exit code 2).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct VerifyParams {
  std::uint32_t p = 5;
  int dim = 1;
  std::int64_t level = 1;
  std::vector<Fp> gram;     // diagonal of the form; empty means all ones
  LambdaSpec lambda;        // central character on h_+; default-constructed means zero
  std::vector<Fp> lambda0;  // if nonempty, the axioms also run on M(l, lambda0)
  std::int64_t max_weight = 3;
  // Bound on wt u + wt v + wt w for the exhaustive Borcherds check; 0 picks min(3 max_weight, 9).
  std::int64_t max_total_weight = 0;
  std::int64_t mode_window = 1;
  std::uint64_t seed = 0;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"axioms", "conformal", "ideal", "pth-power", "heisenberg", "all"};
  return names;
}

/// Validates the parameters and fills in defaults.
inline VerifyParams normalized(VerifyParams P) {
  if (P.p < 2 || !is_prime(P.p)) throw UsageError("p must be a prime");
  if (P.p > 1000) throw UsageError("p must be at most 1000");
  if (P.dim < 1 || P.dim > 4) throw UsageError("dim must be between 1 and 4");
  if (P.max_weight < 0 || P.max_weight > 8) throw UsageError("max-weight must be between 0 and 8");
  if (P.max_total_weight < 0) throw UsageError("max-total-weight must be >= 0");
  if (P.mode_window < 1) throw UsageError("mode-window must be >= 1");
  if (P.max_total_weight == 0) P.max_total_weight = std::min<std::int64_t>(3 * P.max_weight, 9);
  if (P.gram.empty()) P.gram.assign(static_cast<std::size_t>(P.dim), Fp(1));
  if (P.gram.size() != static_cast<std::size_t>(P.dim)) throw UsageError("gram needs dim entries");
  for (auto g : P.gram)
    if (g.value % P.p == 0) throw UsageError("gram entries must be nonzero mod p");
  for (auto& g : P.gram) g = Fp(g.value % P.p);
  if (P.lambda.dim() != P.dim || P.lambda.p() != P.p) {
    if (!P.lambda.values().empty()) throw UsageError("lambda does not match p and dim");
    P.lambda = LambdaSpec(P.p, P.dim, P.level);
  }
  if (!P.lambda0.empty() && P.lambda0.size() != static_cast<std::size_t>(P.dim))
    throw UsageError("lambda0 needs dim entries");
  return P;
}

inline FockContext make_context(const VerifyParams& P) {
  FpMatrix g(static_cast<std::size_t>(P.dim), static_cast<std::size_t>(P.dim));
  for (int i = 0; i < P.dim; ++i) g(i, i) = P.gram[i];
  return FockContext(P.p, P.dim, P.level, std::move(g));
}

struct VerifyReport {
  std::string suite;
  VerifyParams params;
  std::vector<CheckResult> checks;
  std::vector<double> seconds;  // parallel to checks; only filled when timing is on
  bool timing = false;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
  }

  Json to_json() const {
    Json j;
    j["suite"] = suite;
    Json p;
    p["p"] = params.p;
    p["dim"] = params.dim;
    p["level"] = params.level;
    Json g = Json::array();
    for (auto v : params.gram) g.push_back(v.value);
    p["gram"] = g;
    p["lambda"] = heisvoa::to_json(params.lambda)["lambda"];
    Json l0 = Json::array();
    for (auto v : params.lambda0) l0.push_back(v.value);
    p["lambda0"] = l0;
    p["max_weight"] = params.max_weight;
    p["max_total_weight"] = params.max_total_weight;
    p["mode_window"] = params.mode_window;
    p["seed"] = params.seed;
    j["params"] = p;
    Json cs = Json::array();
    std::size_t npass = 0, nfail = 0, nskip = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
      Json c = heisvoa::to_json(checks[i]);
      if (timing && i < seconds.size()) c["seconds"] = seconds[i];
      cs.push_back(c);
      switch (checks[i].status) {
        case Status::pass: ++npass; break;
        case Status::fail: ++nfail; break;
        case Status::skipped: ++nskip; break;
      }
    }
    j["checks"] = cs;
    j["summary"] = Json{{"pass", npass}, {"fail", nfail}, {"skipped", nskip}};
    j["status"] = passed() ? "pass" : "fail";
    return j;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "suite " << suite << " (p=" << params.p << ", dim=" << params.dim << ", level=" << params.level
       << ", seed=" << params.seed << ")\n";
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto& c = checks[i];
      os << (c.status == Status::pass ? "PASS" : c.status == Status::fail ? "FAIL" : "SKIP") << "  " << c.id << "  ["
         << c.cases << " cases]";
      if (timing && i < seconds.size()) os << "  " << seconds[i] << "s";
      if (!c.note.empty()) os << "  " << c.note;
      os << '\n';
      for (const auto& [k, v] : c.details) os << "      " << k << ": " << v << '\n';
      for (const auto& [k, v] : c.counterexample) os << "      " << k << " = " << v << '\n';
    }
    os << (passed() ? "result: pass" : "result: fail") << '\n';
    return os.str();
  }
};

namespace detail {

class SuiteRunner {
 public:
  SuiteRunner(VerifyReport& rep, std::string prefix) : rep_(rep), prefix_(std::move(prefix)) {}

  void run(const std::string& id, const std::function<CheckResult()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r = fn();
    const auto t1 = std::chrono::steady_clock::now();
    r.id = prefix_ + "." + id;
    rep_.checks.push_back(std::move(r));
    rep_.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
  }

  void skip(const std::string& id, std::string why) {
    CheckResult r{prefix_ + "." + id, Status::skipped};
    r.note = std::move(why);
    rep_.checks.push_back(std::move(r));
    rep_.seconds.push_back(0.0);
  }

 private:
  VerifyReport& rep_;
  std::string prefix_;
};

inline std::vector<FockVector> as_vectors(const std::vector<FockMonomial>& basis) {
  std::vector<FockVector> out;
  out.reserve(basis.size());
  for (const auto& m : basis) out.push_back(FockVector::basis(m));
  return out;
}

template <class Check>
CheckResult fold(const std::string& name, Check each) {
  CheckResult total{name};
  each([&](const CheckResult& r) {
    total.cases += r.cases;
    if (!r.passed() && total.passed()) {
      total.status = Status::fail;
      total.note = r.note;
      total.counterexample = r.counterexample;
    }
    return total.passed();
  });
  return total;
}

// Axioms on one module: Borcherds (bulk and sampled), conjugation, weak commutativity.
inline void module_axioms(SuiteRunner& run, const VerifyParams& P, const FockContext& alg, const FockContext& mod,
                          const std::vector<FockMonomial>& basis) {
  const Window win{-4, 4};
  const std::int64_t total = P.max_total_weight;
  run.run("borcherds", [&] {
    return check_borcherds_exhaustive(alg, mod, basis, basis, basis, win, win,
                                      [total](const FockMonomial& u, const FockMonomial& v, const FockMonomial& w) {
                                        return u.weight() + v.weight() + w.weight() <= total;
                                      });
  });
  run.run("borcherds_sampled", [&] {
    // Random combinations through the generic evaluator: an independent route.
    std::mt19937_64 rng(P.seed);
    std::uniform_int_distribution<std::uint32_t> coef(0, P.p - 1);
    std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
    auto random_vector = [&] {
      FockVector v;
      for (int t = 0; t < 2; ++t) v.add_term(alg.field(), basis[pick(rng)], Fp(coef(rng)));
      return v;
    };
    VertexEvaluator<FockAction> A{FockAction(alg)};
    VertexEvaluator<FockAction> M{FockAction(mod)};
    return fold("borcherds_sampled", [&](auto sink) {
      for (int s = 0; s < 8; ++s) {
        const FockVector u = random_vector(), v = random_vector(), w = random_vector();
        if (!sink(check_borcherds(A, M, u, v, w, win, win))) return;
      }
    });
  });
  run.run("conjugation", [&] {
    VertexEvaluator<FockAction> M{FockAction(mod)};
    return fold("conjugation", [&](auto sink) {
      for (const auto& u : basis)
        for (const auto& w : basis)
          if (!sink(check_conjugation(alg, M, FockVector::basis(u), FockVector::basis(w), win, 2))) return;
    });
  });
  run.run("weak_commutativity", [&] {
    VertexEvaluator<FockAction> M{FockAction(mod)};
    return fold("weak_commutativity", [&](auto sink) {
      for (int a = 0; a < P.dim; ++a)
        for (int b = 0; b < P.dim; ++b)
          for (const auto& w : basis)
            if (!sink(check_weak_comm_generators(M, a, b, FockVector::basis(w), 2, 4))) return;
    });
  });
}

inline void suite_axioms(VerifyReport& rep, const VerifyParams& P) {
  const FockContext ctx = make_context(P);
  const auto basis = monomial_basis(P.dim, P.max_weight);
  const auto vectors = as_vectors(basis);
  {
    SuiteRunner run(rep, "axioms.adjoint");
    module_axioms(run, P, ctx, ctx, basis);
    run.run("skew_symmetry", [&] {
      VertexEvaluator<FockAction> A{FockAction(ctx)};
      return fold("skew_symmetry", [&](auto sink) {
        for (const auto& u : vectors)
          for (const auto& v : vectors)
            if (!sink(check_skew(A, u, v, Window{-4, 4}))) return;
      });
    });
    run.run("vacuum_creation_grading", [&] {
      VertexEvaluator<FockAction> A{FockAction(ctx)};
      return check_vacuum_axioms(A, basis, Window{-4, 4});
    });
    run.run("D_composition", [&] { return check_D_composition(ctx, vectors, 4); });
    run.run("centrality", [&] {
      const std::int64_t reach = std::max<std::int64_t>(P.max_weight, 3 * static_cast<std::int64_t>(P.p)) + 1;
      return check_centrality(ctx, vectors, 3, reach);
    });
    run.run("vacuum_like", [&] {
      VertexEvaluator<FockAction> A{FockAction(ctx)};
      return check_vacuum_like<FockVector>([&](std::uint64_t k, const FockVector& w) { return act_D(ctx, k, w); },
                                           [&](const FockVector& v, std::int64_t n, const FockVector& w) { return A.product(v, n, w); },
                                           [](const FockVector& x) { return x.is_zero(); }, vectors, FockVector::vacuum(),
                                           static_cast<std::uint64_t>(2 * P.max_weight + 2), 2 * P.max_weight + 2);
    });
  }
  if (!P.lambda0.empty()) {
    const FockContext mod = ctx.with_lambda0(P.lambda0);
    SuiteRunner run(rep, "axioms.module");
    module_axioms(run, P, ctx, mod, basis);
  }
}

inline void suite_conformal(VerifyReport& rep, const VerifyParams& P) {
  const FockContext ctx = make_context(P);
  SuiteRunner run(rep, "conformal");
  const auto basis = monomial_basis(P.dim, P.max_weight);
  const auto vectors = as_vectors(basis);
  run.run("virasoro_bracket", [&] { return check_virasoro_bracket(ctx, vectors, Window{-3, 3}); });
  run.run("virasoro_grading", [&] { return check_virasoro_grading(ctx, basis); });
  run.run("L0_kills_ideal_generators", [&] {
    return check_L0_kills(ctx, ideal_generators(ctx, P.lambda, 2 * static_cast<std::int64_t>(P.p)));
  });
}

inline std::string lambda_text(const LambdaSpec& l) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [key, v] : l.values()) {
    os << (first ? "" : ", ") << "u" << key.first + 1 << "(-" << key.second << "): " << v.value;
    first = false;
  }
  os << '}';
  return os.str();
}

inline void suite_ideal(VerifyReport& rep, const VerifyParams& P) {
  const FockContext ctx = make_context(P);
  const LambdaSpec& L = P.lambda;
  const std::uint32_t p = P.p;
  SuiteRunner run(rep, "ideal");
  run.run("D_power_closed_forms", [&] { return check_d_power_closed_forms(ctx, 3, 3 * p); });
  run.run("D_stability", [&] {
    const auto s = check_D_stability(ctx, L);
    CheckResult r{"D_stability"};
    r.cases = s.cases;
    r.details.emplace_back("lambda", lambda_text(L));
    r.details.emplace_back("in_Lambda", L.in_Lambda() ? "yes" : "no");
    r.details.emplace_back("stable", s.stable ? "yes" : "no");
    r.note = s.stable ? "D-stable" : "not D-stable";
    if (!s.stable) {
      r.details.emplace_back("generator", to_text(*s.generator));
      r.details.emplace_back("k", std::to_string(s.k));
      r.details.emplace_back("image", to_text(s.image));
      r.details.emplace_back("image_normal_form", to_text(s.image_normal_form));
    }
    if (s.stable != L.in_Lambda())
      r.fail(s.stable ? "J is D-stable but lambda is not in Lambda" : "J is not D-stable although lambda is in Lambda",
             r.details);
    return r;
  });
  run.run("generators_reduce_to_zero", [&] {
    CheckResult r{"generators_reduce_to_zero"};
    for (const auto& g : ideal_generators(ctx, L, 3 * static_cast<std::int64_t>(p))) {
      ++r.cases;
      const FockVector nf = normal_form(ctx, L, g);
      if (!nf.is_zero()) {
        r.fail("an ideal generator has a nonzero normal form", {{"generator", to_text(g)}, {"lhs", to_text(nf)}, {"rhs", "0"}});
        break;
      }
    }
    return r;
  });
  if (!L.in_Lambda()) {
    for (const char* id : {"quotient_rank", "quotient_module_property", "quotient_maximality", "quotient_vacuum_like"})
      run.skip(id, "lambda is not in Lambda; the quotient is not a module");
    return;
  }
  run.run("quotient_rank", [&] {
    // Largest depth whose monomial box stays small.
    std::int64_t depth = 1;
    auto box = [&](std::int64_t D) {
      double n = 1;
      for (std::int64_t k = 0; k < D * P.dim; ++k) n *= p + 1;
      return n;
    };
    while (box(depth + 1) <= 20000) ++depth;
    std::size_t free = 0;
    for (std::int64_t n = 1; n <= depth; ++n)
      if (n % p != 0) free += static_cast<std::size_t>(P.dim);
    std::size_t expect = 1;
    for (std::size_t k = 0; k < free; ++k) expect *= p;
    CheckResult r{"quotient_rank"};
    r.cases = 1;
    const std::size_t got = quotient_rank(ctx, L, depth, p);
    r.details.emplace_back("depth", std::to_string(depth));
    r.details.emplace_back("rank", std::to_string(got));
    if (got != expect)
      r.fail("rank of the truncated quotient differs from p^(#free variables)",
             {{"depth", std::to_string(depth)}, {"lhs", std::to_string(got)}, {"rhs", std::to_string(expect)}});
    return r;
  });
  run.run("quotient_module_property", [&] {
    return check_quotient_module_property(ctx, L, quotient_basis(P.dim, p, P.max_weight), 3 * static_cast<std::int64_t>(p));
  });
  run.run("quotient_maximality", [&] {
    std::int64_t depth = 2;
    const std::size_t size2 = truncated_quotient_basis(P.dim, p, 2).size();
    if (size2 > 700) depth = 1;
    const auto basis = truncated_quotient_basis(P.dim, p, depth);
    std::mt19937_64 rng(P.seed);
    std::uniform_int_distribution<std::uint32_t> coef(0, p - 1);
    std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
    std::vector<FockVector> vs;
    for (int s = 0; s < 20; ++s) {
      FockVector v;
      for (int t = 0; t < 3; ++t) v.add_term(ctx.field(), basis[pick(rng)], Fp(coef(rng)));
      vs.push_back(std::move(v));
    }
    return check_quotient_maximality(ctx, L, vs, depth);
  });
  run.run("quotient_vacuum_like", [&] {
    VertexEvaluator<QuotientAction> Q{QuotientAction(ctx, L)};
    const auto spanning = as_vectors(quotient_basis(P.dim, p, P.max_weight));
    return check_vacuum_like<FockVector>(
        [&](std::uint64_t k, const FockVector& w) { return normal_form(ctx, L, act_D(ctx, k, w)); },
        [&](const FockVector& v, std::int64_t n, const FockVector& w) { return Q.product(v, n, w); },
        [](const FockVector& x) { return x.is_zero(); }, spanning, FockVector::vacuum(), 2 * p, 2 * static_cast<std::int64_t>(p));
  });
}

inline void suite_pth_power(VerifyReport& rep, const VerifyParams& P) {
  const FockContext ctx = make_context(P);
  const std::int64_t window = 3 * static_cast<std::int64_t>(P.p);
  SuiteRunner run(rep, "pth_power");
  run.run("adjoint", [&] {
    VertexEvaluator<FockAction> A{FockAction(ctx)};
    const auto ws = as_vectors(monomial_basis(P.dim, P.max_weight));
    return fold("adjoint", [&](auto sink) {
      for (int i = 0; i < P.dim; ++i)
        for (std::int64_t n = 1; n <= 2; ++n)
          if (!sink(check_pth_power_series(A, i, n, std::span<const FockVector>(ws), window))) return;
    });
  });
  if (!P.lambda.in_Lambda()) {
    run.skip("quotient", "lambda is not in Lambda; the quotient is not a module");
    return;
  }
  run.run("quotient", [&] {
    VertexEvaluator<QuotientAction> Q{QuotientAction(ctx, P.lambda)};
    const auto ws = as_vectors(quotient_basis(P.dim, P.p, P.max_weight));
    return fold("quotient", [&](auto sink) {
      for (int i = 0; i < P.dim; ++i)
        for (std::int64_t n = 1; n <= 2; ++n)
          if (!sink(check_pth_power_series(Q, i, n, std::span<const FockVector>(ws), window))) return;
    });
  });
}

inline constexpr std::size_t max_heisenberg_module = 125;

// Throws UsageError when the heisenberg suite cannot run with these parameters.
inline ModeSet heisenberg_modes(const VerifyParams& P) {
  if (P.level % static_cast<std::int64_t>(P.p) == 0) throw UsageError("the heisenberg suite needs a nonzero level mod p");
  ModeSet T = ModeSet::up_to(P.p, P.dim, P.mode_window);
  double size = 1;
  for (std::size_t k = 0; k < T.size(); ++k) size *= P.p;
  if (T.size() == 0) throw UsageError("mode-window leaves no variables (every depth is divisible by p)");
  if (size > static_cast<double>(max_heisenberg_module))
    throw UsageError("module dimension p^|T| exceeds " + std::to_string(max_heisenberg_module) +
                     "; lower --mode-window or --dim");
  return T;
}

// Tags are only determined on the variables of T.
inline bool same_on(const ModeSet& T, const LambdaSpec& a, const LambdaSpec& b) {
  for (const auto& [i, n] : T.pairs())
    if (a.at(i, n) != b.at(i, n)) return false;
  return a.lambda0() == b.lambda0();
}

inline void suite_heisenberg(VerifyReport& rep, const VerifyParams& P) {
  const FockContext ctx = make_context(P);
  const ModeSet T = heisenberg_modes(P);
  const PrimeField& F = ctx.field();
  SuiteRunner run(rep, "heisenberg");
  LambdaSpec L = P.lambda;
  const HeisModule W = build_irreducible(ctx, T, L, P.mode_window);
  LambdaSpec L2 = L;
  L2.set(0, 1, F.add(L.at(0, 1), F.one()));
  const HeisModule W2 = build_irreducible(ctx, T, L2, P.mode_window);
  std::mt19937_64 rng(P.seed);

  run.run("module_invariants", [&] { return check_module_invariants(W); });
  run.run("C0", [&] { return check_C0(W); });
  run.run("irreducible", [&] {
    CheckResult r{"irreducible"};
    r.cases = 2;
    const auto omega = vacuum_space(W).size();
    r.details.emplace_back("dimension", std::to_string(W.dim()));
    r.details.emplace_back("vacuum_dimension", std::to_string(omega));
    if (!is_irreducible(W, 100, P.seed)) r.fail("P[T, lambda] reported reducible", {});
    else if (omega != 1) r.fail("vacuum space is not one-dimensional", {{"lhs", std::to_string(omega)}, {"rhs", "1"}});
    return r;
  });
  run.run("direct_sum_reducible", [&] {
    CheckResult r{"direct_sum_reducible"};
    r.cases = 1;
    if (is_irreducible(direct_sum(W, W), 100, P.seed)) r.fail("a direct sum was reported irreducible", {});
    return r;
  });
  run.run("decomposition", [&] {
    CheckResult r{"decomposition"};
    const HeisModule C = conjugate(direct_sum(W, W2), random_invertible(F, 2 * W.dim(), rng));
    const Decomposition D = decompose(C, 20, P.seed);
    r.cases = 1;
    if (!D.ok() || D.summands.size() != 2) {
      r.fail("decomposition of a conjugated P + P' is not two summands with zero residual",
             {{"summands", std::to_string(D.summands.size())}, {"residual", std::to_string(D.residual)}, {"note", D.note}});
      return r;
    }
    bool seen1 = false, seen2 = false;
    for (const auto& s : D.summands) {
      ++r.cases;
      if (s.basis.size() != W.dim() || !s.irreducible) {
        r.fail("summand has the wrong dimension or is reducible", {{"dimension", std::to_string(s.basis.size())}});
        return r;
      }
      const HeisModule S = restrict_module(C, s.basis);
      const bool to1 = find_intertwiner(S, W, P.seed).has_value();
      const bool to2 = find_intertwiner(S, W2, P.seed).has_value();
      if (to1 == to2) {
        r.fail("summand is not isomorphic to exactly one of P, P'", {});
        return r;
      }
      if (to1 && !same_on(T, s.tag, L)) {
        r.fail("summand tag differs from lambda", {{"lhs", lambda_text(s.tag)}, {"rhs", lambda_text(L)}});
        return r;
      }
      if (to2 && !same_on(T, s.tag, L2)) {
        r.fail("summand tag differs from lambda'", {{"lhs", lambda_text(s.tag)}, {"rhs", lambda_text(L2)}});
        return r;
      }
      (to1 ? seen1 : seen2) = true;
    }
    if (!seen1 || !seen2) r.fail("both P and P' must appear once", {});
    return r;
  });
  run.run("integrate_round_trip", [&] {
    CheckResult r{"integrate_round_trip"};
    const PolyAlgebra A(P.p, T);
    for (int s = 0; s < 20; ++s) {
      ++r.cases;
      const PolyElement f = A.random(rng, 0.5, true);
      std::map<std::size_t, PolyElement> family;
      for (std::size_t k = 0; k < A.vars(); ++k) family[k] = A.n_partial(k, f);
      const PolyElement back = integrate_family(A, family);
      if (!(back == f)) {
        r.fail("integrating the derivatives does not recover f", {{"lhs", to_text(A.to_vector(back))}, {"rhs", to_text(A.to_vector(f))}});
        break;
      }
    }
    return r;
  });
  run.run("repair_vacuum", [&] {
    CheckResult r{"repair_vacuum"};
    std::uniform_int_distribution<std::uint32_t> coef(0, P.p - 1);
    for (int s = 0; s < 10; ++s) {
      ++r.cases;
      const HeisModule C = conjugate(direct_sum(W, W2), random_invertible(F, 2 * W.dim(), rng));
      const auto S = vacuum_summands(C);
      const auto omega = vacuum_space(C);
      FpVector coords(S.embedding.cols());
      for (auto& c : coords) c = Fp(coef(rng));
      const std::size_t block = S.algebras.front().dim();
      for (std::size_t g = 0; g < S.vacua.size(); ++g) coords[g * block] = Fp(0);
      const FpVector h0 = apply(F, S.embedding, coords);
      FpVector v = h0;
      for (const auto& w : omega) {
        const Fp c(coef(rng));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = F.add(v[i], F.mul(c, w[i]));
      }
      const FpVector h = repair_vacuum(C, v);
      for (const auto& m : C.positive_modes()) {
        if (apply(F, C.matrix(m), h) != apply(F, C.matrix(m), h0)) {
          r.fail("repaired vector differs from the planted perturbation", {{"mode", mode_name(m)}, {"lhs", to_text(h)}, {"rhs", to_text(h0)}});
          return r;
        }
      }
    }
    return r;
  });
}

}  // namespace detail

/// Runs `suite` ("axioms", "conformal", "ideal", "pth-power", "heisenberg" or "all").
/// Throws UsageError for unknown suites and unusable parameters.
inline VerifyReport run_suite(const std::string& suite, VerifyParams params, bool timing = false) {
  VerifyReport rep;
  rep.suite = suite;
  rep.timing = timing;
  rep.params = normalized(std::move(params));
  const VerifyParams& P = rep.params;
  const bool conformal_ok = P.p != 2 && P.level % static_cast<std::int64_t>(P.p) != 0;
  if (suite == "axioms") {
    detail::suite_axioms(rep, P);
  } else if (suite == "conformal") {
    if (P.p == 2) throw UsageError("the conformal suite needs p > 2");
    if (!conformal_ok) throw UsageError("the conformal suite needs a nonzero level mod p");
    detail::suite_conformal(rep, P);
  } else if (suite == "ideal") {
    detail::suite_ideal(rep, P);
  } else if (suite == "pth-power") {
    detail::suite_pth_power(rep, P);
  } else if (suite == "heisenberg") {
    detail::suite_heisenberg(rep, P);
  } else if (suite == "all") {
    detail::suite_axioms(rep, P);
    if (conformal_ok) {
      detail::suite_conformal(rep, P);
    } else {
      detail::SuiteRunner(rep, "conformal").skip("all", P.p == 2 ? "needs p > 2" : "needs a nonzero level mod p");
    }
    detail::suite_ideal(rep, P);
    detail::suite_pth_power(rep, P);
    bool heis_ok = true;
    std::string why;
    try {
      detail::heisenberg_modes(P);
    } catch (const UsageError& e) {
      heis_ok = false;
      why = e.what();
    }
    if (heis_ok)
      detail::suite_heisenberg(rep, P);
    else
      detail::SuiteRunner(rep, "heisenberg").skip("all", why);
  } else {
    throw UsageError("unknown suite '" + suite + "'");
  }
  // Order-stable by id.
  std::vector<std::size_t> order(rep.checks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rep.checks[a].id < rep.checks[b].id; });
  std::vector<CheckResult> checks;
  std::vector<double> secs;
  for (auto i : order) {
    checks.push_back(std::move(rep.checks[i]));
    secs.push_back(rep.seconds[i]);
  }
  rep.checks = std::move(checks);
  rep.seconds = std::move(secs);
  return rep;
}

}  // namespace heisvoa
