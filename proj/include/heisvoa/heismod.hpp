#pragma once

// Finite-dimensional modules over a finite Heisenberg mode set T of pairs (i, n) with
// p not dividing n. The irreducible model is the truncated polynomial algebra
// P[T, lambda] = F[x_{i,n}] / (x_{i,n}^p - lambda_{i,n}^p), with
//   u_i(n) = l n g_i d/dx_{i,n},   u_i(-n) = x_{i,n},
// zero modes acting by lambda0 and the p-divisible modes u_i(-kp), u_i(kp) by
// lambda_{i,kp} and 0. Everything here is exact linear algebra over GF(p).

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "heisvoa/field.hpp"
#include "heisvoa/fock.hpp"
#include "heisvoa/linalg.hpp"
#include "heisvoa/quotient.hpp"
#include "heisvoa/report.hpp"

namespace heisvoa {

/// Finite set of variables x_{i,n}: zero-based generator i, depth n >= 1 with p not dividing n.
/// Sorted by (depth, gen); positions index the variables.
class ModeSet {
 public:
  ModeSet() = default;
  ModeSet(std::uint32_t p, int dim_h, std::vector<std::pair<int, std::int64_t>> pairs) : pairs_(std::move(pairs)) {
    for (const auto& [i, n] : pairs_) {
      if (i < 0 || i >= dim_h) throw std::invalid_argument("mode set generator out of range");
      if (n < 1 || n % p == 0) throw std::invalid_argument("mode set depths must be positive and prime to p");
    }
    std::sort(pairs_.begin(), pairs_.end(),
              [](const auto& a, const auto& b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
  }

  /// Every (i, n) with n <= max_depth, p not dividing n.
  static ModeSet up_to(std::uint32_t p, int dim_h, std::int64_t max_depth) {
    std::vector<std::pair<int, std::int64_t>> pairs;
    for (std::int64_t n = 1; n <= max_depth; ++n)
      if (n % p != 0)
        for (int i = 0; i < dim_h; ++i) pairs.emplace_back(i, n);
    return ModeSet(p, dim_h, std::move(pairs));
  }

  std::size_t size() const { return pairs_.size(); }
  const std::vector<std::pair<int, std::int64_t>>& pairs() const { return pairs_; }
  int gen(std::size_t k) const { return pairs_[k].first; }
  std::int64_t depth(std::size_t k) const { return pairs_[k].second; }

  std::optional<std::size_t> index_of(int gen, std::int64_t depth) const {
    for (std::size_t k = 0; k < pairs_.size(); ++k)
      if (pairs_[k].first == gen && pairs_[k].second == depth) return k;
    return std::nullopt;
  }

  std::int64_t max_depth() const {
    std::int64_t d = 0;
    for (const auto& pr : pairs_) d = std::max(d, pr.second);
    return d;
  }

  friend bool operator==(const ModeSet&, const ModeSet&) = default;

 private:
  std::vector<std::pair<int, std::int64_t>> pairs_;
};

/// Sparse element of P[T, lambda]: exponent vectors (one entry per variable, each < p) to
/// coefficients. Zero coefficients are never stored.
class PolyElement {
 public:
  using Exponents = std::vector<std::uint32_t>;

  void add_term(const PrimeField& F, const Exponents& e, Fp c) {
    if (c.value == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (inserted) return;
    it->second = F.add(it->second, c);
    if (it->second.value == 0) terms_.erase(it);
  }
  Fp coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Fp(0) : it->second;
  }
  const std::map<Exponents, Fp>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  friend bool operator==(const PolyElement&, const PolyElement&) = default;

 private:
  std::map<Exponents, Fp> terms_;
};

/// Arithmetic in P[T, lambda]: ordinary partial derivatives, multiplication by a variable
/// with x^p = lambda^p, and the integration operators g_{i,n}.
class PolyAlgebra {
 public:
  PolyAlgebra(std::uint32_t p, ModeSet T, std::vector<Fp> lambda_pow_p = {})
      : F_(p), T_(std::move(T)), lambda_p_(std::move(lambda_pow_p)) {
    if (lambda_p_.empty()) lambda_p_.assign(T_.size(), Fp(0));
    if (lambda_p_.size() != T_.size()) throw std::invalid_argument("one lambda^p value per variable");
    dim_ = 1;
    for (std::size_t k = 0; k < T_.size(); ++k) dim_ *= p;
  }

  const PrimeField& field() const { return F_; }
  const ModeSet& modes() const { return T_; }
  std::size_t vars() const { return T_.size(); }
  std::size_t dim() const { return dim_; }

  /// Mixed-radix position of an exponent vector (variable 0 is the least significant digit).
  std::size_t index(const PolyElement::Exponents& e) const {
    std::size_t idx = 0;
    for (std::size_t k = e.size(); k-- > 0;) idx = idx * F_.p() + e[k];
    return idx;
  }
  PolyElement::Exponents exponents(std::size_t idx) const {
    PolyElement::Exponents e(T_.size());
    for (std::size_t k = 0; k < T_.size(); ++k) {
      e[k] = static_cast<std::uint32_t>(idx % F_.p());
      idx /= F_.p();
    }
    return e;
  }

  FpVector to_vector(const PolyElement& f) const {
    FpVector v(dim_);
    for (const auto& [e, c] : f.terms()) v[index(e)] = c;
    return v;
  }
  PolyElement from_vector(std::span<const Fp> v) const {
    PolyElement f;
    for (std::size_t i = 0; i < v.size(); ++i) f.add_term(F_, exponents(i), v[i]);
    return f;
  }

  PolyElement add(const PolyElement& a, const PolyElement& b) const {
    PolyElement r = a;
    for (const auto& [e, c] : b.terms()) r.add_term(F_, e, c);
    return r;
  }
  PolyElement scale(Fp s, const PolyElement& a) const {
    PolyElement r;
    for (const auto& [e, c] : a.terms()) r.add_term(F_, e, F_.mul(s, c));
    return r;
  }
  PolyElement sub(const PolyElement& a, const PolyElement& b) const { return add(a, scale(F_.neg(F_.one()), b)); }

  /// d/dx_k.
  PolyElement partial(std::size_t k, const PolyElement& f) const {
    PolyElement r;
    for (const auto& [e, c] : f.terms()) {
      if (e[k] == 0) continue;
      auto e2 = e;
      --e2[k];
      r.add_term(F_, e2, F_.mul(c, F_(e[k])));
    }
    return r;
  }

  /// x_k * f with x_k^p = lambda_k^p.
  PolyElement times_x(std::size_t k, const PolyElement& f) const {
    PolyElement r;
    for (const auto& [e, c] : f.terms()) {
      auto e2 = e;
      if (e[k] + 1 < F_.p()) {
        ++e2[k];
        r.add_term(F_, e2, c);
      } else {
        e2[k] = 0;
        r.add_term(F_, e2, F_.mul(c, lambda_p_[k]));
      }
    }
    return r;
  }

  /// g_k(x_k^a h) = x_k^{a+1} h / (n_k (a+1)) for a < p-1, and 0 for a = p-1.
  /// On elements free of x_k^{p-1}, n_k d/dx_k g_k is the identity.
  PolyElement g(std::size_t k, const PolyElement& f) const {
    PolyElement r;
    const Fp n = F_(T_.depth(k));
    for (const auto& [e, c] : f.terms()) {
      if (e[k] + 1 >= F_.p()) continue;
      auto e2 = e;
      ++e2[k];
      r.add_term(F_, e2, F_.div(c, F_.mul(n, F_(e[k] + 1))));
    }
    return r;
  }

  /// n_k d/dx_k.
  PolyElement n_partial(std::size_t k, const PolyElement& f) const { return scale(F_(T_.depth(k)), partial(k, f)); }

  bool has_top_power(std::size_t k, const PolyElement& f) const {
    for (const auto& [e, c] : f.terms())
      if (e[k] + 1 == F_.p()) return true;
    return false;
  }

  PolyElement random(std::mt19937_64& rng, double density = 0.5, bool zero_constant = false) const {
    PolyElement f;
    std::uniform_int_distribution<std::uint32_t> coef(0, F_.p() - 1);
    std::bernoulli_distribution keep(density);
    for (std::size_t i = zero_constant ? 1 : 0; i < dim_; ++i)
      if (keep(rng)) f.add_term(F_, exponents(i), Fp(coef(rng)));
    return f;
  }

 private:
  PrimeField F_;
  ModeSet T_;
  std::vector<Fp> lambda_p_;
  std::size_t dim_ = 1;
};

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// f with n d/dx_{i,n} f = family[(i,n)] for every variable in `family`, built inductively by
///   f = f' + g_{j,m}(f_{j,m} - m d/dx_{j,m} f').
/// The constant term of the result is zero. Throws IntegrationError when a component has an
/// x^{p-1} term in its own variable or two components are incompatible.
inline PolyElement integrate_family(const PolyAlgebra& P, const std::map<std::size_t, PolyElement>& family) {
  for (const auto& [k, fk] : family)
    if (P.has_top_power(k, fk))
      throw IntegrationError("component for variable " + std::to_string(k) + " has an x^{p-1} term; not in the image of d/dx");
  for (const auto& [k, fk] : family)
    for (const auto& [j, fj] : family) {
      if (j <= k) continue;
      if (!(P.n_partial(k, fj) == P.n_partial(j, fk)))
        throw IntegrationError("incompatible components for variables " + std::to_string(k) + " and " + std::to_string(j));
    }
  PolyElement f;
  for (const auto& [k, fk] : family) f = P.add(f, P.g(k, P.sub(fk, P.n_partial(k, f))));
  return f;
}

/// A finite-dimensional module: action matrices for the modes u_i(+-n), (i,n) in T, and for
/// the central modes in the window. Modes that are not stored follow the central character:
/// u_i(0) = lambda0_i, u_i(-kp) = lambda_{i,kp}, u_i(kp) = 0.
class HeisModule {
 public:
  HeisModule(std::uint32_t p, int dim_h, std::int64_t level, std::vector<Fp> gram_diag, std::int64_t mode_window,
             std::size_t basis_size, LambdaSpec central)
      : F_(p), dim_h_(dim_h), level_(F_(level)), gram_(std::move(gram_diag)), window_(mode_window),
        dim_(basis_size), central_(std::move(central)) {
    if (dim_h < 1) throw std::invalid_argument("dim h must be >= 1");
    if (gram_.size() != static_cast<std::size_t>(dim_h)) throw std::invalid_argument("gram needs dim_h diagonal entries");
    for (auto g : gram_)
      if (g.value == 0 || g.value >= p) throw std::invalid_argument("gram diagonal entries must be nonzero residues");
    if (mode_window < 1) throw std::invalid_argument("mode window must be >= 1");
    if (central_.dim() != dim_h || central_.p() != p) throw std::invalid_argument("central character does not match p, dim h");
  }

  const PrimeField& field() const { return F_; }
  std::uint32_t p() const { return F_.p(); }
  int dim_h() const { return dim_h_; }
  Fp level() const { return level_; }
  const std::vector<Fp>& gram() const { return gram_; }
  std::int64_t mode_window() const { return window_; }
  std::size_t dim() const { return dim_; }
  const LambdaSpec& central() const { return central_; }
  const std::map<Mode, FpMatrix>& actions() const { return actions_; }

  void set_action(Mode m, FpMatrix a) {
    if (a.rows() != dim_ || a.cols() != dim_) throw std::invalid_argument("action matrix has the wrong size");
    if (m.gen < 0 || m.gen >= dim_h_) throw std::invalid_argument("action generator out of range");
    if (m.deg < -window_ || m.deg > window_) throw std::invalid_argument("action degree outside the mode window");
    actions_[m] = std::move(a);
  }

  bool is_central_mode(Mode m) const { return m.deg % static_cast<std::int64_t>(p()) == 0; }

  FpMatrix matrix(Mode m) const {
    auto it = actions_.find(m);
    if (it != actions_.end()) return it->second;
    if (!is_central_mode(m)) throw std::out_of_range("mode u" + std::to_string(m.gen + 1) + "(" + std::to_string(m.deg) + ") has no action");
    if (m.deg > 0) return FpMatrix(dim_, dim_);
    const Fp c = m.deg == 0 ? central_.lambda0()[m.gen] : central_.at(m.gen, -m.deg);
    return scale(F_, c, FpMatrix::identity(dim_));
  }

  /// Variables: stored positive modes prime to p.
  ModeSet mode_set() const {
    std::vector<std::pair<int, std::int64_t>> pairs;
    for (const auto& [m, a] : actions_)
      if (m.deg > 0 && !is_central_mode(m)) pairs.emplace_back(m.gen, m.deg);
    return ModeSet(p(), dim_h_, std::move(pairs));
  }

  /// Every mode with an action: stored ones plus the central modes of the window.
  std::vector<Mode> modes() const {
    std::vector<Mode> out;
    for (const auto& [m, a] : actions_) out.push_back(m);
    for (int i = 0; i < dim_h_; ++i)
      for (std::int64_t n = -window_; n <= window_; ++n) {
        const Mode m{i, n};
        if (is_central_mode(m) && !actions_.count(m)) out.push_back(m);
      }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<Mode> positive_modes() const {
    std::vector<Mode> out;
    for (const auto& m : modes())
      if (m.deg > 0) out.push_back(m);
    return out;
  }

  std::vector<FpMatrix> operator_matrices() const {
    std::vector<FpMatrix> out;
    for (const auto& m : modes()) out.push_back(matrix(m));
    return out;
  }

 private:
  PrimeField F_;
  int dim_h_;
  Fp level_;
  std::vector<Fp> gram_;
  std::int64_t window_;
  std::size_t dim_;
  LambdaSpec central_;
  std::map<Mode, FpMatrix> actions_;
};

inline std::string mode_name(Mode m) { return "u" + std::to_string(m.gen + 1) + "(" + std::to_string(m.deg) + ")"; }

/// Matrix identities every module must satisfy: each variable has both signs stored,
/// [u_i(n), u_j(-n)] = n delta_ij g_i l for variables, and all other pairs commute.
inline CheckResult check_module_invariants(const HeisModule& W) {
  const PrimeField& F = W.field();
  CheckResult res{"module_invariants"};
  for (const auto& [m, a] : W.actions()) {
    if (W.is_central_mode(m)) continue;
    ++res.cases;
    if (!W.actions().count(Mode{m.gen, -m.deg})) {
      res.fail("mode stored without its opposite", {{"mode", mode_name(m)}});
      return res;
    }
  }
  const auto modes = W.modes();
  for (std::size_t x = 0; x < modes.size(); ++x)
    for (std::size_t y = x + 1; y < modes.size(); ++y) {
      const Mode a = modes[x], b = modes[y];
      ++res.cases;
      const FpMatrix c = commutator(F, W.matrix(a), W.matrix(b));
      FpMatrix expect(W.dim(), W.dim());
      if (a.deg + b.deg == 0 && a.gen == b.gen && a.deg != 0) {
        // [u(n), u(-n)] = n g l
        const std::int64_t n = a.deg;
        expect = scale(F, F.mul(F(n), F.mul(W.gram()[a.gen], W.level())), FpMatrix::identity(W.dim()));
      }
      if (!(c == expect)) {
        res.fail(a.deg + b.deg == 0 && a.gen == b.gen ? "level relation violated" : "modes fail to commute",
                 {{"a", mode_name(a)}, {"b", mode_name(b)}});
        return res;
      }
    }
  return res;
}

/// The irreducible P[T, lambda], with central modes stored explicitly up to `mode_window`.
inline HeisModule build_irreducible(const FockContext& ctx, const ModeSet& T, const LambdaSpec& lambda,
                                    std::int64_t mode_window = 0) {
  const PrimeField& F = ctx.field();
  const std::uint32_t p = ctx.p();
  if (ctx.level().value == 0) throw std::invalid_argument("irreducible modules need a nonzero level");
  if (!ctx.gram_is_diagonal()) throw std::invalid_argument("irreducible modules need a diagonal gram matrix");
  if (lambda.p() != p || lambda.dim() != ctx.dim()) throw std::invalid_argument("lambda does not match the context");
  if (mode_window == 0) mode_window = std::max<std::int64_t>(T.max_depth(), p);
  if (mode_window < T.max_depth()) throw std::invalid_argument("mode window smaller than the mode set");

  std::vector<Fp> gram(ctx.dim());
  for (int i = 0; i < ctx.dim(); ++i) gram[i] = ctx.pairing(i, i);
  std::vector<Fp> lambda_p(T.size());
  for (std::size_t k = 0; k < T.size(); ++k) lambda_p[k] = F.pow(lambda.at(T.gen(k), T.depth(k)), p);
  PolyAlgebra P(p, T, lambda_p);

  HeisModule W(p, ctx.dim(), ctx.level().value, gram, mode_window, P.dim(), lambda);
  for (std::size_t k = 0; k < T.size(); ++k) {
    const int i = T.gen(k);
    const std::int64_t n = T.depth(k);
    FpMatrix up(P.dim(), P.dim()), down(P.dim(), P.dim());
    const Fp s = F.mul(F.mul(ctx.level(), F(n)), gram[i]);
    for (std::size_t col = 0; col < P.dim(); ++col) {
      PolyElement basis;
      basis.add_term(F, P.exponents(col), F.one());
      const auto d = P.to_vector(P.scale(s, P.partial(k, basis)));
      const auto x = P.to_vector(P.times_x(k, basis));
      for (std::size_t row = 0; row < P.dim(); ++row) {
        up(row, col) = d[row];
        down(row, col) = x[row];
      }
    }
    W.set_action(Mode{i, n}, std::move(up));
    W.set_action(Mode{i, -n}, std::move(down));
  }
  for (int i = 0; i < ctx.dim(); ++i)
    for (std::int64_t n = -mode_window; n <= mode_window; ++n)
      if (n % static_cast<std::int64_t>(p) == 0) W.set_action(Mode{i, n}, W.matrix(Mode{i, n}));
  return W;
}

/// Omega_W: the joint kernel of all positive modes.
inline std::vector<FpVector> vacuum_space(const HeisModule& W) {
  std::vector<FpMatrix> blocks;
  for (const auto& m : W.positive_modes()) blocks.push_back(W.matrix(m));
  if (blocks.empty()) {
    std::vector<FpVector> all;
    for (std::size_t i = 0; i < W.dim(); ++i) {
      FpVector e(W.dim());
      e[i] = W.field().one();
      all.push_back(e);
    }
    return all;
  }
  return kernel_basis(W.field(), vstack(blocks));
}

/// Columns of `basis` as a dim x k matrix.
inline FpMatrix columns(std::size_t dim, std::span<const FpVector> basis) { return FpMatrix::from_columns(dim, basis); }

/// Central elements u_i(0), u_i(-kp) (window) and u_i(-n)^p for the variables, with names.
struct CentralOperator {
  Mode mode;
  bool pth_power = false;
  FpMatrix matrix;
};

inline std::vector<CentralOperator> central_operators(const HeisModule& W) {
  const PrimeField& F = W.field();
  std::vector<CentralOperator> out;
  for (int i = 0; i < W.dim_h(); ++i) {
    out.push_back({Mode{i, 0}, false, W.matrix(Mode{i, 0})});
    for (std::int64_t n = W.p(); n <= W.mode_window(); n += W.p()) out.push_back({Mode{i, -n}, false, W.matrix(Mode{i, -n})});
  }
  const ModeSet T = W.mode_set();
  for (std::size_t k = 0; k < T.size(); ++k) {
    const Mode m{T.gen(k), -T.depth(k)};
    out.push_back({m, true, matrix_power(F, W.matrix(m), W.p())});
  }
  return out;
}

struct CentralBlock {
  std::vector<FpVector> basis;
  LambdaSpec tag;
};

/// Splits W into joint eigenspaces of the central operators. Returns nullopt when some
/// central operator is not diagonalizable over GF(p) on a block.
inline std::optional<std::vector<CentralBlock>> central_blocks(const HeisModule& W) {
  const PrimeField& F = W.field();
  const std::size_t dim = W.dim();
  std::vector<CentralBlock> blocks(1);
  blocks[0].tag = LambdaSpec(W.p(), W.dim_h(), W.level().value);
  for (std::size_t i = 0; i < dim; ++i) {
    FpVector e(dim);
    e[i] = F.one();
    blocks[0].basis.push_back(e);
  }
  if (dim == 0) return blocks;
  for (const auto& op : central_operators(W)) {
    std::vector<CentralBlock> next;
    for (const auto& block : blocks) {
      const FpMatrix B = columns(dim, block.basis);
      const std::size_t k = block.basis.size();
      std::size_t covered = 0;
      for (std::uint32_t c = 0; c < W.p(); ++c) {
        // Vectors B y in the block with (op - c) B y = 0.
        const FpMatrix shifted = subtract(F, op.matrix, scale(F, Fp(c), FpMatrix::identity(dim)));
        const auto ker = kernel_basis(F, multiply(F, shifted, B));
        if (ker.empty()) continue;
        CentralBlock part;
        part.tag = block.tag;
        for (const auto& y : ker) part.basis.push_back(apply(F, B, y));
        if (op.mode.deg == 0) {
          auto l0 = part.tag.lambda0();
          l0[op.mode.gen] = Fp(c);
          part.tag.set_lambda0(l0);
        } else {
          // lambda^p = lambda on GF(p), so u(-n)^p = c gives lambda_n = c.
          part.tag.set(op.mode.gen, -op.mode.deg, Fp(c));
        }
        covered += ker.size();
        next.push_back(std::move(part));
      }
      if (covered != k) return std::nullopt;
    }
    blocks = std::move(next);
  }
  return blocks;
}

/// Condition C0: (i) u(kp) and u(n)^p vanish for positive modes; (ii) u(-kp) and u(-n)^p
/// (and the zero modes) are simultaneously diagonalizable, i.e. scalar on each central block.
inline CheckResult check_C0(const HeisModule& W) {
  const PrimeField& F = W.field();
  CheckResult res{"condition_C0"};
  for (const auto& m : W.positive_modes()) {
    ++res.cases;
    const FpMatrix a = W.matrix(m);
    if (W.is_central_mode(m)) {
      if (!a.is_zero()) {
        res.fail("(i) p-divisible positive mode acts nontrivially", {{"mode", mode_name(m)}});
        return res;
      }
    } else if (!matrix_power(F, a, W.p()).is_zero()) {
      res.fail("(i) p-th power of a positive mode acts nontrivially", {{"mode", mode_name(m) + "^p"}});
      return res;
    }
  }
  ++res.cases;
  if (!central_blocks(W)) res.fail("(ii) central operators are not semisimple over GF(p)", {});
  return res;
}

/// Basis of the smallest submodule containing the given vectors.
inline std::vector<FpVector> submodule_span(const HeisModule& W, std::span<const FpVector> generators) {
  const auto ops = W.operator_matrices();
  return span_closure(W.field(), W.dim(), generators, ops);
}

/// Irreducibility. Cyclic test: the basis vectors and `samples` random vectors each generate W.
/// Deterministic test (when the positive modes commute and are nilpotent, so every nonzero
/// submodule meets Omega_W): W is a single central block and every nonzero vacuum vector
/// generates W, enumerated up to scalars when Omega_W is small.
inline bool is_irreducible(const HeisModule& W, std::size_t samples = 100, std::uint64_t seed = 1) {
  const PrimeField& F = W.field();
  const std::size_t dim = W.dim();
  if (dim == 0) return false;
  const auto ops = W.operator_matrices();
  auto generates = [&](const FpVector& v) {
    if (is_zero_vector(v)) return true;
    const FpVector gens[] = {v};
    return span_closure(F, dim, gens, ops).size() == dim;
  };
  for (std::size_t i = 0; i < dim; ++i) {
    FpVector e(dim);
    e[i] = F.one();
    if (!generates(e)) return false;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> coef(0, W.p() - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    FpVector v(dim);
    for (auto& x : v) x = Fp(coef(rng));
    if (!generates(v)) return false;
  }

  const auto blocks = central_blocks(W);
  if (blocks && blocks->size() > 1) return false;
  const auto positive = W.positive_modes();
  bool nilpotent_commuting = true;
  for (std::size_t a = 0; a < positive.size() && nilpotent_commuting; ++a) {
    const FpMatrix A = W.matrix(positive[a]);
    if (!matrix_power(F, A, dim).is_zero()) nilpotent_commuting = false;
    for (std::size_t b = a + 1; b < positive.size() && nilpotent_commuting; ++b)
      if (!commutator(F, A, W.matrix(positive[b])).is_zero()) nilpotent_commuting = false;
  }
  if (!nilpotent_commuting) return true;

  const auto omega = vacuum_space(W);
  if (omega.size() != 1) {
    // Enumerate the projective points of Omega_W (first nonzero coordinate 1).
    std::uint64_t points = 1;
    for (std::size_t i = 0; i < omega.size() && points < 100000; ++i) points *= W.p();
    if (points >= 100000) return generates(omega.front());
    std::vector<std::uint32_t> digits(omega.size(), 0);
    for (std::uint64_t idx = 1; idx < points; ++idx) {
      std::uint64_t t = idx;
      for (auto& d : digits) {
        d = static_cast<std::uint32_t>(t % W.p());
        t /= W.p();
      }
      const auto lead = std::find_if(digits.rbegin(), digits.rend(), [](std::uint32_t d) { return d != 0; });
      if (*lead != 1) continue;
      FpVector v(dim);
      for (std::size_t g = 0; g < omega.size(); ++g)
        for (std::size_t i = 0; i < dim; ++i) v[i] = F.add(v[i], F.mul(Fp(digits[g]), omega[g][i]));
      if (!generates(v)) return false;
    }
    return true;
  }
  return generates(omega.front());
}

/// W restricted to an invariant subspace, in the coordinates of `basis`.
inline HeisModule restrict_module(const HeisModule& W, std::span<const FpVector> basis) {
  const PrimeField& F = W.field();
  const FpMatrix B = columns(W.dim(), basis);
  HeisModule R(W.p(), W.dim_h(), W.level().value, W.gram(), W.mode_window(), basis.size(), W.central());
  for (const auto& m : W.modes()) {
    const FpMatrix A = W.matrix(m);
    FpMatrix out(basis.size(), basis.size());
    for (std::size_t c = 0; c < basis.size(); ++c) {
      const auto y = apply(F, A, basis[c]);
      const auto x = solve(F, B, y);
      if (!x) throw std::invalid_argument("subspace is not invariant under " + mode_name(m));
      for (std::size_t r = 0; r < basis.size(); ++r) out(r, c) = (*x)[r];
    }
    R.set_action(m, std::move(out));
  }
  return R;
}

inline HeisModule with_central(const HeisModule& W, const LambdaSpec& central) {
  HeisModule R(W.p(), W.dim_h(), W.level().value, W.gram(), W.mode_window(), W.dim(), central);
  for (const auto& m : W.modes()) R.set_action(m, W.matrix(m));
  return R;
}

inline HeisModule direct_sum(const HeisModule& A, const HeisModule& B) {
  if (A.p() != B.p() || A.dim_h() != B.dim_h() || A.level() != B.level() || A.gram() != B.gram())
    throw std::invalid_argument("direct sum of modules with different parameters");
  const std::size_t n = A.dim() + B.dim();
  HeisModule S(A.p(), A.dim_h(), A.level().value, A.gram(), std::max(A.mode_window(), B.mode_window()), n, A.central());
  auto modes = A.modes();
  for (const auto& m : B.modes())
    if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
  for (const auto& m : modes) {
    const FpMatrix a = A.matrix(m), b = B.matrix(m);
    FpMatrix s(n, n);
    for (std::size_t i = 0; i < A.dim(); ++i)
      for (std::size_t j = 0; j < A.dim(); ++j) s(i, j) = a(i, j);
    for (std::size_t i = 0; i < B.dim(); ++i)
      for (std::size_t j = 0; j < B.dim(); ++j) s(A.dim() + i, A.dim() + j) = b(i, j);
    S.set_action(m, std::move(s));
  }
  return S;
}

/// g W g^{-1}.
inline HeisModule conjugate(const HeisModule& W, const FpMatrix& g) {
  const PrimeField& F = W.field();
  const auto ginv = inverse(F, g);
  if (!ginv) throw std::invalid_argument("conjugating matrix is singular");
  HeisModule R(W.p(), W.dim_h(), W.level().value, W.gram(), W.mode_window(), W.dim(), W.central());
  for (const auto& m : W.modes()) R.set_action(m, multiply(F, multiply(F, g, W.matrix(m)), *ginv));
  return R;
}

inline FpMatrix random_invertible(const PrimeField& F, std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> coef(0, F.p() - 1);
  for (;;) {
    FpMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g(i, j) = Fp(coef(rng));
    if (inverse(F, g)) return g;
  }
}

/// X with X A(m) = B(m) X for every mode, invertible; nullopt when none is found among the
/// solution space (tried on its basis and on random combinations).
inline std::optional<FpMatrix> find_intertwiner(const HeisModule& A, const HeisModule& B, std::uint64_t seed = 1) {
  const PrimeField& F = A.field();
  if (A.dim() != B.dim()) return std::nullopt;
  const std::size_t n = A.dim();
  auto modes = A.modes();
  for (const auto& m : B.modes())
    if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
  // Unknown X(r, c) at position r * n + c.
  std::vector<FpMatrix> blocks;
  for (const auto& m : modes) {
    const FpMatrix a = A.matrix(m), b = B.matrix(m);
    FpMatrix eq(n * n, n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const std::size_t row = r * n + c;
        // (X a)(r,c) = sum_k X(r,k) a(k,c);  (b X)(r,c) = sum_k b(r,k) X(k,c)
        for (std::size_t k = 0; k < n; ++k) {
          eq(row, r * n + k) = F.add(eq(row, r * n + k), a(k, c));
          eq(row, k * n + c) = F.sub(eq(row, k * n + c), b(r, k));
        }
      }
    blocks.push_back(std::move(eq));
  }
  const auto sols = kernel_basis(F, vstack(blocks));
  auto as_matrix = [&](const FpVector& x) {
    FpMatrix X(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) X(r, c) = x[r * n + c];
    return X;
  };
  for (const auto& s : sols)
    if (auto X = as_matrix(s); inverse(F, X)) return X;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> coef(0, F.p() - 1);
  for (int attempt = 0; attempt < 64 && sols.size() > 1; ++attempt) {
    FpVector x(n * n);
    for (const auto& s : sols) {
      const Fp c(coef(rng));
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = F.add(x[i], F.mul(c, s[i]));
    }
    if (auto X = as_matrix(x); inverse(F, X)) return X;
  }
  return std::nullopt;
}

/// The part of W generated by its vacuum vectors, with each cyclic summand U(h) w_gamma
/// identified with P[T, lambda_gamma] through x^a -> prod u(-n)^{a} w_gamma.
struct VacuumSummands {
  ModeSet T;
  std::vector<FpVector> vacua;
  std::vector<LambdaSpec> tags;
  std::vector<PolyAlgebra> algebras;
  FpMatrix embedding;  // dim W x (#vacua * p^{|T|}), columns in summand order
};

inline VacuumSummands vacuum_summands(const HeisModule& W) {
  const PrimeField& F = W.field();
  const auto blocks = central_blocks(W);
  if (!blocks) throw std::invalid_argument("central operators are not semisimple; condition C0 fails");
  VacuumSummands out;
  out.T = W.mode_set();
  std::vector<FpMatrix> positive;
  for (const auto& m : W.positive_modes()) positive.push_back(W.matrix(m));
  std::vector<FpVector> cols;
  for (const auto& block : *blocks) {
    const FpMatrix B = columns(W.dim(), block.basis);
    std::vector<FpVector> omega;
    if (positive.empty()) {
      omega = block.basis;
    } else {
      for (const auto& y : kernel_basis(F, multiply(F, vstack(positive), B))) omega.push_back(apply(F, B, y));
    }
    std::vector<Fp> lambda_p(out.T.size());
    for (std::size_t k = 0; k < out.T.size(); ++k) lambda_p[k] = F.pow(block.tag.at(out.T.gen(k), out.T.depth(k)), W.p());
    for (const auto& w : omega) {
      PolyAlgebra P(W.p(), out.T, lambda_p);
      for (std::size_t idx = 0; idx < P.dim(); ++idx) {
        const auto e = P.exponents(idx);
        FpVector v = w;
        for (std::size_t k = 0; k < out.T.size(); ++k) {
          const FpMatrix down = W.matrix(Mode{out.T.gen(k), -out.T.depth(k)});
          for (std::uint32_t r = 0; r < e[k]; ++r) v = apply(F, down, v);
        }
        cols.push_back(std::move(v));
      }
      out.vacua.push_back(w);
      out.tags.push_back(block.tag);
      out.algebras.push_back(std::move(P));
    }
  }
  out.embedding = FpMatrix::from_columns(W.dim(), cols);
  return out;
}

struct RepairError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// h in W^0 (the span of the vacuum summands) with u_i(n) h = u_i(n) v for every variable
/// (i, n), so that v - h is a vacuum vector. Requires u_i(n) v in W^0; reports a component
/// with an x^{p-1} term as a violation of condition C0.
inline FpVector repair_vacuum(const HeisModule& W, const FpVector& v) {
  const PrimeField& F = W.field();
  if (v.size() != W.dim()) throw std::invalid_argument("vector length does not match the module");
  const auto S = vacuum_summands(W);
  const std::size_t block = S.algebras.empty() ? 0 : S.algebras.front().dim();
  if (rank(F, S.embedding) != S.embedding.cols()) throw RepairError("vacuum summands are not independent");

  // s[gamma][k]: component in summand gamma of u_{T_k}(n) v.
  std::vector<std::map<std::size_t, PolyElement>> family(S.vacua.size());
  for (std::size_t k = 0; k < S.T.size(); ++k) {
    const Mode m{S.T.gen(k), S.T.depth(k)};
    const auto y = apply(F, W.matrix(m), v);
    const auto s = solve(F, S.embedding, y);
    if (!s) throw RepairError("precondition violated: " + mode_name(m) + " v is not in W^0");
    const Fp inv = F.inv(F.mul(W.level(), W.gram()[m.gen]));
    for (std::size_t gmm = 0; gmm < S.vacua.size(); ++gmm) {
      std::span<const Fp> part(s->data() + gmm * block, block);
      family[gmm][k] = S.algebras[gmm].scale(inv, S.algebras[gmm].from_vector(part));
    }
  }
  FpVector coords(S.embedding.cols());
  for (std::size_t gmm = 0; gmm < S.vacua.size(); ++gmm) {
    PolyElement h;
    try {
      h = integrate_family(S.algebras[gmm], family[gmm]);
    } catch (const IntegrationError& e) {
      throw RepairError(std::string("condition C0 violated (u(n)^p != 0 on W): ") + e.what());
    }
    const auto hv = S.algebras[gmm].to_vector(h);
    std::copy(hv.begin(), hv.end(), coords.begin() + static_cast<std::ptrdiff_t>(gmm * block));
  }
  FpVector h = apply(F, S.embedding, coords);
  FpVector diff(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) diff[i] = F.sub(v[i], h[i]);
  for (const auto& m : W.positive_modes())
    if (!is_zero_vector(apply(F, W.matrix(m), diff))) throw RepairError("repair failed: " + mode_name(m) + " (v - h) != 0");
  return h;
}

struct Summand {
  std::vector<FpVector> basis;
  LambdaSpec tag;
  bool irreducible = false;
};

struct Decomposition {
  std::vector<Summand> summands;
  std::size_t residual = 0;  // dim W minus the dimension of the sum of summands
  bool direct = true;
  std::string note;
  bool ok() const { return residual == 0 && direct && note.empty(); }
};

/// Splits W by central character, then into the cyclic submodules generated by a basis of
/// the vacuum space of each block.
inline Decomposition decompose(const HeisModule& W, std::size_t samples = 20, std::uint64_t seed = 1) {
  const PrimeField& F = W.field();
  Decomposition out;
  if (W.level().value == 0) throw std::invalid_argument("decomposition needs a nonzero level");
  const auto c0 = check_C0(W);
  if (!c0.passed()) throw std::invalid_argument("condition C0 fails: " + c0.note);
  const auto blocks = central_blocks(W);
  std::vector<FpMatrix> positive;
  for (const auto& m : W.positive_modes()) positive.push_back(W.matrix(m));
  std::size_t expected = 1;
  for (std::size_t k = 0; k < W.mode_set().size(); ++k) expected *= W.p();

  SubspaceBuilder total(F, W.dim());
  std::size_t dim_sum = 0;
  for (const auto& block : *blocks) {
    const FpMatrix B = columns(W.dim(), block.basis);
    std::vector<FpVector> omega;
    if (positive.empty()) {
      omega = block.basis;
    } else {
      for (const auto& y : kernel_basis(F, multiply(F, vstack(positive), B))) omega.push_back(apply(F, B, y));
    }
    for (const auto& w : omega) {
      Summand s;
      const FpVector gens[] = {w};
      s.basis = submodule_span(W, gens);
      s.tag = block.tag;
      const HeisModule part = restrict_module(W, s.basis);
      s.irreducible = is_irreducible(part, samples, seed);
      if (s.basis.size() != expected && out.note.empty())
        out.note = "summand of dimension " + std::to_string(s.basis.size()) + ", expected " + std::to_string(expected);
      if (!s.irreducible && out.note.empty()) out.note = "summand is not irreducible";
      dim_sum += s.basis.size();
      for (const auto& b : s.basis) total.insert(b);
      out.summands.push_back(std::move(s));
    }
  }
  out.direct = total.dim() == dim_sum;
  out.residual = W.dim() - total.dim();
  return out;
}

}  // namespace heisvoa
