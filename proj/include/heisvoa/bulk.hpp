#pragma once

// Exhaustive Borcherds checks over whole basis sets. Monomials are interned to
// integer ids, every product u_k x of basis monomials is computed once by the
// vertex-operator recursion and stored as a flat array, and each identity
// instance is accumulated into a dense scratch vector, so the inner loops do
// no allocation.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "heisvoa/axioms.hpp"
#include "heisvoa/fock.hpp"
#include "heisvoa/report.hpp"
#include "heisvoa/vertex.hpp"

namespace heisvoa {

class IndexedProducts {
 public:
  struct Term {
    std::uint32_t id;
    std::uint32_t coeff;
  };
  using Sparse = std::vector<Term>;

  explicit IndexedProducts(const FockContext& ctx) : ctx_(&ctx) {}
  explicit IndexedProducts(FockContext&&) = delete;  // keeps a pointer to the context

  const PrimeField& field() const { return ctx_->field(); }

  std::uint32_t id(const FockMonomial& m) {
    auto it = ids_.find(m);
    if (it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(mons_.size());
    ids_.emplace(m, id);
    mons_.push_back(m);
    return id;
  }
  const FockMonomial& monomial(std::uint32_t id) const { return mons_[id]; }
  std::size_t size() const { return mons_.size(); }

  Sparse sparse(const FockVector& v) {
    Sparse out;
    out.reserve(v.size());
    for (const auto& [m, c] : v.terms()) out.push_back({id(m), c.value});
    return out;
  }

  FockVector dense_to_vector(std::span<const Term> terms) const {
    FockVector v;
    for (const auto& t : terms) v.add_term(field(), mons_[t.id], Fp(t.coeff));
    return v;
  }

  /// u_k x for basis monomials u = mons[uid], x = mons[xid], by the same creation /
  /// annihilation recursion as VertexEvaluator.
  const Sparse& product(std::uint32_t uid, std::int64_t k, std::uint32_t xid) {
    if (k < -2000 || k > 2000) throw std::out_of_range("mode index outside the supported range");
    const std::uint64_t key = (static_cast<std::uint64_t>(uid) << 42) ^ (static_cast<std::uint64_t>(xid) << 12) ^
                              static_cast<std::uint64_t>(k + 2048);
    auto it = table_.find(key);
    if (it != table_.end()) return store_[it->second];
    Sparse value = compute(uid, k, xid);
    store_.push_back(std::move(value));
    table_.emplace(key, static_cast<std::uint32_t>(store_.size() - 1));
    return store_.back();
  }

  /// Heisenberg mode u^{(gen)}(deg) on the basis monomial mons[xid].
  const Sparse& act(int gen, std::int64_t deg, std::uint32_t xid) {
    const std::uint64_t key = (static_cast<std::uint64_t>(gen) << 52) ^ (static_cast<std::uint64_t>(xid) << 12) ^
                              static_cast<std::uint64_t>(deg + 2048);
    auto it = modes_.find(key);
    if (it != modes_.end()) return store_[it->second];
    Sparse value = sparse(act_mode(*ctx_, Mode{gen, deg}, mons_[xid]));
    store_.push_back(std::move(value));
    modes_.emplace(key, static_cast<std::uint32_t>(store_.size() - 1));
    return store_.back();
  }

  std::int64_t weight(std::uint32_t id) const { return mons_[id].weight(); }

 private:
  static void merge(Sparse& terms, std::uint32_t p) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.id < b.id; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < terms.size();) {
      std::uint64_t c = 0;
      std::size_t j = i;
      for (; j < terms.size() && terms[j].id == terms[i].id; ++j) c += terms[j].coeff;
      if (c % p != 0) terms[out++] = {terms[i].id, static_cast<std::uint32_t>(c % p)};
      i = j;
    }
    terms.resize(out);
  }

  Sparse compute(std::uint32_t uid, std::int64_t k, std::uint32_t xid) {
    const PrimeField& F = field();
    const std::uint32_t p = F.p();
    const FockMonomial u = mons_[uid];
    const std::int64_t xw = mons_[xid].weight();
    if (u.is_vacuum()) return k == -1 ? Sparse{{xid, 1}} : Sparse{};
    if (k >= u.weight() + xw) return {};
    const Factor lead = u.factors().front();
    const std::int64_t n = lead.depth;
    const std::uint32_t rest = id(u.without(lead.gen, n));
    const std::int64_t rest_bound = mons_[rest].weight() + xw;
    Sparse out;
    for (std::int64_t j = 0; k + j < rest_bound; ++j) {
      const Fp c = F.binom(static_cast<std::uint64_t>(n + j - 1), static_cast<std::uint64_t>(j));
      if (c.value == 0) continue;
      const Sparse& inner = product(rest, k + j, xid);
      for (const auto& t : inner)
        for (const auto& s : act(lead.gen, -n - j, t.id))
          out.push_back({s.id, static_cast<std::uint32_t>(std::uint64_t{c.value} * t.coeff % p * s.coeff % p)});
    }
    const Fp sign = F.neg(F.sign(n));
    for (std::int64_t j = 0; j <= xw; ++j) {
      const Fp c = F.mul(sign, F.binom(static_cast<std::uint64_t>(n + j - 1), static_cast<std::uint64_t>(j)));
      if (c.value == 0) continue;
      const Sparse& aw = act(lead.gen, j, xid);
      for (const auto& t : aw) {
        const Sparse& inner = product(rest, k - n - j, t.id);
        for (const auto& s : inner)
          out.push_back({s.id, static_cast<std::uint32_t>(std::uint64_t{c.value} * t.coeff % p * s.coeff % p)});
      }
    }
    merge(out, p);
    return out;
  }

  const FockContext* ctx_;
  std::unordered_map<FockMonomial, std::uint32_t, FockMonomialHash> ids_;
  std::vector<FockMonomial> mons_;
  std::unordered_map<std::uint64_t, std::uint32_t> table_;
  std::unordered_map<std::uint64_t, std::uint32_t> modes_;
  std::deque<Sparse> store_;
};

namespace detail {

/// Dense accumulator with a touched list, reset in O(touched).
class Accumulator {
 public:
  explicit Accumulator(std::uint32_t p) : p_(p) {}

  void add(const IndexedProducts::Sparse& terms, std::uint64_t c) {
    if (c == 0) return;
    for (const auto& t : terms) {
      if (t.id >= acc_.size()) {
        const std::size_t n = std::max<std::size_t>(t.id + 1, acc_.size() * 2);
        acc_.resize(n, 0);
        mark_.resize(n, 0);
      }
      if (!mark_[t.id]) {
        mark_[t.id] = 1;
        touched_.push_back(t.id);
      }
      std::uint32_t& slot = acc_[t.id];
      slot = static_cast<std::uint32_t>((slot + c * t.coeff) % p_);
    }
  }

  bool is_zero() const {
    for (auto id : touched_)
      if (acc_[id] != 0) return false;
    return true;
  }

  std::vector<IndexedProducts::Term> nonzero() const {
    std::vector<IndexedProducts::Term> out;
    for (auto id : touched_)
      if (acc_[id] != 0) out.push_back({id, acc_[id]});
    return out;
  }

  void clear() {
    for (auto id : touched_) {
      acc_[id] = 0;
      mark_[id] = 0;
    }
    touched_.clear();
  }

 private:
  std::uint32_t p_;
  std::vector<std::uint32_t> acc_;
  std::vector<std::uint8_t> mark_;
  std::vector<std::uint32_t> touched_;
};

}  // namespace detail

/// Borcherds identity for every triple (u, v, w) of the given basis monomials (u, v in
/// V(l,0), w in the module described by `module_ctx`) and every (m, n) in the ranges.
/// `keep` may reject triples (e.g. to bound the combined weight).
template <class Keep>
CheckResult check_borcherds_exhaustive(const FockContext& algebra_ctx, const FockContext& module_ctx,
                                       std::span<const FockMonomial> us, std::span<const FockMonomial> vs,
                                       std::span<const FockMonomial> ws, Window m_range, Window n_range, Keep keep) {
  const PrimeField& F = algebra_ctx.field();
  const std::uint32_t p = F.p();
  IndexedProducts alg(algebra_ctx);
  IndexedProducts mod(module_ctx);
  detail::Accumulator acc(p);
  CheckResult res{"borcherds"};

  for (const auto& u : us) {
    const std::uint32_t ua = alg.id(u), um = mod.id(u);
    for (const auto& v : vs) {
      const std::uint32_t va = alg.id(v), vm = mod.id(v);
      // u_m v in V, re-indexed for the module table.
      std::vector<IndexedProducts::Sparse> umv;
      for (std::int64_t m = m_range.lo; m <= m_range.hi; ++m) umv.push_back(mod.sparse(alg.dense_to_vector(alg.product(ua, m, va))));
      for (const auto& w : ws) {
        if (!keep(u, v, w)) continue;
        const std::uint32_t wm = mod.id(w);
        const std::int64_t kv = v.weight() + w.weight();
        const std::int64_t ku = u.weight() + w.weight();
        for (std::int64_t m = m_range.lo; m <= m_range.hi; ++m) {
          const Fp sm = F.sign(m);
          for (std::int64_t n = n_range.lo; n <= n_range.hi; ++n) {
            ++res.cases;
            acc.clear();
            const std::int64_t limit = std::max(kv - n, ku);
            for (std::int64_t i = 0; i < limit; ++i) {
              const Fp c = F.mul(F.sign(i), F.binom_signed_top(m, static_cast<std::uint64_t>(i)));
              if (c.value == 0) continue;
              if (n + i < kv) {
                for (const auto& t : mod.product(vm, n + i, wm)) acc.add(mod.product(um, m - i, t.id), F.mul(c, Fp(t.coeff)).value);
              }
              if (i < ku) {
                const Fp c2 = F.neg(F.mul(c, sm));
                for (const auto& t : mod.product(um, i, wm)) acc.add(mod.product(vm, m + n - i, t.id), F.mul(c2, Fp(t.coeff)).value);
              }
            }
            const std::int64_t mu = m - m_range.lo;
            for (const auto& t : umv[static_cast<std::size_t>(mu)]) acc.add(mod.product(t.id, n, wm), p - t.coeff);
            if (!acc.is_zero()) {
              const auto diff = acc.nonzero();
              FockVector lhs;
              for (const auto& t : umv[static_cast<std::size_t>(mu)]) lhs.add_scaled(F, Fp(t.coeff), mod.dense_to_vector(mod.product(t.id, n, wm)));
              FockVector rhs = lhs;
              rhs.add_scaled(F, F.one(), mod.dense_to_vector(diff));
              res.fail("Borcherds identity mismatch",
                       {{"u", u.str()}, {"v", v.str()}, {"w", w.str()}, {"m", to_text(m)}, {"n", to_text(n)},
                        {"lhs", to_text(lhs)}, {"rhs", to_text(rhs)}});
              return res;
            }
          }
        }
      }
    }
  }
  return res;
}

}  // namespace heisvoa
