#pragma once

// Dense exact linear algebra over GF(p): row reduction, kernels, span closure.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "heisvoa/field.hpp"

namespace heisvoa {

using FpVector = std::vector<Fp>;

class FpMatrix {
 public:
  FpMatrix() = default;
  FpMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static FpMatrix identity(std::size_t n) {
    FpMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Fp(1);
    return m;
  }

  /// Matrix whose columns are the given vectors (all of length `rows`).
  static FpMatrix from_columns(std::size_t rows, std::span<const FpVector> cols) {
    FpMatrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != rows) throw std::invalid_argument("column length mismatch");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Fp& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Fp operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Fp> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  FpVector column(std::size_t c) const {
    FpVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
    return v;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](Fp a) { return a.value == 0; });
  }

  friend bool operator==(const FpMatrix&, const FpMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Fp> data_;
};

inline FpMatrix multiply(const PrimeField& F, const FpMatrix& a, const FpMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product dimension mismatch");
  FpMatrix c(a.rows(), b.cols());
  const std::uint64_t p = F.p();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        acc += static_cast<std::uint64_t>(a(i, k).value) * b(k, j).value;
        if (acc >= (1ull << 62)) acc %= p;
      }
      c(i, j) = Fp(static_cast<std::uint32_t>(acc % p));
    }
  }
  return c;
}

inline FpVector apply(const PrimeField& F, const FpMatrix& a, std::span<const Fp> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector dimension mismatch");
  FpVector y(a.rows());
  const std::uint64_t p = F.p();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      acc += static_cast<std::uint64_t>(a(i, k).value) * x[k].value;
      if (acc >= (1ull << 62)) acc %= p;
    }
    y[i] = Fp(static_cast<std::uint32_t>(acc % p));
  }
  return y;
}

inline FpMatrix add(const PrimeField& F, const FpMatrix& a, const FpMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix sum dimension mismatch");
  FpMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = F.add(a(i, j), b(i, j));
  return c;
}

inline FpMatrix scale(const PrimeField& F, Fp s, const FpMatrix& a) {
  FpMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = F.mul(s, a(i, j));
  return c;
}

inline FpMatrix subtract(const PrimeField& F, const FpMatrix& a, const FpMatrix& b) {
  return add(F, a, scale(F, F.neg(F.one()), b));
}

inline FpMatrix commutator(const PrimeField& F, const FpMatrix& a, const FpMatrix& b) {
  return subtract(F, multiply(F, a, b), multiply(F, b, a));
}

inline FpMatrix matrix_power(const PrimeField& F, const FpMatrix& a, std::uint64_t e) {
  FpMatrix r = FpMatrix::identity(a.rows());
  FpMatrix base = a;
  while (e) {
    if (e & 1) r = multiply(F, r, base);
    base = multiply(F, base, base);
    e >>= 1;
  }
  return r;
}

inline bool is_zero_vector(std::span<const Fp> v) {
  return std::all_of(v.begin(), v.end(), [](Fp a) { return a.value == 0; });
}

/// Reduced row echelon form, in place. Returns the pivot columns.
inline std::vector<std::size_t> row_reduce(const PrimeField& F, FpMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t sel = r;
    while (sel < m.rows() && m(sel, c).value == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(sel, j), m(r, j));
    const Fp inv = F.inv(m(r, c));
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) = F.mul(m(r, j), inv);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c).value == 0) continue;
      const Fp f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) = F.sub(m(i, j), F.mul(f, m(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(const PrimeField& F, FpMatrix m) { return row_reduce(F, m).size(); }

/// Basis of { x : M x = 0 }.
inline std::vector<FpVector> kernel_basis(const PrimeField& F, FpMatrix m) {
  const auto pivots = row_reduce(F, m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<FpVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    FpVector v(m.cols());
    v[free] = F.one();
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = F.neg(m(r, free));
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Stack matrices with equal column counts on top of each other.
inline FpMatrix vstack(std::span<const FpMatrix> blocks) {
  if (blocks.empty()) return {};
  std::size_t rows = 0;
  const std::size_t cols = blocks.front().cols();
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw std::invalid_argument("vstack column mismatch");
    rows += b.rows();
  }
  FpMatrix out(rows, cols);
  std::size_t r0 = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < cols; ++j) out(r0 + i, j) = b(i, j);
    r0 += b.rows();
  }
  return out;
}

/// One solution of M x = b, if any.
inline std::optional<FpVector> solve(const PrimeField& F, const FpMatrix& m, std::span<const Fp> b) {
  if (b.size() != m.rows()) throw std::invalid_argument("right-hand side length mismatch");
  FpMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  const auto pivots = row_reduce(F, aug);
  if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;
  FpVector x(m.cols());
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, m.cols());
  return x;
}

inline std::optional<FpMatrix> inverse(const PrimeField& F, const FpMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
  const std::size_t n = m.rows();
  FpMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = F.one();
  }
  const auto pivots = row_reduce(F, aug);
  if (pivots.size() < n || pivots[n - 1] != n - 1) return std::nullopt;
  FpMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

/// Incrementally maintained echelon basis of a subspace of GF(p)^n.
class SubspaceBuilder {
 public:
  SubspaceBuilder(const PrimeField& F, std::size_t ambient) : F_(&F), n_(ambient) {}

  std::size_t ambient() const { return n_; }
  std::size_t dim() const { return rows_.size(); }

  /// Reduces v against the current basis; returns the residue.
  FpVector reduce(FpVector v) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const Fp c = v[pivots_[r]];
      if (c.value == 0) continue;
      for (std::size_t j = 0; j < n_; ++j) v[j] = F_->sub(v[j], F_->mul(c, rows_[r][j]));
    }
    return v;
  }

  bool contains(const FpVector& v) const { return is_zero_vector(reduce(v)); }

  /// Adds v; returns true when the dimension grew.
  bool insert(const FpVector& v) {
    if (v.size() != n_) throw std::invalid_argument("vector length mismatch in subspace");
    FpVector r = reduce(v);
    std::size_t piv = 0;
    while (piv < n_ && r[piv].value == 0) ++piv;
    if (piv == n_) return false;
    const Fp inv = F_->inv(r[piv]);
    for (auto& x : r) x = F_->mul(x, inv);
    for (auto& row : rows_) {
      const Fp c = row[piv];
      if (c.value == 0) continue;
      for (std::size_t j = 0; j < n_; ++j) row[j] = F_->sub(row[j], F_->mul(c, r[j]));
    }
    rows_.push_back(std::move(r));
    pivots_.push_back(piv);
    return true;
  }

  const std::vector<FpVector>& basis() const { return rows_; }

 private:
  const PrimeField* F_;
  std::size_t n_;
  std::vector<FpVector> rows_;
  std::vector<std::size_t> pivots_;
};

/// Smallest subspace containing `generators` and stable under every operator.
/// Iterates until the dimension stops growing, which takes at most `ambient` rounds.
inline std::vector<FpVector> span_closure(const PrimeField& F, std::size_t ambient,
                                          std::span<const FpVector> generators,
                                          std::span<const FpMatrix> operators) {
  for (const auto& op : operators)
    if (op.rows() != ambient || op.cols() != ambient)
      throw std::invalid_argument("operator dimension does not match ambient space");
  SubspaceBuilder space(F, ambient);
  std::vector<FpVector> frontier;
  for (const auto& g : generators)
    if (space.insert(g)) frontier.push_back(g);
  while (!frontier.empty()) {
    std::vector<FpVector> next;
    for (const auto& v : frontier)
      for (const auto& op : operators) {
        FpVector w = apply(F, op, v);
        if (space.insert(w)) next.push_back(std::move(w));
      }
    frontier = std::move(next);
  }
  return space.basis();
}

}  // namespace heisvoa
