#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "span_lattice/errors.hpp"
#include "span_lattice/scalar.hpp"

namespace span_lattice {

// Incremental basis of a linear span in reduced row-echelon form, with
// bookkeeping that expresses every basis row as a combination of the inserted
// generators. Every insert() registers a generator column, whether or not the
// dimension grows, so reduce() yields coefficients aligned with the insertion
// order. Rational mode is exact; double mode uses max-abs pivoting and a
// relative zero threshold.
template <class T>
class SpanBasis {
 public:
  explicit SpanBasis(std::size_t ambient_dim) : ambient_(ambient_dim) {}

  std::size_t ambient_dim() const { return ambient_; }
  std::size_t dim() const { return rows_.size(); }
  std::size_t generator_count() const { return generators_; }
  const std::vector<std::vector<T>>& rows() const { return rows_; }

  // Inserts a generator; returns true when the span dimension grew.
  bool insert(const std::vector<T>& v) {
    if (v.size() != ambient_) throw DimensionError("generator has wrong length");
    const std::size_t gen_index = generators_++;
    for (auto& c : combos_) c.push_back(T(0));

    std::vector<T> residual = v;
    std::vector<T> combo(generators_, T(0));
    combo[gen_index] = T(1);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      T c = residual[pivots_[i]];
      if (c == T(0)) continue;
      axpy(residual, rows_[i], c);
      axpy(combo, combos_[i], c);
    }

    std::size_t pivot = 0;
    T best = T(0);
    for (std::size_t i = 0; i < ambient_; ++i) {
      T a = scalar_abs(residual[i]);
      if (a > best) {
        best = a;
        pivot = i;
      }
    }
    if (best <= zero_tol(scale_of(v))) return false;

    const T p = residual[pivot];
    for (auto& e : residual) e = e / p;
    for (auto& e : combo) e = e / p;
    // Clear the new pivot column from the existing rows.
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      T c = rows_[i][pivot];
      if (c == T(0)) continue;
      axpy(rows_[i], residual, c);
      axpy(combos_[i], combo, c);
    }
    rows_.push_back(std::move(residual));
    combos_.push_back(std::move(combo));
    pivots_.push_back(pivot);
    return true;
  }

  struct Reduction {
    bool in_span = false;
    T residual_norm{};
    std::vector<T> residual;      // v minus its echelon reduction
    std::vector<T> coefficients;  // one per inserted generator; valid when in_span
  };

  // Reduces v against the basis. Membership holds when the residual sup-norm
  // is at most tol * (1 + |v|_inf). Rational mode with tol = 0 is exact.
  Reduction reduce(const std::vector<T>& v, const T& tol) const {
    if (v.size() != ambient_) throw DimensionError("vector has wrong length");
    Reduction out;
    out.residual = v;
    std::vector<T> row_coeffs(rows_.size(), T(0));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      T c = out.residual[pivots_[i]];
      row_coeffs[i] = c;
      if (c == T(0)) continue;
      axpy(out.residual, rows_[i], c);
    }
    out.residual_norm = T(0);
    for (const T& e : out.residual)
      out.residual_norm = scalar_max(out.residual_norm, scalar_abs(e));
    out.in_span = out.residual_norm <= tol * (T(1) + scale_of(v));
    out.coefficients.assign(generators_, T(0));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (row_coeffs[i] == T(0)) continue;
      for (std::size_t j = 0; j < generators_; ++j)
        out.coefficients[j] += row_coeffs[i] * combos_[i][j];
    }
    return out;
  }

  bool contains(const std::vector<T>& v, const T& tol) const {
    return reduce(v, tol).in_span;
  }

  // True when the other span is contained in this one at the given tolerance.
  bool contains_span(const SpanBasis& other, const T& tol) const {
    for (const auto& row : other.rows_)
      if (!contains(row, tol)) return false;
    return true;
  }

 private:
  static T scale_of(const std::vector<T>& v) {
    T s = T(0);
    for (const T& e : v) s = scalar_max(s, scalar_abs(e));
    return s;
  }

  static T zero_tol(const T& scale) {
    if (scalar_traits<T>::exact) return T(0);
    return scalar_traits<T>::comparison_tol() * (T(1) + scale);
  }

  // target -= c * source
  static void axpy(std::vector<T>& target, const std::vector<T>& source, const T& c) {
    for (std::size_t i = 0; i < target.size(); ++i) target[i] -= c * source[i];
  }

  std::size_t ambient_;
  std::size_t generators_ = 0;
  std::vector<std::vector<T>> rows_;
  std::vector<std::size_t> pivots_;
  std::vector<std::vector<T>> combos_;
};

template <class T>
struct LeastSquares {
  std::vector<T> coefficients;
  std::vector<T> residual;
  T residual_sup_norm{};
};

// Least-squares projection of v onto the row span (standard inner product),
// via Gram-Schmidt. Exact in rational mode.
template <class T>
LeastSquares<T> least_squares_project(const std::vector<std::vector<T>>& rows,
                                      const std::vector<T>& v) {
  const std::size_t n = v.size();
  const T tol2 = [] {
    if (scalar_traits<T>::exact) return T(0);
    T t = scalar_traits<T>::comparison_tol();
    return T(t * t);
  }();
  std::vector<std::vector<T>> ortho;  // orthogonal (not normalized) basis
  std::vector<std::vector<T>> expr;   // ortho[i] expressed over the input rows
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<T> w = rows[r];
    std::vector<T> e(rows.size(), T(0));
    e[r] = T(1);
    for (std::size_t i = 0; i < ortho.size(); ++i) {
      T num = T(0), den = T(0);
      for (std::size_t k = 0; k < n; ++k) {
        num += w[k] * ortho[i][k];
        den += ortho[i][k] * ortho[i][k];
      }
      T c = num / den;
      for (std::size_t k = 0; k < n; ++k) w[k] -= c * ortho[i][k];
      for (std::size_t k = 0; k < rows.size(); ++k) e[k] -= c * expr[i][k];
    }
    T norm2 = T(0);
    for (const T& x : w) norm2 += x * x;
    if (norm2 > tol2) {
      ortho.push_back(std::move(w));
      expr.push_back(std::move(e));
    }
  }
  LeastSquares<T> out;
  out.coefficients.assign(rows.size(), T(0));
  out.residual = v;
  for (std::size_t i = 0; i < ortho.size(); ++i) {
    T num = T(0), den = T(0);
    for (std::size_t k = 0; k < n; ++k) {
      num += out.residual[k] * ortho[i][k];
      den += ortho[i][k] * ortho[i][k];
    }
    T c = num / den;
    for (std::size_t k = 0; k < n; ++k) out.residual[k] -= c * ortho[i][k];
    for (std::size_t k = 0; k < rows.size(); ++k) out.coefficients[k] += c * expr[i][k];
  }
  out.residual_sup_norm = T(0);
  for (const T& e : out.residual)
    out.residual_sup_norm = scalar_max(out.residual_sup_norm, scalar_abs(e));
  return out;
}

}  // namespace span_lattice
