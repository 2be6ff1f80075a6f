#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "span_lattice/errors.hpp"
#include "span_lattice/scalar.hpp"

namespace span_lattice {

// Truncated element of the bounded double sequences over ℕ×ℕ: an M×N window
// of entries plus, per row, the explicit n→∞ limit of that row. All lattice
// and vector operations act entrywise on the window and on the limit column,
// so limits of generated elements stay consistent with the generating
// expression (lattice operations commute with row limits).
//
// Indices m (row) and n (column) are 1-based, matching sequence-space usage.
template <class T>
class DoubleArray {
 public:
  using scalar_type = T;

  DoubleArray(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, T(0)), limit_(rows, T(0)) {
    if (rows == 0 || cols == 0) throw DimensionError("array needs at least one row and column");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  const T& entry(std::size_t m, std::size_t n) const {
    check_index(m, n);
    return entries_[(m - 1) * cols_ + (n - 1)];
  }
  T& entry(std::size_t m, std::size_t n) {
    check_index(m, n);
    return entries_[(m - 1) * cols_ + (n - 1)];
  }

  const T& row_limit(std::size_t m) const {
    check_row(m);
    return limit_[m - 1];
  }
  T& row_limit(std::size_t m) {
    check_row(m);
    return limit_[m - 1];
  }

  const std::vector<T>& raw_entries() const { return entries_; }
  const std::vector<T>& raw_limits() const { return limit_; }

  // Max of |entry| over the window and the limit column.
  T sup_norm() const {
    T best = T(0);
    for (const T& v : entries_) best = scalar_max(best, scalar_abs(v));
    for (const T& v : limit_) best = scalar_max(best, scalar_abs(v));
    return best;
  }

  bool is_nonneg() const {
    for (const T& v : entries_)
      if (v < -scalar_traits<T>::comparison_tol()) return false;
    for (const T& v : limit_)
      if (v < -scalar_traits<T>::comparison_tol()) return false;
    return true;
  }

  bool same_shape(const DoubleArray& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  template <class F>
  static DoubleArray zip(const DoubleArray& a, const DoubleArray& b, F&& f) {
    if (!a.same_shape(b)) throw DimensionError("arrays have different shapes");
    DoubleArray out(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.entries_.size(); ++i)
      out.entries_[i] = f(a.entries_[i], b.entries_[i]);
    for (std::size_t i = 0; i < a.limit_.size(); ++i)
      out.limit_[i] = f(a.limit_[i], b.limit_[i]);
    return out;
  }

  template <class F>
  static DoubleArray map(const DoubleArray& a, F&& f) {
    DoubleArray out(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.entries_.size(); ++i) out.entries_[i] = f(a.entries_[i]);
    for (std::size_t i = 0; i < a.limit_.size(); ++i) out.limit_[i] = f(a.limit_[i]);
    return out;
  }

 private:
  void check_row(std::size_t m) const {
    if (m < 1 || m > rows_) throw DimensionError("row index out of range");
  }
  void check_index(std::size_t m, std::size_t n) const {
    check_row(m);
    if (n < 1 || n > cols_) throw DimensionError("column index out of range");
  }

  std::size_t rows_, cols_;
  std::vector<T> entries_;
  std::vector<T> limit_;
};

template <class T>
DoubleArray<T> meet(const DoubleArray<T>& a, const DoubleArray<T>& b) {
  return DoubleArray<T>::zip(a, b, [](const T& x, const T& y) { return scalar_min(x, y); });
}

template <class T>
DoubleArray<T> join(const DoubleArray<T>& a, const DoubleArray<T>& b) {
  return DoubleArray<T>::zip(a, b, [](const T& x, const T& y) { return scalar_max(x, y); });
}

template <class T>
DoubleArray<T> pos_part(const DoubleArray<T>& a) {
  return DoubleArray<T>::map(a, [](const T& x) { return scalar_max(x, T(0)); });
}

template <class T>
DoubleArray<T> abs(const DoubleArray<T>& a) {
  return DoubleArray<T>::map(a, [](const T& x) { return scalar_abs(x); });
}

template <class T>
DoubleArray<T> operator+(const DoubleArray<T>& a, const DoubleArray<T>& b) {
  return DoubleArray<T>::zip(a, b, [](const T& x, const T& y) { return T(x + y); });
}

template <class T>
DoubleArray<T> operator-(const DoubleArray<T>& a, const DoubleArray<T>& b) {
  return DoubleArray<T>::zip(a, b, [](const T& x, const T& y) { return T(x - y); });
}

template <class T>
DoubleArray<T> operator-(const DoubleArray<T>& a) {
  return DoubleArray<T>::map(a, [](const T& x) { return T(-x); });
}

template <class T>
DoubleArray<T> operator*(const DoubleArray<T>& a, const T& scale) {
  return DoubleArray<T>::map(a, [&](const T& x) { return T(x * scale); });
}

template <class T>
DoubleArray<T> operator*(const T& scale, const DoubleArray<T>& a) {
  return a * scale;
}

// a <= b entrywise (window and limit column) up to the comparison tolerance.
template <class T>
bool dominated_by(const DoubleArray<T>& a, const DoubleArray<T>& b) {
  if (!a.same_shape(b)) throw DimensionError("arrays have different shapes");
  for (std::size_t i = 0; i < a.raw_entries().size(); ++i)
    if (!approx_le(a.raw_entries()[i], b.raw_entries()[i])) return false;
  for (std::size_t i = 0; i < a.raw_limits().size(); ++i)
    if (!approx_le(a.raw_limits()[i], b.raw_limits()[i])) return false;
  return true;
}

template <class T>
bool approx_equal(const DoubleArray<T>& a, const DoubleArray<T>& b) {
  if (!a.same_shape(b)) throw DimensionError("arrays have different shapes");
  for (std::size_t i = 0; i < a.raw_entries().size(); ++i)
    if (!approx_eq(a.raw_entries()[i], b.raw_entries()[i])) return false;
  for (std::size_t i = 0; i < a.raw_limits().size(); ++i)
    if (!approx_eq(a.raw_limits()[i], b.raw_limits()[i])) return false;
  return true;
}

}  // namespace span_lattice
