#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "span_lattice/errors.hpp"
#include "span_lattice/scalar.hpp"

namespace span_lattice {

// Finite probability space: states 0..n-1 carrying strictly positive weights
// that sum to one. Zero-probability states are rejected outright, so
// almost-sure statements coincide with pointwise ones.
template <class T>
class StateSpace {
 public:
  explicit StateSpace(std::vector<T> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw DomainError("state space needs at least one state");
    T sum = T(0);
    for (const T& p : probs_) {
      if (!(p > T(0))) throw DomainError("state probabilities must be strictly positive");
      sum += p;
    }
    T dev = sum - T(1);
    if (scalar_abs(dev) > T(1e-12))
      throw DomainError("state probabilities must sum to 1 (within 1e-12)");
  }

  static std::shared_ptr<const StateSpace> uniform(std::size_t n) {
    std::vector<T> probs(n, scalar_traits<T>::from_ratio(1, static_cast<long>(n)));
    return std::make_shared<const StateSpace>(std::move(probs));
  }

  static std::shared_ptr<const StateSpace> with_probs(std::vector<T> probs) {
    return std::make_shared<const StateSpace>(std::move(probs));
  }

  std::size_t size() const { return probs_.size(); }
  const std::vector<T>& probs() const { return probs_; }

 private:
  std::vector<T> probs_;
};

// Real-valued random variable over a finite state space; the lattice element.
template <class T>
class Payoff {
 public:
  using scalar_type = T;
  using SpacePtr = std::shared_ptr<const StateSpace<T>>;

  Payoff(SpacePtr space, std::vector<T> values)
      : space_(std::move(space)), values_(std::move(values)) {
    if (!space_) throw DimensionError("payoff requires a state space");
    if (values_.size() != space_->size())
      throw DimensionError("payoff length does not match the state space");
  }

  static Payoff zero(const SpacePtr& space) {
    return Payoff(space, std::vector<T>(space->size(), T(0)));
  }
  static Payoff constant(const SpacePtr& space, const T& value) {
    return Payoff(space, std::vector<T>(space->size(), value));
  }
  static Payoff ones(const SpacePtr& space) { return constant(space, T(1)); }
  static Payoff indicator(const SpacePtr& space, const std::vector<std::size_t>& states) {
    std::vector<T> v(space->size(), T(0));
    for (std::size_t i : states) {
      if (i >= space->size()) throw DimensionError("state index out of range");
      v[i] = T(1);
    }
    return Payoff(space, std::move(v));
  }

  std::size_t size() const { return values_.size(); }
  const SpacePtr& space() const { return space_; }
  const std::vector<T>& values() const { return values_; }
  std::vector<T>& values() { return values_; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  T& operator[](std::size_t i) { return values_[i]; }

  T sup_norm() const {
    T best = T(0);
    for (const T& v : values_) best = scalar_max(best, scalar_abs(v));
    return best;
  }
  T min_value() const {
    T best = values_[0];
    for (const T& v : values_) best = scalar_min(best, v);
    return best;
  }
  T max_value() const {
    T best = values_[0];
    for (const T& v : values_) best = scalar_max(best, v);
    return best;
  }

  // Entrywise x >= 0 up to the comparison tolerance.
  bool is_nonneg() const {
    for (const T& v : values_)
      if (v < -scalar_traits<T>::comparison_tol()) return false;
    return true;
  }
  // Entrywise x > 0 beyond the comparison tolerance (weak unit test).
  bool is_strictly_positive() const {
    for (const T& v : values_)
      if (!(v > scalar_traits<T>::comparison_tol())) return false;
    return true;
  }

 private:
  SpacePtr space_;
  std::vector<T> values_;
};

namespace detail {
template <class T>
void require_same_space(const Payoff<T>& a, const Payoff<T>& b) {
  if (a.space() == b.space()) return;
  if (a.space()->size() == b.space()->size() && a.space()->probs() == b.space()->probs())
    return;
  throw DimensionError("payoffs live on different state spaces");
}
}  // namespace detail

template <class T>
Payoff<T> meet(const Payoff<T>& x, const Payoff<T>& y) {
  detail::require_same_space(x, y);
  std::vector<T> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = scalar_min(x[i], y[i]);
  return Payoff<T>(x.space(), std::move(v));
}

template <class T>
Payoff<T> join(const Payoff<T>& x, const Payoff<T>& y) {
  detail::require_same_space(x, y);
  std::vector<T> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = scalar_max(x[i], y[i]);
  return Payoff<T>(x.space(), std::move(v));
}

template <class T>
Payoff<T> pos_part(const Payoff<T>& x) {
  std::vector<T> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = scalar_max(x[i], T(0));
  return Payoff<T>(x.space(), std::move(v));
}

template <class T>
Payoff<T> abs(const Payoff<T>& x) {
  std::vector<T> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = scalar_abs(x[i]);
  return Payoff<T>(x.space(), std::move(v));
}

template <class T>
Payoff<T> operator+(const Payoff<T>& x, const Payoff<T>& y) {
  detail::require_same_space(x, y);
  std::vector<T> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i] + y[i];
  return Payoff<T>(x.space(), std::move(v));
}

template <class T>
Payoff<T> operator-(const Payoff<T>& x, const Payoff<T>& y) {
  detail::require_same_space(x, y);
  std::vector<T> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i] - y[i];
  return Payoff<T>(x.space(), std::move(v));
}

template <class T>
Payoff<T> operator-(const Payoff<T>& x) {
  std::vector<T> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = -x[i];
  return Payoff<T>(x.space(), std::move(v));
}

template <class T>
Payoff<T> operator*(const Payoff<T>& x, const T& scale) {
  std::vector<T> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i] * scale;
  return Payoff<T>(x.space(), std::move(v));
}

template <class T>
Payoff<T> operator*(const T& scale, const Payoff<T>& x) {
  return x * scale;
}

// x <= y entrywise up to the comparison tolerance.
template <class T>
bool dominated_by(const Payoff<T>& x, const Payoff<T>& y) {
  detail::require_same_space(x, y);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!approx_le(x[i], y[i])) return false;
  return true;
}

template <class T>
bool approx_equal(const Payoff<T>& x, const Payoff<T>& y) {
  detail::require_same_space(x, y);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!approx_eq(x[i], y[i])) return false;
  return true;
}

enum class OptionKind { call, put };

inline const char* option_kind_name(OptionKind k) {
  return k == OptionKind::call ? "call" : "put";
}

// Call: (f - k1)^+ pointwise. Put: (k1 - f)^+ pointwise.
template <class T>
Payoff<T> option_payoff(const Payoff<T>& f, const T& strike, OptionKind kind) {
  std::vector<T> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    T d = kind == OptionKind::call ? T(f[i] - strike) : T(strike - f[i]);
    v[i] = scalar_max(d, T(0));
  }
  return Payoff<T>(f.space(), std::move(v));
}

// x is a component of u when (u - x) ∧ x = 0, i.e. every entry is 0 or u_i.
// Meaningful for u >= 0.
template <class T>
bool is_component(const Payoff<T>& x, const Payoff<T>& u) {
  detail::require_same_space(x, u);
  for (std::size_t i = 0; i < x.size(); ++i) {
    T m = scalar_min(T(u[i] - x[i]), x[i]);
    if (!approx_zero(m)) return false;
  }
  return true;
}

// Band projection of u onto the band generated by x, both >= 0: equals u on
// supp x and 0 elsewhere. Computed by support inspection; the sup_n (n x) ∧ u
// formula is available below as an independent route.
template <class T>
Payoff<T> band_projection_unit(const Payoff<T>& x, const Payoff<T>& u) {
  detail::require_same_space(x, u);
  if (!x.is_nonneg() || !u.is_nonneg())
    throw DomainError("band projection requires nonnegative inputs");
  std::vector<T> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    v[i] = x[i] > scalar_traits<T>::comparison_tol() ? u[i] : T(0);
  return Payoff<T>(x.space(), std::move(v));
}

// Same projection via sup_n (n x) ∧ u, doubling n until the meet stabilizes.
template <class T>
Payoff<T> band_projection_unit_by_sup(const Payoff<T>& x, const Payoff<T>& u) {
  detail::require_same_space(x, u);
  if (!x.is_nonneg() || !u.is_nonneg())
    throw DomainError("band projection requires nonnegative inputs");
  T n = T(1);
  Payoff<T> cur = meet(x * n, u);
  for (int iter = 0; iter < 1200; ++iter) {
    n = n * T(2);
    Payoff<T> next = meet(x * n, u);
    if (approx_equal(next, cur)) return next;
    cur = std::move(next);
  }
  throw NonConvergenceError("band projection meet did not stabilize");
}

}  // namespace span_lattice
