#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "span_lattice/double_array.hpp"
#include "span_lattice/errors.hpp"
#include "span_lattice/linalg.hpp"
#include "span_lattice/partition.hpp"
#include "span_lattice/payoff.hpp"
#include "span_lattice/scalar.hpp"

namespace span_lattice {

// Staged approximation record. Errors are sup-norm distances of the stages to
// the target (restricted to the certified window for truncated arrays); when
// a dominator is present every stage is entrywise dominated by it.
template <class Elem>
struct ApproxReport {
  using scalar_type = typename Elem::scalar_type;
  std::vector<Elem> stages;
  std::vector<scalar_type> errors;
  std::optional<Elem> dominator;
};

namespace detail {

template <class T>
T windowed_distance(const Payoff<T>& a, const Payoff<T>& b, std::size_t, std::size_t) {
  return (a - b).sup_norm();
}

template <class T>
T windowed_distance(const DoubleArray<T>& a, const DoubleArray<T>& b, std::size_t rows,
                    std::size_t cols) {
  T best = T(0);
  for (std::size_t m = 1; m <= std::min(rows, a.rows()); ++m)
    for (std::size_t n = 1; n <= std::min(cols, a.cols()); ++n)
      best = scalar_max(best, scalar_abs(T(a.entry(m, n) - b.entry(m, n))));
  return best;
}

template <class T>
std::pair<std::size_t, std::size_t> prefix_window(const Payoff<T>& x, std::size_t) {
  return {x.size(), 1};
}

// A prefix of length L certifies rows up to L and columns up to L + 1.
template <class T>
std::pair<std::size_t, std::size_t> prefix_window(const DoubleArray<T>& x, std::size_t len) {
  return {std::min(x.rows(), len), std::min(x.cols(), len + 1)};
}

}  // namespace detail

// The two-stage bridge from coordinatewise to dominated convergence: given a
// nonnegative sequence converging coordinatewise to x >= 0, the meets
// y_j ∧ x converge to x under the fixed dominator x, because
// |y ∧ x - x| <= |y - x| ∧ x entrywise. The inequality is asserted at every
// stage and the stage errors are reported over the certified window.
template <class Elem>
ApproxReport<Elem> uo_to_order_stage(
    const Elem& x, const std::vector<Elem>& seq,
    typename Elem::scalar_type uo_tol =
        scalar_traits<typename Elem::scalar_type>::comparison_tol()) {
  using T = typename Elem::scalar_type;
  if (seq.empty()) throw ArgumentError("bridge needs a nonempty sequence");
  if (!x.is_nonneg())
    throw DomainError("decompose into positive and negative parts first");
  for (const auto& y : seq)
    if (!y.is_nonneg())
      throw DomainError("decompose into positive and negative parts first");

  const auto [wr, wc] = detail::prefix_window(x, seq.size());
  if (detail::windowed_distance(seq.back(), x, wr, wc) > uo_tol)
    throw ArgumentError("sequence does not converge coordinatewise to the target "
                        "at this truncation");

  ApproxReport<Elem> out;
  out.dominator = x;
  for (const auto& y : seq) {
    Elem stage = meet(y, x);
    if (!dominated_by(stage, x))
      throw ContractError("stage escaped the dominator");
    Elem lhs = abs(stage - x);
    Elem rhs = meet(abs(y - x), x);
    if (!dominated_by(lhs, rhs))
      throw ContractError("domination inequality failed");
    out.errors.push_back(detail::windowed_distance(stage, x, wr, wc));
    out.stages.push_back(std::move(stage));
  }
  return out;
}

// Basis of the smallest order closed sublattice containing A and the weak
// unit u: scaled indicators u·1_B over the blocks of the sigma-algebra
// generated by the ratio payoffs a/u. On a finite state space order closure
// adds nothing to a span, so this is also the smallest sublattice containing
// A and u; the saturation oracle cross-checks that identity.
template <class T>
std::vector<Payoff<T>> smallest_order_closed_sublattice(const std::vector<Payoff<T>>& A,
                                                        const Payoff<T>& u) {
  if (!u.is_strictly_positive())
    throw DomainError("the reference element must be a weak unit");
  if (A.empty()) return {u};
  std::vector<Payoff<T>> ratios;
  ratios.reserve(A.size());
  for (const auto& a : A) {
    detail::require_same_space(a, u);
    std::vector<T> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] / u[i];
    ratios.push_back(Payoff<T>(u.space(), std::move(r)));
  }
  Partition<T> part = sigma_of(ratios);
  return detail::scaled_block_basis(u, part);
}

// Dyadic staircase approximation of a measurable claim from below: level L
// floors the claim to the grid of step range/2^L anchored at its minimum.
// Stages are linear combinations of block indicators, increase with L, and
// the stage-L error is bounded by range/2^L.
template <class T>
ApproxReport<Payoff<T>> freudenthal_approx(const Payoff<T>& g, const Partition<T>& part,
                                           int levels) {
  if (levels < 1) throw ArgumentError("needs at least one level");
  if (!is_measurable(g, part))
    throw ArgumentError("claim is not measurable: approximation within the "
                        "block-indicator span is impossible");

  // Per-block representative: the block minimum, so stages stay dominated by
  // g even when float ingestion left sub-tolerance jitter inside a block.
  std::vector<T> rep(part.block_count());
  for (std::size_t b = 0; b < part.block_count(); ++b) {
    const auto& block = part.blocks()[b];
    T lo = g[block.front()];
    for (std::size_t i : block) lo = scalar_min(lo, g[i]);
    rep[b] = lo;
  }
  T lo = rep[0], hi = rep[0];
  for (const T& r : rep) {
    lo = scalar_min(lo, r);
    hi = scalar_max(hi, r);
  }
  const T range = T(hi - lo);

  ApproxReport<Payoff<T>> out;
  out.dominator = g;
  T step = range;
  for (int level = 1; level <= levels; ++level) {
    step = T(step / T(2));
    Payoff<T> stage = Payoff<T>::zero(g.space());
    if (range <= scalar_traits<T>::comparison_tol()) {
      stage = g;
    } else {
      for (std::size_t b = 0; b < part.block_count(); ++b) {
        T q = scalar_floor(T(T(rep[b] - lo) / step));
        T val = T(lo + q * step);
        for (std::size_t i : part.blocks()[b]) stage[i] = val;
      }
    }
    out.errors.push_back((g - stage).sup_norm());
    out.stages.push_back(std::move(stage));
  }
  return out;
}

// Increasing approximation of x > 0 from within the positive cone of the
// sublattice spanned by Y_basis. On a finite state space the order closure of
// the span is the span itself, so x must already lie in it; the stages are
// the running suprema of the scaled family (1 - 1/k)·x with the supremum x
// attained at the final stage.
template <class T>
ApproxReport<Payoff<T>> monotone_approximation(const Payoff<T>& x,
                                               const std::vector<Payoff<T>>& Y_basis,
                                               int stages = 8) {
  if (stages < 1) throw ArgumentError("needs at least one stage");
  if (!x.is_nonneg() || !(x.sup_norm() > scalar_traits<T>::comparison_tol()))
    throw DomainError("target must be positive");
  if (Y_basis.empty()) throw ArgumentError("needs a nonempty basis");
  // Throws NotASublatticeError when the span is not meet-closed.
  (void)closed_sublattice_representation(Y_basis);

  SpanBasis<T> span(x.size());
  for (const auto& y : Y_basis) {
    detail::require_same_space(x, y);
    span.insert(y.values());
  }
  if (!span.contains(x.values(), scalar_traits<T>::membership_tol()))
    throw NoApproximationError(
        "target lies outside the sublattice span, hence outside its order closure");

  ApproxReport<Payoff<T>> out;
  out.dominator = x;
  for (int k = 1; k <= stages; ++k) {
    Payoff<T> stage =
        k == stages
            ? x
            : x * T(T(1) - scalar_traits<T>::from_ratio(1, static_cast<long>(k)));
    out.errors.push_back((x - stage).sup_norm());
    out.stages.push_back(std::move(stage));
  }
  return out;
}

}  // namespace span_lattice
