#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <numeric>
#include <utility>
#include <vector>

#include "span_lattice/errors.hpp"
#include "span_lattice/linalg.hpp"
#include "span_lattice/payoff.hpp"
#include "span_lattice/scalar.hpp"

namespace span_lattice {

// Finite sigma-algebra represented by its atoms: disjoint nonempty blocks of
// state indices covering the whole space. Canonical form: indices sorted
// within blocks, blocks ordered by smallest member.
template <class T>
class Partition {
 public:
  using SpacePtr = std::shared_ptr<const StateSpace<T>>;

  Partition(SpacePtr space, std::vector<std::vector<std::size_t>> blocks)
      : space_(std::move(space)), blocks_(std::move(blocks)) {
    if (!space_) throw DimensionError("partition requires a state space");
    const std::size_t n = space_->size();
    std::vector<char> seen(n, 0);
    std::size_t covered = 0;
    for (auto& block : blocks_) {
      if (block.empty()) throw ArgumentError("partition block may not be empty");
      std::sort(block.begin(), block.end());
      for (std::size_t i : block) {
        if (i >= n) throw DimensionError("partition block index out of range");
        if (seen[i]) throw ArgumentError("partition blocks must be disjoint");
        seen[i] = 1;
        ++covered;
      }
    }
    if (covered != n) throw ArgumentError("partition blocks must cover all states");
    std::sort(blocks_.begin(), blocks_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
  }

  static Partition discrete(const SpacePtr& space) {
    std::vector<std::vector<std::size_t>> blocks(space->size());
    for (std::size_t i = 0; i < space->size(); ++i) blocks[i] = {i};
    return Partition(space, std::move(blocks));
  }

  static Partition trivial(const SpacePtr& space) {
    std::vector<std::size_t> all(space->size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return Partition(space, {all});
  }

  const SpacePtr& space() const { return space_; }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }

  std::size_t block_of(std::size_t state) const {
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      for (std::size_t i : blocks_[b])
        if (i == state) return b;
    throw DimensionError("state index out of range");
  }

  bool operator==(const Partition& other) const { return blocks_ == other.blocks_; }
  bool operator!=(const Partition& other) const { return !(*this == other); }

 private:
  SpacePtr space_;
  std::vector<std::vector<std::size_t>> blocks_;
};

namespace detail {

// Level-set grouping of one value vector: indices whose values differ by at
// most the merge tolerance (single linkage after sorting) share a group id.
// Exact mode groups by exact equality.
template <class T>
std::vector<std::size_t> level_groups(const std::vector<T>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  T scale = T(0);
  for (const T& v : values) scale = scalar_max(scale, scalar_abs(v));
  const T tol = scalar_traits<T>::merge_tol(T(T(1) + scale));
  std::vector<std::size_t> group(n, 0);
  std::size_t current = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      T gap = values[order[k]] - values[order[k - 1]];
      if (gap > tol) ++current;
    }
    group[order[k]] = current;
  }
  return group;
}

// Distinct representative values of a vector under the merge tolerance,
// ascending. Each group is represented by its smallest member value.
template <class T>
std::vector<T> distinct_levels(const std::vector<T>& values) {
  const std::vector<std::size_t> group = level_groups(values);
  std::size_t groups = 0;
  for (std::size_t g : group) groups = std::max(groups, g + 1);
  std::vector<T> out(groups, T(0));
  std::vector<char> set(groups, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::size_t g = group[i];
    if (!set[g] || values[i] < out[g]) {
      out[g] = values[i];
      set[g] = 1;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <class T>
Partition<T> partition_from_profiles(const typename Payoff<T>::SpacePtr& space,
                                     const std::vector<std::vector<std::size_t>>& profiles) {
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < space->size(); ++i) buckets[profiles[i]].push_back(i);
  std::vector<std::vector<std::size_t>> blocks;
  blocks.reserve(buckets.size());
  for (auto& [profile, states] : buckets) blocks.push_back(states);
  return Partition<T>(space, std::move(blocks));
}

}  // namespace detail

// The sigma-algebra generated by the assets: the coarsest partition on which
// every listed payoff is constant. Two states fall in one block iff every
// asset takes the same value on both (up to the level merge tolerance).
template <class T>
Partition<T> sigma_of(const std::vector<Payoff<T>>& assets) {
  if (assets.empty()) throw ArgumentError("sigma_of requires at least one asset");
  const auto& space = assets.front().space();
  for (const auto& a : assets) detail::require_same_space(assets.front(), a);
  const std::size_t n = space->size();
  std::vector<std::vector<std::size_t>> profiles(n);
  for (const auto& a : assets) {
    const auto group = detail::level_groups(a.values());
    for (std::size_t i = 0; i < n; ++i) profiles[i].push_back(group[i]);
  }
  return detail::partition_from_profiles<T>(space, profiles);
}

// g is measurable iff it is constant on every block.
template <class T>
bool is_measurable(const Payoff<T>& g, const Partition<T>& part) {
  if (g.size() != part.space()->size())
    throw DimensionError("claim and partition live on different spaces");
  T scale = T(T(1) + g.sup_norm());
  const T tol = scalar_traits<T>::merge_tol(scale);
  for (const auto& block : part.blocks()) {
    const T& ref = g[block.front()];
    for (std::size_t i : block) {
      T d = g[i] - ref;
      if (scalar_abs(d) > tol) return false;
    }
  }
  return true;
}

// Measurability via band projections against a weak unit u: for every cut
// level λ, the projection of u onto the band of (λu - x)^+ must be a
// union-of-blocks component of u.
//
// The cut levels range over all distinct ratios x_i/u_i plus midpoints of
// consecutive distinct ratios. This finite grid is exhaustive on a finite
// state space: the support of (λu - x)^+ is {i : x_i/u_i < λ}, which is
// piecewise constant in λ with breakpoints exactly at the ratios, so every
// real λ produces a projection already produced by some grid point (λ below
// all ratios gives 0 and above all ratios gives u, both components of every
// block algebra). A dedicated test sweeps a dense λ grid against this one.
template <class T>
bool measurable_via_components(const Payoff<T>& x, const Partition<T>& part,
                               const Payoff<T>& u) {
  detail::require_same_space(x, u);
  if (x.size() != part.space()->size())
    throw DimensionError("claim and partition live on different spaces");
  if (!u.is_strictly_positive())
    throw DomainError("component-based measurability requires a weak unit");

  std::vector<T> ratios(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) ratios[i] = x[i] / u[i];
  const std::vector<T> levels = detail::distinct_levels(ratios);

  std::vector<T> lambdas = levels;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k)
    lambdas.push_back(T((levels[k] + levels[k + 1]) / T(2)));

  for (const T& lambda : lambdas) {
    Payoff<T> cut = pos_part(Payoff<T>(u.space(), [&] {
      std::vector<T> v(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) v[i] = lambda * u[i] - x[i];
      return v;
    }()));
    Payoff<T> proj = band_projection_unit(cut, u);
    // proj equals u on its support; it is a union-of-blocks component iff no
    // block is split by the support.
    for (const auto& block : part.blocks()) {
      std::size_t inside = 0;
      for (std::size_t i : block)
        if (proj[i] > scalar_traits<T>::comparison_tol()) ++inside;
      if (inside != 0 && inside != block.size()) return false;
    }
  }
  return true;
}

// Block indicators; they span exactly the measurable claims.
template <class T>
std::vector<Payoff<T>> measurable_subspace_basis(const Partition<T>& part) {
  std::vector<Payoff<T>> basis;
  basis.reserve(part.block_count());
  for (const auto& block : part.blocks())
    basis.push_back(Payoff<T>::indicator(part.space(), block));
  return basis;
}

template <class T>
struct SublatticeRepresentation {
  Payoff<T> unit;           // weak unit of the sublattice, sup-norm normalized
  Partition<T> partition;   // ratio level sets on supp(unit); the complement
                            // of the support forms one dedicated block
};

namespace detail {

// Scaled indicators u·1_B over the blocks meeting supp u.
template <class T>
std::vector<Payoff<T>> scaled_block_basis(const Payoff<T>& u, const Partition<T>& part) {
  std::vector<Payoff<T>> basis;
  for (const auto& block : part.blocks()) {
    if (!(scalar_abs(u[block.front()]) > scalar_traits<T>::comparison_tol())) continue;
    std::vector<T> v(u.size(), T(0));
    for (std::size_t i : block) v[i] = u[i];
    basis.push_back(Payoff<T>(u.space(), std::move(v)));
  }
  return basis;
}

}  // namespace detail

// Represents the span of a sublattice basis as {h·u : h constant on blocks,
// supported on supp u}. The unit is the sup-norm-normalized sum of absolute
// values of the basis elements; blocks are the level sets of the ratio
// payoffs g/u on supp u. Span equality with the scaled-indicator basis is
// exactly sublattice-ness of the input span, so it doubles as the validation:
// a failure means the basis is not closed under meets within its span.
template <class T>
SublatticeRepresentation<T> closed_sublattice_representation(
    const std::vector<Payoff<T>>& basis) {
  if (basis.empty()) throw ArgumentError("representation requires a nonempty basis");
  const auto& space = basis.front().space();
  for (const auto& g : basis) detail::require_same_space(basis.front(), g);
  const std::size_t n = space->size();

  Payoff<T> raw = Payoff<T>::zero(space);
  for (const auto& g : basis) raw = raw + abs(g);
  T norm = raw.sup_norm();
  Payoff<T> u = norm > T(0) ? raw * T(T(1) / norm) : raw;

  // Ratio profiles on supp u; off-support states share one dedicated profile.
  std::vector<std::vector<std::size_t>> profiles(n);
  std::vector<char> on_supp(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    on_supp[i] = u[i] > scalar_traits<T>::comparison_tol() ? 1 : 0;
  for (const auto& g : basis) {
    std::vector<T> ratio;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < n; ++i)
      if (on_supp[i]) {
        ratio.push_back(T(g[i] / u[i]));
        where.push_back(i);
      }
    const auto group = detail::level_groups(ratio);
    for (std::size_t k = 0; k < where.size(); ++k) profiles[where[k]].push_back(group[k] + 1);
    for (std::size_t i = 0; i < n; ++i)
      if (!on_supp[i]) profiles[i].push_back(0);
  }
  if (basis.size() == 0 || std::count(on_supp.begin(), on_supp.end(), 1) == 0) {
    // Zero sublattice: trivial partition, zero unit.
    return {u, Partition<T>::trivial(space)};
  }
  // Keep off-support states in a single block regardless of ratio bookkeeping.
  for (std::size_t i = 0; i < n; ++i)
    if (!on_supp[i]) profiles[i].assign(1, std::size_t{0});
    else profiles[i].insert(profiles[i].begin(), std::size_t{1});
  Partition<T> part = detail::partition_from_profiles<T>(space, profiles);

  // Validate: span(basis) must equal span of the scaled block indicators.
  const T tol = scalar_traits<T>::membership_tol();
  SpanBasis<T> input_span(n);
  for (const auto& g : basis) input_span.insert(g.values());
  SpanBasis<T> factored_span(n);
  for (const auto& b : detail::scaled_block_basis(u, part)) factored_span.insert(b.values());
  if (!(input_span.contains_span(factored_span, tol) &&
        factored_span.contains_span(input_span, tol)))
    throw NotASublatticeError("basis is not closed under meets within its span");

  return {u, part};
}

}  // namespace span_lattice
