#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "span_lattice/errors.hpp"
#include "span_lattice/lattice_expr.hpp"
#include "span_lattice/linalg.hpp"
#include "span_lattice/partition.hpp"
#include "span_lattice/payoff.hpp"
#include "span_lattice/scalar.hpp"

namespace span_lattice {

// Single call or put written on an underlying payoff.
template <class T>
struct Instrument {
  OptionKind kind;
  T strike;
  Payoff<T> underlying;
};

template <class T>
Payoff<T> evaluate(const Instrument<T>& inst) {
  return option_payoff(inst.underlying, inst.strike, inst.kind);
}

template <class T>
struct Position {
  Instrument<T> instrument;
  T weight;
};

// Finite weighted list of instruments; evaluates to the weighted payoff sum.
template <class T>
struct Portfolio {
  std::vector<Position<T>> positions;
};

template <class T>
Payoff<T> evaluate(const Portfolio<T>& pf, const typename Payoff<T>::SpacePtr& space) {
  Payoff<T> total = Payoff<T>::zero(space);
  for (const auto& pos : pf.positions)
    total = total + evaluate(pos.instrument) * pos.weight;
  return total;
}

namespace detail {

// Strike grid that spans the whole option space of f: every option payoff is
// piecewise linear in the strike with breakpoints exactly at the values of f,
// so the distinct values, the midpoints between consecutive ones, and one
// point beyond each end sample every linearity interval twice. The outer
// points matter: for constant f all options struck at the single value vanish,
// yet lower strikes still produce constants.
template <class T>
std::vector<T> option_strike_grid(const std::vector<T>& distinct_values) {
  std::vector<T> grid = distinct_values;
  for (std::size_t k = 0; k + 1 < distinct_values.size(); ++k)
    grid.push_back(T((distinct_values[k] + distinct_values[k + 1]) / T(2)));
  T pad = T(1);
  if (distinct_values.size() >= 2) {
    pad = T((distinct_values.back() - distinct_values.front()) / T(2));
    pad = scalar_min(pad, T(1));
  }
  grid.push_back(T(distinct_values.front() - pad));
  grid.push_back(T(distinct_values.back() + pad));
  std::sort(grid.begin(), grid.end());
  return grid;
}

}  // namespace detail

template <class T>
struct OptionBasis {
  std::vector<Instrument<T>> instruments;  // linearly independent spanning set
  std::vector<Payoff<T>> payoffs;          // aligned with instruments
  std::vector<T> strike_grid;              // full grid the set was drawn from
};

// Linearly independent spanning set of the option space of f >= 0, drawn from
// calls and puts on the strike grid above. Its span equals the sigma(f)-
// measurable claims, so the dimension is the number of distinct values of f.
template <class T>
OptionBasis<T> option_space_basis(const Payoff<T>& f) {
  if (!f.is_nonneg())
    throw DomainError("limited liability violated: the asset takes a negative value");
  OptionBasis<T> out;
  out.strike_grid = detail::option_strike_grid(detail::distinct_levels(f.values()));
  SpanBasis<T> span(f.size());
  for (const T& k : out.strike_grid) {
    for (OptionKind kind : {OptionKind::call, OptionKind::put}) {
      Instrument<T> inst{kind, k, f};
      Payoff<T> payoff = evaluate(inst);
      if (span.insert(payoff.values())) {
        out.instruments.push_back(std::move(inst));
        out.payoffs.push_back(std::move(payoff));
      }
    }
  }
  return out;
}

// Portfolio of at most four calls/puts paying exactly the indicator of the
// level set {f = target}. Interior targets use a symmetric spread with
// half-gap legs; the extreme values use a one-sided ramp.
template <class T>
Portfolio<T> butterfly(const Payoff<T>& f, const T& target_value) {
  if (!f.is_nonneg())
    throw DomainError("limited liability violated: the asset takes a negative value");
  const std::vector<T> levels = detail::distinct_levels(f.values());
  const T scale = T(T(1) + f.sup_norm());
  const T match_tol = scalar_traits<T>::merge_tol(scale);
  std::size_t idx = levels.size();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    T d = levels[k] - target_value;
    if (scalar_abs(d) <= match_tol) {
      idx = k;
      break;
    }
  }
  if (idx == levels.size())
    throw ArgumentError("target value is not attained by the asset");
  const T v = levels[idx];

  Portfolio<T> pf;
  auto call_at = [&](const T& strike, const T& weight) {
    pf.positions.push_back({Instrument<T>{OptionKind::call, strike, f}, weight});
  };
  auto put_at = [&](const T& strike, const T& weight) {
    pf.positions.push_back({Instrument<T>{OptionKind::put, strike, f}, weight});
  };

  if (levels.size() == 1) {
    // Constant asset: a put ramp of width 1 pays the constant one.
    put_at(T(v + T(1)), T(1));
    return pf;
  }
  if (idx == 0) {
    T eps = T((levels[1] - v) / T(2));
    put_at(T(v + eps), T(T(1) / eps));
    return pf;
  }
  if (idx + 1 == levels.size()) {
    T eps = T((v - levels[idx - 1]) / T(2));
    call_at(T(v - eps), T(T(1) / eps));
    return pf;
  }
  T gap_lo = T(v - levels[idx - 1]);
  T gap_hi = T(levels[idx + 1] - v);
  T eps = T(scalar_min(gap_lo, gap_hi) / T(2));
  T w = T(T(1) / eps);
  call_at(T(v - eps), w);
  call_at(v, T(T(-2) * w));
  call_at(T(v + eps), w);
  return pf;
}

template <class T>
struct ReplicationReport {
  bool replicated = false;
  Portfolio<T> portfolio;  // exact replication, or best least-squares proxy
  Payoff<T> achieved;
  T residual_norm{};
  std::vector<std::size_t> violating_block;  // empty when replicated
};

namespace detail {

template <class T>
std::vector<std::size_t> worst_block(const Payoff<T>& g, const Partition<T>& part) {
  std::vector<std::size_t> worst;
  T spread = T(-1);
  for (const auto& block : part.blocks()) {
    T lo = g[block.front()], hi = g[block.front()];
    for (std::size_t i : block) {
      lo = scalar_min(lo, g[i]);
      hi = scalar_max(hi, g[i]);
    }
    T s = hi - lo;
    if (s > spread) {
      spread = s;
      worst = block;
    }
  }
  return worst;
}

}  // namespace detail

// Exact replication with diagnostics. When the claim is not measurable with
// respect to sigma(f) the portfolio holds the best least-squares proxy
// instead and `replicated` is false.
template <class T>
ReplicationReport<T> replicate_or_best(const Payoff<T>& g, const Payoff<T>& f) {
  detail::require_same_space(g, f);
  if (!f.is_nonneg())
    throw DomainError("limited liability violated: the asset takes a negative value");
  const Partition<T> part = sigma_of<T>({f});

  if (is_measurable(g, part)) {
    Portfolio<T> pf;
    for (const auto& block : part.blocks()) {
      const T claim_value = g[block.front()];
      if (scalar_abs(claim_value) <= scalar_traits<T>::comparison_tol()) continue;
      Portfolio<T> leg = butterfly(f, f[block.front()]);
      for (auto& pos : leg.positions) {
        pos.weight = pos.weight * claim_value;
        pf.positions.push_back(std::move(pos));
      }
    }
    Payoff<T> achieved = evaluate(pf, f.space());
    T residual = (achieved - g).sup_norm();
    return ReplicationReport<T>{true, std::move(pf), std::move(achieved), residual, {}};
  }

  // Not replicable: project onto the option space for diagnostics.
  OptionBasis<T> basis = option_space_basis(f);
  std::vector<std::vector<T>> rows;
  rows.reserve(basis.payoffs.size());
  for (const auto& p : basis.payoffs) rows.push_back(p.values());
  LeastSquares<T> ls = least_squares_project(rows, g.values());
  Portfolio<T> pf;
  for (std::size_t i = 0; i < basis.instruments.size(); ++i) {
    if (ls.coefficients[i] == T(0)) continue;
    pf.positions.push_back({basis.instruments[i], ls.coefficients[i]});
  }
  Payoff<T> achieved = evaluate(pf, f.space());
  return ReplicationReport<T>{false, std::move(pf), std::move(achieved),
                              ls.residual_sup_norm, detail::worst_block(g, part)};
}

// Exact replicating portfolio of a sigma(f)-measurable claim as a sum of
// butterflies, one per attained value. Throws SpanningFailure with the best
// least-squares residual and a violating block otherwise.
template <class T>
Portfolio<T> replicate(const Payoff<T>& g, const Payoff<T>& f) {
  ReplicationReport<T> report = replicate_or_best(g, f);
  if (!report.replicated)
    throw SpanningFailure("claim is not measurable with respect to sigma(asset)",
                          scalar_traits<T>::to_double(report.residual_norm),
                          report.violating_block);
  return std::move(report.portfolio);
}

template <class T>
struct MembershipCoefficient {
  T strike;         // the k of (x - k y)^+ or (k y - x)^+
  OptionKind kind;  // call: (x - k y)^+, put: (k y - x)^+
  T weight;
};

template <class T>
struct MembershipResult {
  bool member = false;
  T residual_norm{};
  std::vector<MembershipCoefficient<T>> coefficients;
};

// Membership of z in the sublattice generated by x, y >= 0, decided against
// the finite spanning set {(x - k y)^+, (k y - x)^+} with k on the ratio grid
// x_i/y_i (over supp y) plus midpoints and one point beyond each end. The
// same piecewise-linearity argument as for option strikes makes the grid
// span everything any real k could contribute; equality with the iterative
// closure is covered by the oracle tests.
template <class T>
MembershipResult<T> sublattice_membership(const Payoff<T>& z, const Payoff<T>& x,
                                          const Payoff<T>& y) {
  detail::require_same_space(z, x);
  detail::require_same_space(z, y);
  if (!x.is_nonneg() || !y.is_nonneg())
    throw DomainError("two-asset sublattice requires nonnegative generators");

  std::vector<T> ratios;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] > scalar_traits<T>::comparison_tol()) ratios.push_back(T(x[i] / y[i]));

  std::vector<T> grid;
  if (ratios.empty()) {
    grid.push_back(T(1));
  } else {
    grid = detail::option_strike_grid(detail::distinct_levels(ratios));
  }

  SpanBasis<T> span(z.size());
  std::vector<std::pair<T, OptionKind>> labels;
  for (const T& k : grid) {
    Payoff<T> ky = y * k;
    span.insert(pos_part(x - ky).values());
    labels.push_back({k, OptionKind::call});
    span.insert(pos_part(ky - x).values());
    labels.push_back({k, OptionKind::put});
  }

  auto red = span.reduce(z.values(), scalar_traits<T>::membership_tol());
  MembershipResult<T> out;
  out.member = red.in_span;
  out.residual_norm = red.residual_norm;
  if (red.in_span) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (red.coefficients[i] == T(0)) continue;
      out.coefficients.push_back({labels[i].first, labels[i].second, red.coefficients[i]});
    }
  }
  return out;
}

namespace detail {

// Intersection closure of a family of index sets (bitmask form).
inline std::vector<std::vector<char>> intersection_closure(
    std::vector<std::vector<char>> family) {
  std::set<std::vector<char>> seen(family.begin(), family.end());
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      std::vector<char> inter(family[i].size());
      for (std::size_t k = 0; k < inter.size(); ++k)
        inter[k] = family[i][k] && family[j][k];
      if (seen.insert(inter).second) family.push_back(std::move(inter));
    }
  }
  return family;
}

}  // namespace detail

// Basis of the smallest sublattice containing the generators, computed by
// iterative saturation rather than any closed formula: the span is repeatedly
// enriched with absolute values, positive parts and pairwise meets of the
// accumulated elements until a full sweep adds nothing. A stalled sweep is
// then certified (or unblocked) by slicing each basis row against the
// accumulated weak unit with band projections at ratio midpoints and closing
// the slice supports under intersection; when every slice lies in the span
// the span contains all scaled level-set indicators and hence is meet-closed,
// so the iteration has genuinely converged.
template <class T>
std::vector<Payoff<T>> lattice_closure_oracle(const std::vector<Payoff<T>>& generators,
                                              std::size_t cap = 0) {
  if (generators.empty()) throw ArgumentError("oracle requires at least one generator");
  const auto& space = generators.front().space();
  for (const auto& g : generators) detail::require_same_space(generators.front(), g);
  const std::size_t n = space->size();
  if (cap == 0) cap = n + 2;
  const T tol = scalar_traits<T>::membership_tol();

  SpanBasis<T> span(n);
  std::vector<Payoff<T>> pool;
  std::size_t growth_rounds = 0;

  auto offer = [&](const Payoff<T>& candidate) {
    if (!span.contains(candidate.values(), tol)) {
      span.insert(candidate.values());
      pool.push_back(candidate);
      return true;
    }
    return false;
  };

  for (const auto& g : generators) {
    span.insert(g.values());
    pool.push_back(g);
  }

  bool done = false;
  while (!done) {
    bool grew = false;
    // Sweep: absolute values, positive parts, then meets over the pool.
    for (std::size_t i = 0; i < pool.size(); ++i) {
      grew |= offer(abs(pool[i]));
      grew |= offer(pos_part(pool[i]));
      for (std::size_t j = 0; j < i; ++j) grew |= offer(meet(pool[i], pool[j]));
    }
    if (!grew) {
      // Stalled: slice the basis rows against the accumulated unit.
      Payoff<T> unit = Payoff<T>::zero(space);
      for (const auto& p : pool) unit = unit + abs(p);
      grew |= offer(unit);
      if (!grew) {
        std::vector<std::vector<char>> supports;
        std::vector<char> full(n, 0);
        for (std::size_t i = 0; i < n; ++i)
          full[i] = unit[i] > scalar_traits<T>::comparison_tol() ? 1 : 0;
        supports.push_back(full);
        const auto rows = span.rows();
        for (const auto& row : rows) {
          std::vector<T> ratios;
          for (std::size_t i = 0; i < n; ++i)
            if (full[i]) ratios.push_back(T(row[i] / unit[i]));
          if (ratios.empty()) continue;
          const std::vector<T> levels = detail::distinct_levels(ratios);
          for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
            const T lambda = T((levels[k] + levels[k + 1]) / T(2));
            // (lambda·unit - row)^+ then project: u on {row/unit < lambda}.
            std::vector<T> cut(n, T(0));
            for (std::size_t i = 0; i < n; ++i)
              if (full[i]) cut[i] = scalar_max(T(lambda * unit[i] - row[i]), T(0));
            Payoff<T> slice =
                band_projection_unit_by_sup(Payoff<T>(space, cut), unit);
            std::vector<char> supp(n, 0);
            for (std::size_t i = 0; i < n; ++i)
              supp[i] = slice[i] > scalar_traits<T>::comparison_tol() ? 1 : 0;
            supports.push_back(supp);
          }
        }
        for (const auto& supp : detail::intersection_closure(std::move(supports))) {
          std::vector<T> masked(n, T(0));
          for (std::size_t i = 0; i < n; ++i)
            if (supp[i]) masked[i] = unit[i];
          grew |= offer(Payoff<T>(space, std::move(masked)));
        }
      }
      if (!grew) done = true;
    }
    if (grew && ++growth_rounds > cap)
      throw NonConvergenceError("sublattice closure did not stabilize within the cap");
  }

  std::vector<Payoff<T>> basis;
  basis.reserve(span.dim());
  for (const auto& row : span.rows()) basis.push_back(Payoff<T>(space, row));
  return basis;
}

}  // namespace span_lattice
