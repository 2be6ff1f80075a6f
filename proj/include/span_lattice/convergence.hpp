#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "span_lattice/double_array.hpp"
#include "span_lattice/errors.hpp"
#include "span_lattice/lattice_expr.hpp"
#include "span_lattice/scalar.hpp"

namespace span_lattice {

// Strictly increasing level sequences c_{mn} ↗ c_m with the interleaving
// 0 < c_{m,n} < c_{m,n+1} < c_m < c_{m+1,1} < 1. Rows m = 1..M+1 are stored
// so that row M still has a nonempty upper strike interval (c_M, c_{M+1,1}).
template <class T>
struct CounterexampleParams {
  std::vector<T> c;                   // c[m-1] = c_m, m = 1..M+1
  std::vector<std::vector<T>> grid;   // grid[m-1][n-1] = c_{mn}, m = 1..M+1, n = 1..N

  std::size_t level_rows() const { return c.size(); }
  std::size_t cols() const { return grid.empty() ? 0 : grid.front().size(); }

  const T& c_of(std::size_t m) const { return c.at(m - 1); }
  const T& c_grid(std::size_t m, std::size_t n) const { return grid.at(m - 1).at(n - 1); }

  // Dyadic defaults: c_m = 1 - 2^-(m+1), c_{mn} = c_m - 2^-(m+1+n). All
  // required strict inequalities then hold with gaps that stay exactly
  // representable in rational mode.
  static CounterexampleParams dyadic(std::size_t target_rows, std::size_t cols) {
    CounterexampleParams p;
    p.c.reserve(target_rows + 1);
    p.grid.reserve(target_rows + 1);
    T half = scalar_traits<T>::from_ratio(1, 2);
    T pow_m = half;  // 2^-(m+1) running value, starts at m = 1 -> 2^-2
    pow_m = pow_m * half;
    for (std::size_t m = 1; m <= target_rows + 1; ++m) {
      T cm = T(T(1) - pow_m);
      p.c.push_back(cm);
      std::vector<T> row;
      row.reserve(cols);
      T pow_n = pow_m;  // 2^-(m+1+n) starts at n = 1
      for (std::size_t n = 1; n <= cols; ++n) {
        pow_n = pow_n * half;
        row.push_back(T(cm - pow_n));
      }
      p.grid.push_back(std::move(row));
      pow_m = pow_m * half;
    }
    p.validate();
    return p;
  }

  void validate() const {
    if (c.empty() || grid.size() != c.size())
      throw InvalidParametersError("level sequence and grid sizes disagree");
    const std::size_t n_cols = cols();
    if (n_cols == 0) throw InvalidParametersError("grid needs at least one column");
    for (std::size_t m = 1; m <= level_rows(); ++m) {
      if (grid[m - 1].size() != n_cols)
        throw InvalidParametersError("grid rows have unequal lengths");
      if (!(c_grid(m, 1) > T(0)))
        throw InvalidParametersError("grid levels must be strictly positive");
      for (std::size_t n = 1; n + 1 <= n_cols; ++n)
        if (!(c_grid(m, n) < c_grid(m, n + 1)))
          throw InvalidParametersError("grid rows must be strictly increasing");
      if (!(c_grid(m, n_cols) < c_of(m)))
        throw InvalidParametersError("grid levels must stay below their row level");
      if (m + 1 <= level_rows() && !(c_of(m) < c_grid(m + 1, 1)))
        throw InvalidParametersError("row level must stay below the next row's grid");
    }
    if (!(c_of(level_rows()) < T(1)))
      throw InvalidParametersError("levels must stay below one");
  }
};

// The truncated two-generator stage: u with rows (1/m, 1, 1, ...), v with
// rows (c_m/m, c_{m1}, c_{m2}, ...), and the coordinatewise target e whose
// rows are (1, 0, 0, ...). Row limits are 1, c_m and 0 respectively.
template <class T>
struct Counterexample {
  std::size_t target_rows;  // M
  std::size_t cols;         // N
  DoubleArray<T> u, v, e;
  CounterexampleParams<T> params;
};

template <class T>
Counterexample<T> build_counterexample(std::size_t target_rows, std::size_t cols,
                                       CounterexampleParams<T> params) {
  if (target_rows < 2 || cols < 2)
    throw ArgumentError("counterexample needs at least two rows and columns");
  params.validate();
  if (params.level_rows() < target_rows + 1 || params.cols() + 1 < cols)
    throw InvalidParametersError("parameters do not cover the requested truncation");

  DoubleArray<T> u(target_rows, cols);
  DoubleArray<T> v(target_rows, cols);
  DoubleArray<T> e(target_rows, cols);
  for (std::size_t m = 1; m <= target_rows; ++m) {
    const T inv_m = scalar_traits<T>::from_ratio(1, static_cast<long>(m));
    u.entry(m, 1) = inv_m;
    u.row_limit(m) = T(1);
    v.entry(m, 1) = T(params.c_of(m) * inv_m);
    v.row_limit(m) = params.c_of(m);
    e.entry(m, 1) = T(1);
    e.row_limit(m) = T(0);
    for (std::size_t n = 2; n <= cols; ++n) {
      u.entry(m, n) = T(1);
      v.entry(m, n) = params.c_grid(m, n - 1);
    }
  }
  return Counterexample<T>{target_rows, cols, std::move(u), std::move(v), std::move(e),
                           std::move(params)};
}

template <class T>
Counterexample<T> build_counterexample(std::size_t target_rows, std::size_t cols) {
  return build_counterexample(target_rows, cols,
                              CounterexampleParams<T>::dyadic(target_rows, cols));
}

// Strike quadruple for the spread difference below; the admissible windows
// are alpha strikes in (c_{kj}, c_{k,j+1}) and beta strikes in (c_k, c_{k+1,1}).
template <class T>
struct XkjStrikes {
  T alpha_lo, alpha_hi, beta_lo, beta_hi;
};

template <class T>
XkjStrikes<T> default_xkj_strikes(std::size_t k, std::size_t j,
                                  const CounterexampleParams<T>& params) {
  const T& a = params.c_grid(k, j);
  const T& b = params.c_grid(k, j + 1);
  const T& p = params.c_of(k);
  const T& q = params.c_grid(k + 1, 1);
  const T third = scalar_traits<T>::from_ratio(1, 3);
  return XkjStrikes<T>{T(a + (b - a) * third), T(a + (b - a) * third * T(2)),
                       T(p + (q - p) * third), T(p + (q - p) * third * T(2))};
}

// The spread difference
//   [(v - β u)^+ - (v - β' u)^+]/(β - β') - [(v - α u)^+ - (v - α' u)^+]/(α - α')
// whose k-th row starts with 1/k and vanishes on columns 2..j+1, with all
// other rows zero.
template <class T>
DoubleArray<T> xkj(std::size_t k, std::size_t j, const Counterexample<T>& cex,
                   const XkjStrikes<T>& s) {
  if (k < 1 || k > cex.target_rows) throw ArgumentError("row index k out of range");
  if (j < 1 || j + 1 > cex.cols) throw ArgumentError("column index j out of range");
  if (!(cex.params.c_grid(k, j) < s.alpha_lo && s.alpha_lo < s.alpha_hi &&
        s.alpha_hi < cex.params.c_grid(k, j + 1)))
    throw ArgumentError("alpha strikes must lie strictly inside (c_kj, c_k,j+1)");
  if (!(cex.params.c_of(k) < s.beta_lo && s.beta_lo < s.beta_hi &&
        s.beta_hi < cex.params.c_grid(k + 1, 1)))
    throw ArgumentError("beta strikes must lie strictly inside (c_k, c_k+1,1)");

  const DoubleArray<T>& u = cex.u;
  const DoubleArray<T>& v = cex.v;
  DoubleArray<T> beta_leg = pos_part(v - u * s.beta_lo) - pos_part(v - u * s.beta_hi);
  DoubleArray<T> alpha_leg = pos_part(v - u * s.alpha_lo) - pos_part(v - u * s.alpha_hi);
  T beta_scale = T(T(1) / T(s.beta_lo - s.beta_hi));
  T alpha_scale = T(T(1) / T(s.alpha_lo - s.alpha_hi));
  return beta_leg * beta_scale - alpha_leg * alpha_scale;
}

template <class T>
DoubleArray<T> xkj(std::size_t k, std::size_t j, const Counterexample<T>& cex) {
  return xkj(k, j, cex, default_xkj_strikes(k, j, cex.params));
}

// y^j = sum_{k=1}^j k x^{kj}: first column one on rows <= j, zero on columns
// 2..j+1 there, rows beyond j zero. Entries on columns past j+1 are bounded
// but not pinned; callers must not assume they vanish.
template <class T>
DoubleArray<T> yj(std::size_t j, const Counterexample<T>& cex) {
  if (j < 1 || j + 1 > cex.cols || j > cex.target_rows)
    throw ArgumentError("truncation too small for the requested y^j");
  DoubleArray<T> sum(cex.target_rows, cex.cols);
  for (std::size_t k = 1; k <= j; ++k)
    sum = sum + xkj(k, j, cex) * scalar_traits<T>::from_int(static_cast<long>(k));
  return sum;
}

enum class ConvergenceMode { uo, order };

template <class T>
struct ConvergenceOptions {
  // Certification window; 0 means derive from the prefix length: rows up to
  // min(M, L) and columns up to min(N, L + 1). A truncated prefix cannot
  // speak to coordinates beyond the window (row m needs at least m terms).
  std::size_t window_rows = 0;
  std::size_t window_cols = 0;
  // Per-coordinate deviation tolerance; exact mode certifies at zero.
  T tol = scalar_traits<T>::comparison_tol();
  // Order mode: required bound on the dominating array's sup norm.
  std::optional<T> dominator_cap;
};

template <class T>
struct ConvergenceWitness {
  bool converged = false;
  std::size_t window_rows = 0, window_cols = 0;
  // Largest per-coordinate tail deviation inside the window. The tail
  // deviation of a coordinate is inf_k sup_{j >= k} |seq_j - limit|, which a
  // finite prefix attains at its final tail.
  T max_tail_deviation{};
  std::optional<DoubleArray<T>> dominator;  // order mode: entrywise sup of |seq_j|
  T dominator_norm{};
  std::string note;
};

// Convergence detectors over the represented prefix. uo mode certifies
// entrywise convergence inside the window; order mode additionally requires
// an order bound: the minimal dominating array (entrywise sup of |seq_j|,
// including row limits) must have sup norm within the declared cap. The
// detectors certify the represented prefix only; conclusions about the full
// sequence space rest on the obstruction certificates, not on them.
template <class T>
ConvergenceWitness<T> convergence_detect(const std::vector<DoubleArray<T>>& seq,
                                         const DoubleArray<T>& limit, ConvergenceMode mode,
                                         ConvergenceOptions<T> opts = {}) {
  if (seq.empty()) throw ArgumentError("detector needs a nonempty sequence");
  for (const auto& z : seq)
    if (!z.same_shape(limit)) throw DimensionError("sequence and limit shapes differ");

  const std::size_t L = seq.size();
  ConvergenceWitness<T> out;
  out.window_rows = opts.window_rows ? std::min(opts.window_rows, limit.rows())
                                     : std::min(limit.rows(), L);
  out.window_cols = opts.window_cols ? std::min(opts.window_cols, limit.cols())
                                     : std::min(limit.cols(), L + 1);
  out.note = "certifies the represented prefix on rows 1.." +
             std::to_string(out.window_rows) + ", columns 1.." +
             std::to_string(out.window_cols) + " only";

  out.max_tail_deviation = T(0);
  const DoubleArray<T>& last = seq.back();
  for (std::size_t m = 1; m <= out.window_rows; ++m)
    for (std::size_t n = 1; n <= out.window_cols; ++n) {
      T d = scalar_abs(T(last.entry(m, n) - limit.entry(m, n)));
      out.max_tail_deviation = scalar_max(out.max_tail_deviation, d);
    }
  bool entrywise = out.max_tail_deviation <= opts.tol;

  if (mode == ConvergenceMode::uo) {
    out.converged = entrywise;
    return out;
  }

  DoubleArray<T> dom = abs(seq.front());
  for (std::size_t i = 1; i < L; ++i) dom = join(dom, abs(seq[i]));
  out.dominator_norm = dom.sup_norm();
  out.dominator = std::move(dom);
  bool bounded = !opts.dominator_cap || out.dominator_norm <= *opts.dominator_cap;
  out.converged = entrywise && bounded;
  if (!bounded)
    out.note += "; dominator sup norm " + scalar_repr(out.dominator_norm) +
                " exceeds the declared cap";
  return out;
}

// Residuals |row_limit(m) - m·z_{m1}| for z built from {u, v} by lattice and
// linear operations. The law holds for u and v themselves and every operation
// preserves it (positive row scaling commutes with meets and joins), so the
// residuals vanish identically: exactly in rational mode, within 1e-12 in
// double mode.
template <class T>
std::vector<T> row_limit_law(const LatticeExpr& expr, const Counterexample<T>& cex) {
  std::vector<DoubleArray<T>> gens{cex.u, cex.v};
  DoubleArray<T> z = expr.evaluate(gens);
  std::vector<T> residuals;
  residuals.reserve(z.rows());
  for (std::size_t m = 1; m <= z.rows(); ++m) {
    T expected = T(scalar_traits<T>::from_int(static_cast<long>(m)) * z.entry(m, 1));
    residuals.push_back(scalar_abs(T(z.row_limit(m) - expected)));
  }
  return residuals;
}

template <class T>
struct ObstructionCertificate {
  bool holds = false;   // row-m first entry lies within 1/2 of 1
  T bound{};            // m/2: certified sup-norm lower bound when holds
  T sup_norm{};         // actual sup norm of z
  T first_column{};     // z_{m1}
};

// When z obeys the row-limit law at row m and its first column entry is
// within 1/2 of 1, the row limit exceeds m/2 in magnitude, so the sup norm of
// z is at least m/2. Approximating the coordinatewise target on deep rows
// therefore costs unbounded norm.
template <class T>
ObstructionCertificate<T> obstruction_certificate(const DoubleArray<T>& z, std::size_t m) {
  const T expected = T(scalar_traits<T>::from_int(static_cast<long>(m)) * z.entry(m, 1));
  T law_residual = scalar_abs(T(z.row_limit(m) - expected));
  if (law_residual > scalar_traits<T>::comparison_tol())
    throw ContractError("row-limit law does not hold for the given row");

  ObstructionCertificate<T> out;
  out.first_column = z.entry(m, 1);
  out.bound = scalar_traits<T>::from_ratio(static_cast<long>(m), 2);
  out.sup_norm = z.sup_norm();
  T dev = scalar_abs(T(out.first_column - T(1)));
  out.holds = dev < scalar_traits<T>::from_ratio(1, 2);
  return out;
}

template <class T>
struct SummabilityReport {
  bool order_null = false;
  T total_mass{};         // sum_n of the weighted mass of |x_n|
  bool within_budget = false;
  DoubleArray<T> limsup;  // inf_k sup_{n >= k} |x_n| over the prefix
};

// Order-null detector for weighted-summable sequences: when the accumulated
// weighted mass stays within the declared budget, the tail-sup array
// inf_k sup_{n>=k} |x_n| must vanish entrywise. Weights act on window entries
// only and must be strictly positive there.
template <class T>
SummabilityReport<T> summable_order_null(const std::vector<DoubleArray<T>>& seq,
                                         const DoubleArray<T>& weights, const T& budget) {
  if (seq.empty()) throw ArgumentError("detector needs a nonempty sequence");
  for (const auto& z : seq)
    if (!z.same_shape(weights)) throw DimensionError("sequence and weight shapes differ");
  for (const T& w : weights.raw_entries())
    if (!(w > T(0))) throw DomainError("weights must be strictly positive");
  if constexpr (!scalar_traits<T>::exact) {
    for (const auto& z : seq) {
      for (double v : z.raw_entries())
        if (!std::isfinite(v)) throw DomainError("sequence is unbounded");
      for (double v : z.raw_limits())
        if (!std::isfinite(v)) throw DomainError("sequence is unbounded");
    }
  }

  T mass = T(0);
  for (const auto& z : seq) {
    const auto& e = z.raw_entries();
    const auto& w = weights.raw_entries();
    for (std::size_t i = 0; i < e.size(); ++i) mass += w[i] * scalar_abs(e[i]);
  }

  // inf_k sup_{n >= k} |x_n| evaluated by its defining formula: accumulate
  // suffix suprema from the back and take the entrywise infimum over cuts.
  DoubleArray<T> suffix = abs(seq.back());
  DoubleArray<T> limsup = suffix;
  for (std::size_t k = seq.size() - 1; k-- > 0;) {
    suffix = join(suffix, abs(seq[k]));
    limsup = meet(limsup, suffix);
  }

  SummabilityReport<T> out{false, mass, mass <= budget, std::move(limsup)};
  out.order_null = out.within_budget &&
                   out.limsup.sup_norm() <= scalar_traits<T>::comparison_tol();
  return out;
}

}  // namespace span_lattice
