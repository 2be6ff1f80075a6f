#pragma once

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>

#include <gmpxx.h>

namespace span_lattice {

namespace detail {
inline double read_tolerance_env() {
  if (const char* env = std::getenv("SPAN_LATTICE_TOLERANCE")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0 && std::isfinite(v)) return v;
  }
  return 1e-12;
}

inline double& tolerance_storage() {
  static double tol = read_tolerance_env();
  return tol;
}
}  // namespace detail

// Comparison tolerance used by all double-valued predicates. Defaults to
// 1e-12; SPAN_LATTICE_TOLERANCE overrides it at startup. Rational mode
// ignores it (all comparisons are exact there).
inline double global_tolerance() { return detail::tolerance_storage(); }
inline void set_global_tolerance(double tol) { detail::tolerance_storage() = tol; }

// Exact scalar for `--exact` mode.
using Rational = mpq_class;

inline double scalar_abs(double v) { return std::fabs(v); }
inline Rational scalar_abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }

inline double scalar_min(double a, double b) { return b < a ? b : a; }
inline double scalar_max(double a, double b) { return a < b ? b : a; }
inline Rational scalar_min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational scalar_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

inline double scalar_floor(double v) { return std::floor(v); }
inline Rational scalar_floor(const Rational& v) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
  return Rational(q);
}

// Shortest round-trip representation; used everywhere output must be
// byte-stable across runs.
inline std::string scalar_repr(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}
inline std::string scalar_repr(const Rational& v) { return v.get_str(); }

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double from_int(long v) { return static_cast<double>(v); }
  static double from_double(double v) { return v; }
  static double from_ratio(long num, long den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double to_double(double v) { return v; }
  static double comparison_tol() { return global_tolerance(); }
  // Residual threshold for span membership decisions.
  static double membership_tol() { return 1e-9; }
  // Two values are one level set when they differ by at most this; `scale`
  // is 1 + max |value| of the payoff being sliced.
  static double merge_tol(double scale) { return 1e-9 * scale; }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static Rational from_int(long v) { return Rational(v); }
  static Rational from_double(double v) { return Rational(v); }
  static Rational from_ratio(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  static double to_double(const Rational& v) { return v.get_d(); }
  static Rational comparison_tol() { return Rational(0); }
  static Rational membership_tol() { return Rational(0); }
  static Rational merge_tol(const Rational&) { return Rational(0); }
};

// |a - b| <= tolerance (exact equality in rational mode).
template <class T>
bool approx_eq(const T& a, const T& b) {
  T d = a - b;
  return scalar_abs(d) <= scalar_traits<T>::comparison_tol();
}

// a <= b up to the comparison tolerance.
template <class T>
bool approx_le(const T& a, const T& b) {
  return a <= b + scalar_traits<T>::comparison_tol();
}

template <class T>
bool approx_zero(const T& a) {
  return scalar_abs(a) <= scalar_traits<T>::comparison_tol();
}

// Parses either a plain decimal or a "p/q" rational literal.
inline bool parse_scalar(const std::string& text, double& out) {
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    char* end = nullptr;
    const double num = std::strtod(text.c_str(), &end);
    const double den = std::strtod(text.c_str() + slash + 1, nullptr);
    if (den == 0.0) return false;
    out = num / den;
    return true;
  }
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end != text.c_str();
}

inline bool parse_scalar(const std::string& text, Rational& out) {
  try {
    if (text.find('/') != std::string::npos) {
      out = Rational(text);
      out.canonicalize();
      return true;
    }
    // Decimal literal: scale the fractional part by a power of ten.
    std::string t = text;
    bool neg = false;
    if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
      neg = t[0] == '-';
      t.erase(0, 1);
    }
    const auto dot = t.find('.');
    std::string digits = t;
    long exp10 = 0;
    if (dot != std::string::npos) {
      digits = t.substr(0, dot) + t.substr(dot + 1);
      exp10 = static_cast<long>(t.size() - dot - 1);
    }
    if (digits.empty()) return false;
    for (char c : digits)
      if (c < '0' || c > '9') return false;
    mpz_class num(digits);
    mpz_class den = 1;
    for (long i = 0; i < exp10; ++i) den *= 10;
    out = Rational(num, den);
    out.canonicalize();
    if (neg) out = -out;
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

}  // namespace span_lattice
