#pragma once

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "span_lattice/double_array.hpp"
#include "span_lattice/errors.hpp"
#include "span_lattice/payoff.hpp"
#include "span_lattice/scalar.hpp"
#include "span_lattice/spanning.hpp"

namespace span_lattice {

inline constexpr int kFormatVersion = 1;

// Static market description: state labels, strictly positive probabilities
// summing to one (tolerance 1e-9 at ingestion; normalized exactly on
// conversion), and named asset/claim vectors over the states.
template <class T>
struct MarketSpec {
  std::vector<std::string> states;
  std::vector<T> probs;
  std::map<std::string, std::vector<T>> assets;
  std::map<std::string, std::vector<T>> claims;

  std::size_t size() const { return probs.size(); }

  typename Payoff<T>::SpacePtr make_space() const {
    T sum = T(0);
    for (const T& p : probs) sum += p;
    std::vector<T> normalized;
    normalized.reserve(probs.size());
    for (const T& p : probs) normalized.push_back(T(p / sum));
    return StateSpace<T>::with_probs(std::move(normalized));
  }

  Payoff<T> asset(const typename Payoff<T>::SpacePtr& space, const std::string& name) const {
    auto it = assets.find(name);
    if (it == assets.end()) throw ArgumentError("unknown asset: " + name);
    return Payoff<T>(space, it->second);
  }
  Payoff<T> claim(const typename Payoff<T>::SpacePtr& space, const std::string& name) const {
    auto it = claims.find(name);
    if (it == claims.end()) throw ArgumentError("unknown claim: " + name);
    return Payoff<T>(space, it->second);
  }
};

namespace io_detail {

template <class T>
T scalar_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    T out{};
    if (!parse_scalar(j.get<std::string>(), out))
      throw FormatError("cannot parse scalar: " + j.get<std::string>());
    return out;
  }
  if (j.is_number_integer()) return scalar_traits<T>::from_int(j.get<long>());
  if (j.is_number()) return scalar_traits<T>::from_double(j.get<double>());
  throw FormatError("expected a number or a \"p/q\" string");
}

template <class T>
nlohmann::json scalar_to_json(const T& v) {
  if constexpr (scalar_traits<T>::exact) {
    return scalar_repr(v);
  } else {
    return v;
  }
}

template <class T>
std::vector<T> vector_from_json(const nlohmann::json& j, std::size_t expected,
                                const std::string& what) {
  if (!j.is_array()) throw FormatError(what + " must be an array");
  if (j.size() != expected)
    throw FormatError(what + " has length " + std::to_string(j.size()) +
                      " but the market has " + std::to_string(expected) + " states");
  std::vector<T> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(scalar_from_json<T>(e));
  return out;
}

inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw FormatError(what + " is not valid JSON");
  return j;
}

inline void check_version(const nlohmann::json& j, const std::string& what) {
  if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != kFormatVersion)
    throw FormatError(what + " must declare format_version " +
                      std::to_string(kFormatVersion));
}

}  // namespace io_detail

template <class T>
MarketSpec<T> parse_market(const std::string& text) {
  using nlohmann::json;
  json j = io_detail::parse_json(text, "market file");
  io_detail::check_version(j, "market file");
  if (!j.contains("probs") || !j["probs"].is_array() || j["probs"].empty())
    throw FormatError("market file needs a nonempty probs array");

  MarketSpec<T> spec;
  for (const auto& p : j["probs"]) spec.probs.push_back(io_detail::scalar_from_json<T>(p));
  const std::size_t n = spec.probs.size();

  T sum = T(0);
  for (const T& p : spec.probs) {
    if (!(p > T(0)))
      throw FormatError("violated invariant: state probabilities must be strictly positive");
    sum += p;
  }
  if (scalar_abs(T(sum - T(1))) > T(1e-9))
    throw FormatError("violated invariant: state probabilities must sum to 1 "
                      "(tolerance 1e-9)");

  if (j.contains("states")) {
    if (!j["states"].is_array() || j["states"].size() != n)
      throw FormatError("violated invariant: states must list one label per state");
    for (const auto& s : j["states"]) spec.states.push_back(s.get<std::string>());
  } else {
    for (std::size_t i = 0; i < n; ++i) spec.states.push_back("s" + std::to_string(i));
  }

  for (const char* section : {"assets", "claims"}) {
    if (!j.contains(section)) continue;
    if (!j[section].is_object()) throw FormatError(std::string(section) + " must be an object");
    for (const auto& [name, vec] : j[section].items()) {
      auto parsed = io_detail::vector_from_json<T>(vec, n, std::string(section) + "." + name);
      if (std::string(section) == "assets")
        spec.assets.emplace(name, std::move(parsed));
      else
        spec.claims.emplace(name, std::move(parsed));
    }
  }
  return spec;
}

template <class T>
MarketSpec<T> load_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open market file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_market<T>(buf.str());
}

template <class T>
nlohmann::json portfolio_to_json(const Portfolio<T>& pf, const std::string& underlying_name) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["underlying"] = underlying_name;
  j["positions"] = nlohmann::json::array();
  for (const auto& pos : pf.positions) {
    nlohmann::json p;
    p["kind"] = option_kind_name(pos.instrument.kind);
    p["strike"] = io_detail::scalar_to_json(pos.instrument.strike);
    p["weight"] = io_detail::scalar_to_json(pos.weight);
    j["positions"].push_back(std::move(p));
  }
  return j;
}

// Re-ingests a portfolio file against a market: the underlying is resolved by
// name among the market's assets.
template <class T>
Portfolio<T> parse_portfolio(const std::string& text, const MarketSpec<T>& market,
                             const typename Payoff<T>::SpacePtr& space) {
  using nlohmann::json;
  json j = io_detail::parse_json(text, "portfolio file");
  io_detail::check_version(j, "portfolio file");
  if (!j.contains("underlying") || !j["underlying"].is_string())
    throw FormatError("portfolio file needs an underlying asset name");
  Payoff<T> underlying = market.asset(space, j["underlying"].get<std::string>());
  Portfolio<T> pf;
  if (!j.contains("positions") || !j["positions"].is_array())
    throw FormatError("portfolio file needs a positions array");
  for (const auto& p : j["positions"]) {
    if (!p.contains("kind") || !p.contains("strike") || !p.contains("weight"))
      throw FormatError("each position needs kind, strike and weight");
    const std::string kind = p["kind"].get<std::string>();
    if (kind != "call" && kind != "put")
      throw FormatError("position kind must be call or put");
    pf.positions.push_back(
        {Instrument<T>{kind == "call" ? OptionKind::call : OptionKind::put,
                       io_detail::scalar_from_json<T>(p["strike"]), underlying},
         io_detail::scalar_from_json<T>(p["weight"])});
  }
  return pf;
}

// CSV with a leading version comment; values use the shortest round-trip
// (double) or p/q (rational) representation so output is byte-stable.
template <class T>
void write_csv(std::ostream& os, const DoubleArray<T>& a) {
  os << "# format_version: " << kFormatVersion << "\n";
  os << "m";
  for (std::size_t n = 1; n <= a.cols(); ++n) os << ",n" << n;
  os << ",limit\n";
  for (std::size_t m = 1; m <= a.rows(); ++m) {
    os << m;
    for (std::size_t n = 1; n <= a.cols(); ++n) os << "," << scalar_repr(a.entry(m, n));
    os << "," << scalar_repr(a.row_limit(m)) << "\n";
  }
}

inline void write_csv_table(std::ostream& os, const std::string& header,
                            const std::vector<std::vector<std::string>>& rows) {
  os << "# format_version: " << kFormatVersion << "\n";
  os << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      os << row[i];
    }
    os << "\n";
  }
}

}  // namespace span_lattice
