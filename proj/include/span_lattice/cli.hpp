#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "span_lattice/closure.hpp"
#include "span_lattice/convergence.hpp"
#include "span_lattice/errors.hpp"
#include "span_lattice/market_io.hpp"
#include "span_lattice/partition.hpp"
#include "span_lattice/payoff.hpp"
#include "span_lattice/scalar.hpp"
#include "span_lattice/spanning.hpp"

namespace span_lattice {
namespace cli {

struct Options {
  bool exact = false;
  std::string market;
  std::string asset;
  std::string claim;
  std::string algebra_from;
  std::string out = "-";
  std::size_t rows = 10;
  std::size_t cols = 10;
  std::size_t j = 0;  // 0: auto
  int levels = 6;
};

namespace detail {

inline std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::string block_label(const std::vector<std::size_t>& block,
                               const std::vector<std::string>& labels) {
  std::string s;
  for (std::size_t i : block) {
    if (!s.empty()) s += "|";
    s += labels[i];
  }
  return s;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot write file: " + path);
  f << content;
}

}  // namespace detail

template <class T>
int cmd_replicate(const Options& opt, std::ostream& out) {
  MarketSpec<T> market = load_market<T>(opt.market);
  auto space = market.make_space();
  Payoff<T> f = market.asset(space, opt.asset);
  Payoff<T> g = market.claim(space, opt.claim);

  ReplicationReport<T> report = replicate_or_best(g, f);
  if (!report.replicated) {
    nlohmann::json reason;
    reason["error"] = "spanning_failure";
    reason["reason"] = "claim is not measurable with respect to sigma(asset)";
    reason["residual"] = io_detail::scalar_to_json(report.residual_norm);
    reason["violating_block"] = report.violating_block;
    out << reason.dump() << "\n";
    return 1;
  }

  nlohmann::json pf = portfolio_to_json(report.portfolio, opt.asset);
  if (opt.out == "-") {
    out << pf.dump(2) << "\n";
  } else {
    detail::write_file(opt.out, pf.dump(2) + "\n");
  }
  nlohmann::json summary;
  summary["replicated"] = true;
  summary["residual"] = io_detail::scalar_to_json(report.residual_norm);
  summary["positions"] = report.portfolio.positions.size();
  out << summary.dump() << "\n";
  return 0;
}

template <class T>
int cmd_span(const Options& opt, std::ostream& out) {
  MarketSpec<T> market = load_market<T>(opt.market);
  auto space = market.make_space();
  Payoff<T> f = market.asset(space, opt.asset);

  OptionBasis<T> basis = option_space_basis(f);
  Partition<T> part = sigma_of<T>({f});
  out << "option_space_dimension," << basis.instruments.size() << "\n";
  out << "sigma_block_count," << part.block_count() << "\n";
  for (std::size_t b = 0; b < part.block_count(); ++b)
    out << "block," << b << "," << detail::block_label(part.blocks()[b], market.states)
        << "\n";
  for (const auto& inst : basis.instruments)
    out << "instrument," << option_kind_name(inst.kind) << "," << scalar_repr(inst.strike)
        << "\n";
  return 0;
}

template <class T>
int cmd_measure(const Options& opt, std::ostream& out) {
  MarketSpec<T> market = load_market<T>(opt.market);
  auto space = market.make_space();
  Payoff<T> g = market.claim(space, opt.claim);
  std::vector<Payoff<T>> assets;
  for (const auto& name : detail::split_names(opt.algebra_from))
    assets.push_back(market.asset(space, name));
  if (assets.empty()) throw ArgumentError("--algebra-from needs at least one asset");

  Partition<T> part = sigma_of(assets);
  const bool by_partition = is_measurable(g, part);
  const bool by_components =
      measurable_via_components(g, part, Payoff<T>::ones(space));

  out << "algebra_assets," << opt.algebra_from << "\n";
  for (std::size_t b = 0; b < part.block_count(); ++b)
    out << "block," << b << "," << detail::block_label(part.blocks()[b], market.states)
        << "\n";
  out << "partition_test," << (by_partition ? "true" : "false") << "\n";
  out << "component_test," << (by_components ? "true" : "false") << "\n";
  out << "tests_agree," << (by_partition == by_components ? "true" : "false") << "\n";
  if (!by_partition || !by_components) {
    nlohmann::json reason;
    reason["error"] = "not_measurable";
    reason["claim"] = opt.claim;
    reason["algebra_from"] = opt.algebra_from;
    out << reason.dump() << "\n";
    return 1;
  }
  return 0;
}

template <class T>
int cmd_counterexample(const Options& opt, std::ostream& out) {
  namespace fs = std::filesystem;
  const std::size_t M = opt.rows, N = opt.cols;
  Counterexample<T> cex = build_counterexample<T>(M, N);
  const std::size_t jmax = std::min(M, N - 1);
  const std::size_t j = opt.j == 0 ? jmax : opt.j;

  fs::create_directories(opt.out);
  auto path = [&](const std::string& name) { return (fs::path(opt.out) / name).string(); };

  {
    std::ostringstream s;
    std::vector<std::vector<std::string>> rows;
    for (std::size_t m = 1; m <= cex.params.level_rows(); ++m) {
      std::vector<std::string> row{std::to_string(m), scalar_repr(cex.params.c_of(m))};
      for (std::size_t n = 1; n <= cex.params.cols(); ++n)
        row.push_back(scalar_repr(cex.params.c_grid(m, n)));
      rows.push_back(std::move(row));
    }
    std::string header = "m,c_m";
    for (std::size_t n = 1; n <= cex.params.cols(); ++n)
      header += ",c_m" + std::to_string(n);
    write_csv_table(s, header, rows);
    detail::write_file(path("params.csv"), s.str());
  }
  for (const auto& [name, arr] :
       std::vector<std::pair<std::string, const DoubleArray<T>*>>{
           {"u.csv", &cex.u}, {"v.csv", &cex.v}, {"e.csv", &cex.e}}) {
    std::ostringstream s;
    write_csv(s, *arr);
    detail::write_file(path(name), s.str());
  }
  DoubleArray<T> y = yj(j, cex);
  {
    std::ostringstream s;
    write_csv(s, y);
    detail::write_file(path("y_" + std::to_string(j) + ".csv"), s.str());
  }

  // Row-limit residuals for the generators and a fixed pseudo-random family.
  T max_residual = T(0);
  {
    std::vector<std::pair<std::string, LatticeExpr>> exprs;
    exprs.push_back({"u", LatticeExpr::generator(0)});
    exprs.push_back({"v", LatticeExpr::generator(1)});
    std::mt19937 rng(0xC0FFEE);
    for (int i = 0; i < 20; ++i)
      exprs.push_back({"expr" + std::to_string(i), LatticeExpr::random(rng, 2, 5)});
    std::vector<std::vector<std::string>> rows;
    for (const auto& [label, expr] : exprs) {
      std::vector<T> residuals = row_limit_law(expr, cex);
      for (std::size_t m = 1; m <= residuals.size(); ++m) {
        max_residual = scalar_max(max_residual, residuals[m - 1]);
        rows.push_back({label, std::to_string(m), scalar_repr(residuals[m - 1])});
      }
    }
    std::ostringstream s;
    write_csv_table(s, "expr,m,residual", rows);
    detail::write_file(path("row_limit_residuals.csv"), s.str());
  }

  // Obstruction certificates along y^j: rows it reaches carry bound m/2.
  std::size_t certified = 0;
  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t m = 1; m <= j; ++m) {
      ObstructionCertificate<T> cert = obstruction_certificate(y, m);
      if (cert.holds) ++certified;
      rows.push_back({std::to_string(m), scalar_repr(cert.first_column),
                      cert.holds ? "true" : "false", scalar_repr(cert.bound),
                      scalar_repr(cert.sup_norm)});
    }
    std::ostringstream s;
    write_csv_table(s, "m,first_column,holds,bound,sup_norm", rows);
    detail::write_file(path("obstruction.csv"), s.str());
  }

  out << "rows," << M << "\n";
  out << "cols," << N << "\n";
  out << "y_index," << j << "\n";
  out << "max_row_limit_residual," << scalar_repr(max_residual) << "\n";
  out << "obstruction_rows_certified," << certified << "\n";
  out << "output_dir," << opt.out << "\n";
  return 0;
}

template <class T>
int cmd_approx(const Options& opt, std::ostream& out) {
  MarketSpec<T> market = load_market<T>(opt.market);
  auto space = market.make_space();
  Payoff<T> f = market.asset(space, opt.asset);
  Payoff<T> g = market.claim(space, opt.claim);
  Partition<T> part = sigma_of<T>({f});
  if (!is_measurable(g, part)) {
    nlohmann::json reason;
    reason["error"] = "not_measurable";
    reason["claim"] = opt.claim;
    reason["asset"] = opt.asset;
    out << reason.dump() << "\n";
    return 1;
  }
  ApproxReport<Payoff<T>> report = freudenthal_approx(g, part, opt.levels);
  std::string header = "level,error";
  for (const auto& label : market.states) header += "," + label;
  out << "# format_version: " << kFormatVersion << "\n" << header << "\n";
  for (std::size_t L = 0; L < report.stages.size(); ++L) {
    out << (L + 1) << "," << scalar_repr(report.errors[L]);
    for (std::size_t i = 0; i < report.stages[L].size(); ++i)
      out << "," << scalar_repr(report.stages[L][i]);
    out << "\n";
  }
  return 0;
}

template <class T>
int dispatch(const std::string& command, const Options& opt, std::ostream& out) {
  if (command == "replicate") return cmd_replicate<T>(opt, out);
  if (command == "span") return cmd_span<T>(opt, out);
  if (command == "measure") return cmd_measure<T>(opt, out);
  if (command == "counterexample") return cmd_counterexample<T>(opt, out);
  if (command == "approx") return cmd_approx<T>(opt, out);
  throw ArgumentError("unknown command: " + command);
}

// Front door used by both the binary and the in-process tests. Exit codes:
// 0 success, 1 spanning/measurability failure (machine-readable reason on
// stdout), 2 validation or usage error (message names the violated invariant).
inline int run_command(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Option spanning and order-closure toolkit for finite markets"};
  app.require_subcommand(1);
  Options opt;
  app.add_flag("--exact", opt.exact, "use exact rational arithmetic end-to-end");

  auto add_market = [&](CLI::App* cmd) {
    cmd->add_option("--market", opt.market, "market file (JSON)")->required();
  };

  CLI::App* replicate = app.add_subcommand("replicate", "replicate a claim with options");
  add_market(replicate);
  replicate->add_option("--asset", opt.asset, "underlying asset name")->required();
  replicate->add_option("--claim", opt.claim, "claim name")->required();
  replicate->add_option("--out", opt.out, "portfolio output path ('-' for stdout)");

  CLI::App* span = app.add_subcommand("span", "option space dimension and basis");
  add_market(span);
  span->add_option("--asset", opt.asset, "underlying asset name")->required();

  CLI::App* measure = app.add_subcommand("measure", "measurability of a claim");
  add_market(measure);
  measure->add_option("--claim", opt.claim, "claim name")->required();
  measure->add_option("--algebra-from", opt.algebra_from,
                      "comma-separated asset names generating the algebra")
      ->required();

  CLI::App* cex = app.add_subcommand("counterexample",
                                     "truncated double-sequence convergence tables");
  cex->add_option("--rows", opt.rows, "row truncation M")->required()
      ->check(CLI::Range(std::size_t{2}, std::size_t{4096}));
  cex->add_option("--cols", opt.cols, "column truncation N")->required()
      ->check(CLI::Range(std::size_t{2}, std::size_t{4096}));
  cex->add_option("--j", opt.j, "index of the emitted y^j (default: deepest)");
  cex->add_option("--out", opt.out, "output directory")->default_val(".");

  CLI::App* approx = app.add_subcommand("approx", "dyadic staircase approximation");
  add_market(approx);
  approx->add_option("--claim", opt.claim, "claim name")->required();
  approx->add_option("--asset", opt.asset, "generating asset name")->required();
  approx->add_option("--levels", opt.levels, "number of dyadic levels")
      ->check(CLI::Range(1, 62));

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (opt.exact) return dispatch<Rational>(command, opt, out);
    return dispatch<double>(command, opt, out);
  } catch (const SpanningFailure& e) {
    nlohmann::json reason;
    reason["error"] = "spanning_failure";
    reason["reason"] = e.what();
    reason["residual"] = e.residual;
    reason["violating_block"] = e.violating_block;
    out << reason.dump() << "\n";
    return 1;
  } catch (const NoApproximationError& e) {
    nlohmann::json reason;
    reason["error"] = "no_approximation";
    reason["reason"] = e.what();
    out << reason.dump() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cli
}  // namespace span_lattice
