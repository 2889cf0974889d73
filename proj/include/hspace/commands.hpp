#pragma once

// The operations behind the command-line tool, returning report rows so
// they can be driven from tests as well.

#include "hspace/arch.hpp"
#include "hspace/burnside.hpp"
#include "hspace/numeric.hpp"
#include "hspace/oracle.hpp"
#include "hspace/report.hpp"
#include "hspace/symbolic.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace hspace {

enum ExitCode : int { exit_ok = 0, exit_property_failure = 1, exit_config_error = 2, exit_guard_violation = 3 };

struct RunConfig {
  std::string arch = "1-4";
  std::string values = "-1,1";
  std::string method = "exact";      ///< bound | exact | symbolic | numeric
  std::string activation = "relu";   ///< relu | tanh | sigmoid | identity | all
  std::string policy = "sorted";     ///< sorted | combined | combined-dropped | all
  double tolerance = 1e-4;
  std::size_t grid_size = 1001;
  std::size_t shards = 1;
  bool output_bias = false;
  bool numeric_exact = true;         ///< also report the tol = 0 count
  std::uint64_t max_states = std::uint64_t{1} << 24;
  std::string forms_path;            ///< symbolic: write the distinct normal forms here
  std::string leaders_path;          ///< numeric: write cluster leaders as CSV here
};

namespace detail {

template <class Fn>
ReportRow timed_row(const Architecture& arch, std::size_t v, std::string method, std::string policy, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string count = fn();
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  return {arch.to_string(), param_count(arch), v, std::move(method), std::move(policy), std::move(count), dt.count()};
}

inline std::string format_tolerance(double tol) { return "tol=" + format_seconds(tol); }

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

/// Appends "." + tag before the extension when several outputs share a path.
inline std::string tagged_path(const std::string& path, const std::string& tag, bool needed) {
  if (!needed) return path;
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "." + tag;
  return path.substr(0, dot) + "." + tag + path.substr(dot);
}

inline std::string leaders_csv(const NumericCount& result, std::size_t params, std::size_t value_count) {
  std::string out;
  for (std::size_t k = 0; k < params; ++k) out += "p" + std::to_string(k) + ",";
  const std::size_t n = result.leaders.empty() ? 0 : result.leaders.front().size();
  for (std::size_t i = 0; i < n; ++i) out += "y" + std::to_string(i) + (i + 1 < n ? "," : "");
  out += "\n";
  for (std::size_t c = 0; c < result.leaders.size(); ++c) {
    const auto s = state_from_rank(result.leader_ranks[c], params, value_count);
    for (auto d : s.digits) out += std::to_string(d) + ",";
    for (std::size_t i = 0; i < n; ++i) out += format_seconds(result.leaders[c][i]) + (i + 1 < n ? "," : "");
    out += "\n";
  }
  return out;
}

}  // namespace detail

/// Rows for one architecture and value set under one method.
inline std::vector<ReportRow> count_rows(const Architecture& arch, const ValueSet& vs, const RunConfig& cfg) {
  std::vector<ReportRow> rows;
  const std::size_t v = vs.size();
  EnumerationGuard guard{cfg.max_states};
  if (cfg.method == "bound") {
    rows.push_back(detail::timed_row(arch, v, "bound", "-", [&] { return to_string(theorem1_bound(arch, v)); }));
  } else if (cfg.method == "exact") {
    rows.push_back(detail::timed_row(arch, v, "exact", "-", [&] { return burnside_exact(arch, v).str(); }));
  } else if (cfg.method == "symbolic") {
    std::vector<NormalizationPolicy> policies;
    if (cfg.policy == "all")
      policies = all_policies();
    else
      policies.push_back(parse_policy(cfg.policy));
    for (const auto& policy : policies)
      rows.push_back(detail::timed_row(arch, v, "symbolic", to_string(policy), [&] {
        const auto result = count_unique_symbolic(arch, vs, policy, {guard, cfg.shards, true});
        if (!cfg.forms_path.empty()) {
          std::string text;
          for (const auto& line : result.forms.listing()) text += line + "\n";
          detail::write_file(detail::tagged_path(cfg.forms_path, to_string(policy), policies.size() > 1), text);
        }
        return std::to_string(result.count);
      }));
  } else if (cfg.method == "numeric") {
    std::vector<Activation> acts;
    if (cfg.activation == "all")
      acts = {Activation::relu, Activation::tanh, Activation::sigmoid};
    else
      acts.push_back(parse_activation(cfg.activation));
    const EvalGrid grid(cfg.grid_size);
    for (auto act : acts) {
      NumericCount result;
      NumericOptions opt;
      opt.guard = guard;
      opt.shards = cfg.shards;
      opt.also_exact = cfg.numeric_exact && cfg.tolerance != 0.0;
      opt.keep_leaders = !cfg.leaders_path.empty();
      rows.push_back(detail::timed_row(arch, v, "numeric:" + to_string(act), detail::format_tolerance(cfg.tolerance), [&] {
        result = count_unique_numeric(arch, vs, act, grid, cfg.tolerance, opt);
        return std::to_string(result.count);
      }));
      if (opt.keep_leaders)
        detail::write_file(detail::tagged_path(cfg.leaders_path, to_string(act), acts.size() > 1),
                           detail::leaders_csv(result, param_count(arch), v));
      if (opt.also_exact)
        rows.push_back({arch.to_string(), param_count(arch), v, "numeric:" + to_string(act), detail::format_tolerance(0.0),
                        std::to_string(result.exact_count), rows.back().seconds});
    }
  } else {
    throw std::invalid_argument("unknown method '" + cfg.method + "'");
  }
  return rows;
}

inline std::vector<ReportRow> cmd_count(const RunConfig& cfg) {
  const auto arch = parse_architecture(cfg.arch, cfg.output_bias);
  const auto vs = parse_value_set(cfg.values);
  return count_rows(arch, vs, cfg);
}

/// One row per (architecture, V, method). Rows are handed to `sink` as they
/// complete so partial results survive a guard violation.
inline std::vector<ReportRow> cmd_sweep(const std::vector<std::string>& archs, const std::vector<std::size_t>& value_counts,
                                        const std::vector<std::string>& methods, const RunConfig& base,
                                        const std::function<void(const ReportRow&)>& sink = {}) {
  std::vector<Architecture> parsed;
  for (const auto& a : archs) parsed.push_back(parse_architecture(a, base.output_bias));
  for (const auto& m : methods)
    if (m != "bound" && m != "exact" && m != "symbolic" && m != "numeric") throw std::invalid_argument("unknown method '" + m + "'");
  std::vector<ReportRow> rows;
  for (auto v : value_counts) {
    const auto vs = default_value_set(v);
    for (const auto& arch : parsed)
      for (const auto& m : methods) {
        RunConfig cfg = base;
        cfg.method = m;
        for (auto& r : count_rows(arch, vs, cfg)) {
          if (sink) sink(r);
          rows.push_back(std::move(r));
        }
      }
  }
  return rows;
}

inline OracleReport cmd_oracle(const RunConfig& cfg, bool corrupt_layout = false) {
  const auto arch = parse_architecture(cfg.arch, cfg.output_bias);
  const auto vs = parse_value_set(cfg.values);
  OracleOptions opt;
  opt.guard = EnumerationGuard{cfg.max_states};
  opt.shards = cfg.shards;
  if (corrupt_layout) opt.induce = corrupted_param_permutation;
  return run_oracle(arch, vs, opt);
}

inline std::string format_oracle(const RunConfig& cfg, const OracleReport& report) {
  std::ostringstream out;
  out << "oracle " << cfg.arch << " values {" << cfg.values << "}\n";
  for (const auto& c : report.checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  out << (report.passed() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace hspace
