// hspace: counts the hypothesis space of finite-valued feed-forward networks.
//
//   hspace count  --arch 1-4 --values -1,1 --method exact
//   hspace sweep  --arch 1-2,1-3,1-4 --V 2,3 --methods exact,bound --plot fig.svg
//   hspace oracle --arch 1-2-2 --values -1,1

#include "hspace/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace hspace;

struct Output {
  std::string path;
  std::string format = "csv";
  std::string plot;
};

void write_report(const Output& out, const std::vector<ReportRow>& rows) {
  const std::string text = out.format == "json" ? to_json(rows) : to_csv(rows);
  if (out.path.empty() || out.path == "-") {
    std::cout << text << std::flush;
  } else {
    std::ofstream f(out.path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + out.path + "' for writing");
    f << text;
  }
  if (!out.plot.empty()) {
    std::ofstream f(out.plot, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + out.plot + "' for writing");
    f << render_svg(rows);
  }
}

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--shards", cfg.shards, "worker threads (default: $HSPACE_SHARDS or hardware concurrency)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-states", cfg.max_states, "enumeration guard on V^P");
  cmd->add_flag("--output-bias", cfg.output_bias, "give the output neuron a bias parameter");
}

void add_output(CLI::App* cmd, Output& out) {
  cmd->add_option("-o,--out", out.path, "report file (default: stdout)");
  cmd->add_option("--format", out.format, "report format")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact counting of finite-valued feed-forward network hypothesis spaces"};
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.shards = default_shard_count();
  Output out;

  auto* count = app.add_subcommand("count", "count one architecture under one method");
  count->add_option("--arch", cfg.arch, "architecture n-U1-...-UL")->required();
  count->add_option("--values", cfg.values, "comma-separated exact rationals");
  count->add_option("--method", cfg.method, "bound | exact | symbolic | numeric")
      ->check(CLI::IsMember({"bound", "exact", "symbolic", "numeric"}));
  count->add_option("--activation", cfg.activation, "numeric activation")
      ->check(CLI::IsMember({"relu", "tanh", "sigmoid", "identity", "all"}));
  count->add_option("--policy", cfg.policy, "symbolic normalization policy")
      ->check(CLI::IsMember({"sorted", "combined", "combined-dropped", "all"}));
  count->add_option("--tol", cfg.tolerance, "numeric Euclidean tolerance")->check(CLI::NonNegativeNumber);
  count->add_option("--grid", cfg.grid_size, "numeric grid size")->check(CLI::Range(2, 1 << 24));
  count->add_flag("!--no-exact", cfg.numeric_exact, "skip the tol=0 numeric row");
  count->add_option("--forms", cfg.forms_path, "write distinct symbolic normal forms to this file");
  count->add_option("--leaders", cfg.leaders_path, "write numeric cluster leaders as CSV to this file");
  add_common(count, cfg);
  add_output(count, out);
  count->add_option("--plot", out.plot, "also render an SVG chart");

  std::vector<std::string> family;
  std::vector<std::size_t> value_counts{2, 3};
  std::vector<std::string> methods{"exact", "bound"};
  auto* sweep = app.add_subcommand("sweep", "count a family of architectures over several V");
  sweep->add_option("--arch", family, "architectures")->delimiter(',');
  sweep->add_option("--V", value_counts, "value-set sizes (alphabets -1,1 / -1,0,1 / ...)")->delimiter(',');
  sweep->add_option("--methods", methods, "methods")->delimiter(',');
  sweep->add_option("--policy", cfg.policy, "symbolic normalization policy")
      ->check(CLI::IsMember({"sorted", "combined", "combined-dropped", "all"}));
  sweep->add_option("--activation", cfg.activation, "numeric activation")
      ->check(CLI::IsMember({"relu", "tanh", "sigmoid", "identity", "all"}));
  sweep->add_option("--plot", out.plot, "SVG chart of count vs P, one panel per V");
  add_common(sweep, cfg);
  add_output(sweep, out);

  bool corrupt = false;
  auto* oracle = app.add_subcommand("oracle", "cross-check Burnside counting against brute force");
  oracle->add_option("--arch", cfg.arch, "architecture n-U1-...-UL")->required();
  oracle->add_option("--values", cfg.values, "comma-separated exact rationals");
  oracle->add_flag("--corrupt-layout", corrupt, "use a broken induced permutation (test hook)");
  add_common(oracle, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config_error;
  }

  std::vector<ReportRow> rows;
  try {
    if (*count) {
      rows = cmd_count(cfg);
      write_report(out, rows);
    } else if (*sweep) {
      cmd_sweep(family, value_counts, methods, cfg, [&](const ReportRow& r) { rows.push_back(r); });
      write_report(out, rows);
    } else if (*oracle) {
      const auto report = cmd_oracle(cfg, corrupt);
      std::cout << format_oracle(cfg, report);
      return report.passed() ? exit_ok : exit_property_failure;
    }
  } catch (const GuardExceeded& e) {
    std::cerr << "hspace: " << e.what() << "\n";
    if (*sweep) write_report(out, rows);
    return exit_guard_violation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "hspace: " << e.what() << "\n";
    return exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "hspace: " << e.what() << "\n";
    return exit_property_failure;
  }
  return exit_ok;
}
