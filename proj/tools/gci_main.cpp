#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gci/cli/reproduce.hpp"
#include "gci/cli/runner.hpp"
#include "gci/cli/scenario.hpp"
#include "gci/cli/table.hpp"
#include "gci/errors.hpp"

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitNumeric = 3;

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size() && !text.empty()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || end != item.data() + item.size()) {
      throw gci::cli::ScenarioError("--grid", 0, "--grid: '" + item + "' is not a number");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void emit(const gci::cli::Table& table, const std::string& format, const std::string& output) {
  const std::string text = format == "json" ? gci::cli::to_json(table) : gci::cli::to_csv(table);
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw gci::cli::ScenarioError("--output", 0, output + ": cannot open for writing");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Clausius inequality toolkit"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string output;
  std::string format = "csv";
  std::optional<double> alpha;
  std::optional<std::size_t> steps;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  std::string param;
  std::string grid;
  std::string target;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    sub->add_option("-o,--output", output, "Output file (stdout when omitted)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--alpha", alpha, "Replace the scenario's alpha grid");
    sub->add_option("--steps", steps, "Replace staircase stair counts");
    sub->add_option("--seed", seed, "Seed for randomized scenarios");
    sub->add_option("--tolerance", tolerance, "Integration and root-finding tolerance");
  };

  CLI::App* run = app.add_subcommand("run", "Run a scenario and write a table");
  add_common(run);
  CLI::App* sweep = app.add_subcommand("sweep", "Run a scenario over a parameter grid");
  add_common(sweep);
  sweep->add_option("--param", param, "alpha, steps, temperature_scale or seed")->required();
  sweep->add_option("--grid", grid, "Comma-separated grid values")->required();
  CLI::App* reproduce = app.add_subcommand("reproduce", "Check a reference figure or table");
  reproduce->add_option("target", target, "fig2, fig3, halfzero, qutrit or isotherm-convergence")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitSchema;
  }

  try {
    if (reproduce->parsed()) {
      const gci::cli::Report report = gci::cli::reproduce(gci::cli::parse_target(target));
      gci::cli::print_report(std::cout, report);
      return report.passed() ? 0 : 1;
    }
    gci::cli::RunOptions opts;
    opts.alpha = alpha;
    opts.steps = steps;
    opts.seed = seed;
    opts.tolerance = tolerance;
    const gci::cli::Scenario scenario = gci::cli::load_scenario(scenario_path);
    if (run->parsed()) {
      emit(gci::cli::run_scenario(scenario, opts), format, output);
    } else {
      const auto p = gci::cli::parse_sweep_parameter(param);
      const std::vector<double> values = parse_grid(grid);
      emit(gci::cli::sweep(scenario, p, values, opts, gci::cli::threads_from_env()), format, output);
    }
    return 0;
  } catch (const gci::cli::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const gci::Error& e) {
    std::cerr << "error (" << gci::to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitNumeric;
  }
}
