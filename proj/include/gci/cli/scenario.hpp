#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gci/core.hpp"
#include "gci/entropy.hpp"
#include "gci/linalg.hpp"
#include "gci/protocols.hpp"

namespace gci::cli {

// Malformed JSON or a schema violation; maps to exit code 2.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, std::size_t line, const std::string& message);
  const std::string& field() const noexcept { return field_; }
  std::size_t line() const noexcept { return line_; }  // 0 when unknown

 private:
  std::string field_;
  std::size_t line_;
};

struct GeneratorGrid {
  GeneratorFamily family;
  std::vector<double> parameters;  // ignored for Shannon
};

struct ProtocolScenario {
  LevelSystem levels;
  std::optional<std::vector<double>> populations;
  std::optional<double> gibbs_beta;
  double reference_beta;
  std::vector<ProtocolStep> steps;
  std::vector<GeneratorGrid> generators;
};

struct OttoScenario {
  LevelSystem cold;
  LevelSystem hot;
  double t_cold;
  double t_hot;
  std::vector<double> alphas;
};

struct HighTScenario {
  LevelSystem levels;
  double temperature;
  std::vector<double> initial;
  std::vector<double> alpha_tildes;
  double margin;
};

struct HalfZeroScenario {
  LevelSystem cold_levels;
  double t_cold;
  double t_hot;
  double fraction;
};

struct CoherenceScenario {
  CMatrix rho0;
  LevelSystem levels;
  std::optional<CMatrix> h_int;  // required for the two-stage variant
  double temperature;
  bool passive;  // four-stage variant
};

struct StaircaseScenario {
  LevelSystem from;
  LevelSystem to;
  double beta_begin;
  double beta_end;
  std::vector<std::size_t> stairs;
  std::vector<double> alphas;
};

enum class RandomMapKind { Uniform, TwoLevel };

struct RandomValidityScenario {
  std::size_t instances;
  std::size_t min_levels;
  std::size_t max_levels;
  std::vector<RandomMapKind> maps;
  std::vector<GeneratorGrid> generators;
};

using ScenarioBody = std::variant<ProtocolScenario, OttoScenario, HighTScenario, HalfZeroScenario,
                                  CoherenceScenario, StaircaseScenario, RandomValidityScenario>;

struct Scenario {
  std::string name;
  ScenarioBody body;
};

const char* kind_name(const ScenarioBody& body);

// `source` names the input in diagnostics.
Scenario parse_scenario(const std::string& text, const std::string& source = "<input>");
Scenario load_scenario(const std::string& path);

}  // namespace gci::cli
