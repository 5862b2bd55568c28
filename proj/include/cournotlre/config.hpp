#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cournotlre/aggregative.hpp"
#include "cournotlre/dynamics.hpp"
#include "cournotlre/oligopoly.hpp"
#include "cournotlre/rules.hpp"

namespace cournot {

// Invalid or missing configuration; `field` is the JSON path of the offender
// (e.g. "model.demand.intercept").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Fully parsed run configuration; every subcommand reads the slice it needs.
struct RunConfig {
  OligopolyModel model;
  std::vector<CriterionSpec> criteria;  // one per firm
  NoiseConfig noise;
  SimulationParams sim;
  std::vector<double> epsilon_sweep;  // empty = single epsilon from noise
  long trajectory_periods = 0;        // CSV export length; 0 = none
  double snap_tol = 1e-9;
  std::optional<AggregativeGame> aggregative;  // explicit aggregative instance
};

// Parses and validates a config JSON document / file. Throws ConfigError with
// the offending field path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

}  // namespace cournot
