#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "phmor/benchmarks.hpp"
#include "phmor/experiment.hpp"
#include "phmor/integrate.hpp"
#include "phmor/ph_system.hpp"

namespace phmor {

struct InputConfig {
  std::string type;  // "constant" | "sine"
  double amplitude = 0.0;
  double frequency = 0.0;  // sine only
  std::string label;       // output-file suffix, unique within the run
};

struct ModelConfig {
  std::string type;  // "linear_msd" | "nonlinear_msd"
  Index n = 0;       // number of masses
  double mass = 1.0;
  double damping = 1.0;
  double stiffness = 1.0;        // linear chain
  double k1 = 1.0, k2 = 1.0;     // nonlinear chain
};

struct ExperimentConfig {
  ModelConfig model;
  TimeGrid grid;
  std::vector<InputConfig> inputs;
  ExperimentSettings settings;  // jobs is filled from the command line, not the file
  std::string output_directory = ".";
  std::string file_prefix;
};

// Strict schema: unknown keys anywhere are rejected, all numbers must be
// finite, and every violation raises ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

PhSystem build_model(const ModelConfig& model);
InputSignal make_input(const InputConfig& input);

}  // namespace phmor
