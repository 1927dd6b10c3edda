#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phmor/benchmarks.hpp"
#include "phmor/integrate.hpp"
#include "phmor/metrics.hpp"
#include "phmor/rom.hpp"
#include "phmor/types.hpp"

namespace phmor {

enum class RomMethod { Sp1, Sp2, GmgPod, GmgQm };

std::string method_name(RomMethod method);
RomMethod method_from_name(const std::string& name);  // ConfigError on unknown names

// lambda_reg(r) = max(factor * e_proj(r), floor), with e_proj(r) the linear
// projection error of [B, Vbar(r)] over the training snapshots.
struct LambdaRule {
  double factor = 0.2;
  double floor = 0.0;
};

struct ExperimentSettings {
  std::vector<RomMethod> methods;
  Index r_min = 0;
  Index r_max = 0;
  Index r_step = 1;
  Index r_n = 8;                          // quadratic-correction dimension
  std::optional<double> lambda_reg;       // exactly one of lambda_reg
  std::optional<LambdaRule> lambda_rule;  // ... and lambda_rule
  double deim_tol = 1e-8;
  std::optional<Index> energy_r;  // energy series probe; defaults to the last r
  NewtonConfig newton;
  int jobs = 1;
};

// One (method, r) sweep cell. A failed cell keeps its diagnostic and leaves
// the metrics empty; the sweep continues.
struct CellResult {
  RomMethod method = RomMethod::GmgPod;
  Index r = 0;
  std::optional<MetricsReport> metrics;
  std::string error;
};

struct ExperimentResult {
  std::vector<CellResult> cells;  // ordered by (method in config order, r ascending)
  Index energy_r = 0;
  Vector energy_time;        // grid times for the energy series
  Vector fom_energy_error;   // energy-balance error of the full model
  // Per-method energy series at energy_r, aligned with the successful cells.
  std::vector<std::pair<RomMethod, Vector>> rom_energy_errors;
};

ExperimentResult run_experiment(const PhSystem& sys, const InputSignal& u,
                                const TimeGrid& grid, const ExperimentSettings& settings);

}  // namespace phmor
