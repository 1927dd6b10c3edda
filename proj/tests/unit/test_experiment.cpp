#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "phmor/benchmarks.hpp"
#include "phmor/embedding.hpp"
#include "phmor/experiment.hpp"
#include "test_helpers.hpp"

using namespace phmor;

namespace {

struct Setup {
  PhSystem sys;
  InputSignal u;
  TimeGrid grid;
};

Setup linear_setup() {
  return Setup{build_linear_msd(LinearMsdConfig::uniform(4, 1.0, 1.0, 0.5)),
               sine_input(0.5, 1.0), TimeGrid{0.0, 2.0, 20}};
}

ExperimentSettings sweep_settings() {
  ExperimentSettings st;
  st.methods = {RomMethod::Sp1, RomMethod::Sp2, RomMethod::GmgPod, RomMethod::GmgQm};
  st.r_min = 2;
  st.r_max = 4;
  st.r_step = 2;
  st.r_n = 1;
  st.lambda_reg = 1e-3;
  st.newton = NewtonConfig{1e-10, 10};
  return st;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("method names round trip") {
  for (RomMethod m : {RomMethod::Sp1, RomMethod::Sp2, RomMethod::GmgPod, RomMethod::GmgQm}) {
    CHECK(method_from_name(method_name(m)) == m);
  }
  CHECK(method_name(RomMethod::GmgPod) == "GMG-POD");
  CHECK_THROWS_AS(method_from_name("POD"), ConfigError);
}

TEST_CASE("sweep: cell order, all-green metrics, energy capture at the probe order") {
  const Setup s = linear_setup();
  ExperimentSettings st = sweep_settings();
  st.energy_r = 4;
  const ExperimentResult result = run_experiment(s.sys, s.u, s.grid, st);

  REQUIRE(result.cells.size() == 8);  // 4 methods x r in {2, 4}
  for (size_t k = 0; k < result.cells.size(); ++k) {
    const CellResult& cell = result.cells[k];
    CHECK(cell.method == st.methods[k / 2]);
    CHECK(cell.r == (k % 2 == 0 ? 2 : 4));
    REQUIRE_MESSAGE(cell.metrics.has_value(),
                    method_name(cell.method) << " r=" << cell.r << ": " << cell.error);
    CHECK(std::isfinite(cell.metrics->e_x_red));
    CHECK(cell.metrics->e_x_proj <= cell.metrics->e_x_red + 1e-12);
    // Only the probe order carries an energy series.
    if (cell.r == 4) {
      CHECK(cell.metrics->energy_error_series.size() == s.grid.points());
    } else {
      CHECK(cell.metrics->energy_error_series.size() == 0);
    }
    if (cell.method == RomMethod::GmgQm) {
      CHECK(cell.metrics->e_x_lowerbound.has_value());
    } else {
      CHECK_FALSE(cell.metrics->e_x_lowerbound.has_value());
    }
  }

  CHECK(result.energy_r == 4);
  REQUIRE(result.energy_time.size() == s.grid.points());
  for (Index i = 0; i < s.grid.points(); ++i) CHECK(result.energy_time(i) == s.grid.time(i));
  REQUIRE(result.fom_energy_error.size() == s.grid.points());
  CHECK(result.fom_energy_error(0) == 0.0);

  // One energy entry per method, in cell order, equal to the stored series.
  REQUIRE(result.rom_energy_errors.size() == 4);
  for (size_t k = 0; k < 4; ++k) {
    CHECK(result.rom_energy_errors[k].first == st.methods[k]);
    const Vector& series = result.rom_energy_errors[k].second;
    const CellResult& cell = result.cells[2 * k + 1];
    CHECK(series == cell.metrics->energy_error_series);
    CHECK(series(0) == 0.0);
  }
}

TEST_CASE("sweep results are identical at any job count") {
  const Setup s = linear_setup();
  ExperimentSettings st = sweep_settings();
  const ExperimentResult serial = run_experiment(s.sys, s.u, s.grid, st);
  st.jobs = 5;
  const ExperimentResult parallel = run_experiment(s.sys, s.u, s.grid, st);

  REQUIRE(serial.cells.size() == parallel.cells.size());
  for (size_t k = 0; k < serial.cells.size(); ++k) {
    const CellResult& a = serial.cells[k];
    const CellResult& b = parallel.cells[k];
    CHECK(a.method == b.method);
    CHECK(a.r == b.r);
    REQUIRE(a.metrics.has_value());
    REQUIRE(b.metrics.has_value());
    CHECK(a.metrics->e_x_red == b.metrics->e_x_red);
    CHECK(a.metrics->e_x_proj == b.metrics->e_x_proj);
    CHECK(a.metrics->e_y == b.metrics->e_y);
  }
  CHECK(serial.fom_energy_error == parallel.fom_energy_error);
}

TEST_CASE("energy_r defaults to the largest swept order") {
  const Setup s = linear_setup();
  ExperimentSettings st = sweep_settings();
  st.methods = {RomMethod::GmgPod};
  REQUIRE_FALSE(st.energy_r.has_value());
  const ExperimentResult result = run_experiment(s.sys, s.u, s.grid, st);
  CHECK(result.energy_r == 4);
  REQUIRE(result.rom_energy_errors.size() == 1);
  CHECK(result.rom_energy_errors[0].second.size() == s.grid.points());
}

TEST_CASE("a failing cell is recorded and does not stop the sweep") {
  const Setup s = linear_setup();
  ExperimentSettings st = sweep_settings();
  st.methods = {RomMethod::GmgQm};
  st.r_n = 2;  // r = 2 leaves (r - m)^2 = 1 < r_n, so that cell must fail
  const ExperimentResult result = run_experiment(s.sys, s.u, s.grid, st);
  REQUIRE(result.cells.size() == 2);
  CHECK_FALSE(result.cells[0].metrics.has_value());
  CHECK_FALSE(result.cells[0].error.empty());
  REQUIRE_MESSAGE(result.cells[1].metrics.has_value(), result.cells[1].error);
  // The failed cell held the probe order's method slot only if it succeeded.
  REQUIRE(result.rom_energy_errors.size() == 1);
  CHECK(result.rom_energy_errors[0].first == RomMethod::GmgQm);
}

TEST_CASE("lambda_rule reproduces the explicit lambda_reg it resolves to") {
  const Setup s = linear_setup();
  ExperimentSettings rule = sweep_settings();
  rule.methods = {RomMethod::GmgQm};
  rule.lambda_reg.reset();
  rule.lambda_rule = LambdaRule{0.3, 1e-6};

  // Resolve the rule by hand from the same training snapshots.
  const Trajectory fom = simulate_ph(s.sys, s.u, s.sys.x0(), s.grid, rule.newton);
  const Matrix x_snap = snapshot_matrices(s.sys, fom).first;
  const DeflatedPod pod = deflated_pod(x_snap, s.sys.B());

  const ExperimentResult via_rule = run_experiment(s.sys, s.u, s.grid, rule);
  for (const CellResult& cell : via_rule.cells) {
    ExperimentSettings fixed = rule;
    fixed.lambda_rule.reset();
    fixed.r_min = fixed.r_max = cell.r;
    fixed.lambda_reg =
        std::max(0.3 * linear_projection_error(pod, x_snap, cell.r), 1e-6);
    const ExperimentResult via_reg = run_experiment(s.sys, s.u, s.grid, fixed);
    REQUIRE(via_reg.cells.size() == 1);
    REQUIRE(cell.metrics.has_value());
    REQUIRE(via_reg.cells[0].metrics.has_value());
    CHECK(cell.metrics->e_x_red == via_reg.cells[0].metrics->e_x_red);
    CHECK(cell.metrics->e_y == via_reg.cells[0].metrics->e_y);
  }
}

TEST_CASE("settings validation") {
  const Setup s = linear_setup();
  ExperimentSettings st = sweep_settings();
  st.methods = {RomMethod::GmgQm};
  st.lambda_rule = LambdaRule{};  // both given
  CHECK_THROWS_AS(run_experiment(s.sys, s.u, s.grid, st), ConfigError);
  st.lambda_rule.reset();
  st.lambda_reg.reset();  // neither given
  CHECK_THROWS_AS(run_experiment(s.sys, s.u, s.grid, st), ConfigError);

  ExperimentSettings bad_step = sweep_settings();
  bad_step.r_step = 0;
  CHECK_THROWS_AS(run_experiment(s.sys, s.u, s.grid, bad_step), ConfigError);
  ExperimentSettings bad_min = sweep_settings();
  bad_min.r_min = 0;
  CHECK_THROWS_AS(run_experiment(s.sys, s.u, s.grid, bad_min), ConfigError);
}

}  // TEST_SUITE
