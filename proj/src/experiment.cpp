#include "phmor/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "phmor/deim.hpp"
#include "phmor/embedding.hpp"

namespace phmor {

std::string method_name(RomMethod method) {
  switch (method) {
    case RomMethod::Sp1: return "SP1";
    case RomMethod::Sp2: return "SP2";
    case RomMethod::GmgPod: return "GMG-POD";
    case RomMethod::GmgQm: return "GMG-QM";
  }
  throw ConfigError("unknown ROM method enum value");
}

RomMethod method_from_name(const std::string& name) {
  if (name == "SP1") return RomMethod::Sp1;
  if (name == "SP2") return RomMethod::Sp2;
  if (name == "GMG-POD") return RomMethod::GmgPod;
  if (name == "GMG-QM") return RomMethod::GmgQm;
  throw ConfigError("unknown ROM method \"" + name +
                    "\" (expected SP1, SP2, GMG-POD or GMG-QM)");
}

namespace {

bool uses_method(const ExperimentSettings& st, RomMethod m) {
  return std::find(st.methods.begin(), st.methods.end(), m) != st.methods.end();
}

}  // namespace

ExperimentResult run_experiment(const PhSystem& sys, const InputSignal& u,
                                const TimeGrid& grid, const ExperimentSettings& st) {
  if (st.r_step < 1) throw ConfigError("run_experiment: r_step must be >= 1");
  if (st.r_min < 1 && !st.methods.empty() && st.r_min <= st.r_max) {
    throw ConfigError("run_experiment: r_min must be >= 1");
  }
  const bool any_gmg = uses_method(st, RomMethod::GmgPod) || uses_method(st, RomMethod::GmgQm);
  if (uses_method(st, RomMethod::GmgQm)) {
    if (st.lambda_reg.has_value() == st.lambda_rule.has_value()) {
      throw ConfigError("run_experiment: GMG-QM needs exactly one of lambda_reg and lambda_rule");
    }
  }

  std::vector<Index> orders;
  for (Index r = st.r_min; r <= st.r_max; r += st.r_step) orders.push_back(r);

  ExperimentResult result;
  result.energy_r = st.energy_r.value_or(orders.empty() ? 0 : orders.back());

  // One full-order simulation; its snapshots are both training data and the
  // error reference.
  const Trajectory fom = simulate_ph(sys, u, sys.x0(), grid, st.newton);
  result.energy_time.resize(grid.points());
  for (Index i = 0; i < grid.points(); ++i) result.energy_time(i) = grid.time(i);
  result.fom_energy_error = energy_balance_error_series(sys, fom, u);

  const auto [x_snap, xq_snap] = snapshot_matrices(sys, fom);

  // Shared offline pieces, each computed at most once.
  std::optional<GmgContext> ctx;
  std::optional<DeimModel> deim;
  std::optional<DeflatedPod> gmg_pod;
  std::optional<ThinSvd> sp_svd;
  std::optional<ThinSvd> grad_svd;
  if (any_gmg) {
    ctx.emplace(sys);
    deim = build_deim(sys.ham(), xq_snap, st.deim_tol);
    gmg_pod = deflated_pod(x_snap, sys.B());
  }
  if (uses_method(st, RomMethod::Sp1) || uses_method(st, RomMethod::Sp2)) {
    sp_svd = thin_svd(x_snap);
  }
  if (uses_method(st, RomMethod::Sp2)) {
    grad_svd = thin_svd(gradient_snapshots(sys, fom));
  }

  for (RomMethod method : st.methods) {
    for (Index r : orders) {
      CellResult cell;
      cell.method = method;
      cell.r = r;
      result.cells.push_back(std::move(cell));
    }
  }

  auto run_cell = [&](CellResult& cell) {
    try {
      std::unique_ptr<ReducedPhSystem> rom;
      switch (cell.method) {
        case RomMethod::GmgPod:
          rom = make_gmg_pod_rom(*ctx, *deim, linear_embedding_from_pod(*gmg_pod, cell.r),
                                 x_snap.col(0));
          break;
        case RomMethod::GmgQm: {
          const double lambda =
              st.lambda_reg ? *st.lambda_reg
                            : std::max(st.lambda_rule->factor *
                                           linear_projection_error(*gmg_pod, x_snap, cell.r),
                                       st.lambda_rule->floor);
          rom = make_gmg_qm_rom(
              *ctx, *deim,
              quadratic_embedding_from_pod(*gmg_pod, x_snap, cell.r, st.r_n, lambda),
              x_snap.col(0));
          break;
        }
        case RomMethod::Sp1:
          rom = make_sp1_rom(
              sys, pod_embedding_from_svd(*sp_svd, x_snap.rows(), x_snap.cols(), cell.r),
              x_snap.col(0));
          break;
        case RomMethod::Sp2:
          rom = make_sp2_rom(
              sys, pod_embedding_from_svd(*sp_svd, x_snap.rows(), x_snap.cols(), cell.r),
              pod_embedding_from_svd(*grad_svd, x_snap.rows(), x_snap.cols(), cell.r).V,
              x_snap.col(0));
          break;
      }
      const Trajectory reduced = simulate_rom(*rom, u, grid, st.newton);
      MetricsReport report = compute_metrics(fom, reduced, rom->embedding());
      if (cell.r == result.energy_r) {
        report.energy_error_series = energy_balance_error_series(*rom, reduced, u);
      }
      cell.metrics = std::move(report);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  const int jobs = std::max(1, std::min<int>(st.jobs, static_cast<int>(result.cells.size())));
  if (jobs <= 1) {
    for (CellResult& cell : result.cells) run_cell(cell);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&]() {
        for (size_t i = next.fetch_add(1); i < result.cells.size(); i = next.fetch_add(1)) {
          run_cell(result.cells[i]);
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
  }

  for (const CellResult& cell : result.cells) {
    if (cell.r == result.energy_r && cell.metrics &&
        cell.metrics->energy_error_series.size() > 0) {
      result.rom_energy_errors.emplace_back(cell.method, cell.metrics->energy_error_series);
    }
  }
  return result;
}

}  // namespace phmor
