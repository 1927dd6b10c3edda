#include "phmor/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>

#include "phmor/config.hpp"
#include "phmor/csv.hpp"
#include "phmor/embedding.hpp"
#include "phmor/experiment.hpp"
#include "phmor/integrate.hpp"
#include "phmor/ph_system.hpp"
#include "phmor/types.hpp"

namespace phmor {
namespace {

namespace fs = std::filesystem;

fs::path resolve_output_dir(const ExperimentConfig& cfg, const std::string& out_flag) {
  const fs::path dir = out_flag.empty() ? fs::path(cfg.output_directory) : fs::path(out_flag);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  }
  return dir;
}

// Single input: <prefix><stem>.csv. Several inputs: <prefix><stem>_<label>.csv.
std::string output_name(const ExperimentConfig& cfg, const std::string& stem,
                        const InputConfig& input) {
  std::string name = cfg.file_prefix + stem;
  if (cfg.inputs.size() > 1) {
    name += "_" + input.label;
  }
  return name + ".csv";
}

int cmd_simulate_fom(const ExperimentConfig& cfg, const std::string& out_flag) {
  const PhSystem sys = build_model(cfg.model);
  const fs::path dir = resolve_output_dir(cfg, out_flag);
  for (const InputConfig& input : cfg.inputs) {
    const Trajectory traj =
        simulate_ph(sys, make_input(input), sys.x0(), cfg.grid, cfg.settings.newton);
    const fs::path path = dir / output_name(cfg, "trajectory", input);
    write_trajectory_csv(path, traj);
    std::cout << "wrote " << path.string() << " (" << traj.grid.points() << " rows, dim "
              << sys.dim() << ")\n";
  }
  return 0;
}

void report_cells(const ExperimentResult& result) {
  for (const CellResult& cell : result.cells) {
    if (cell.metrics) {
      std::printf("  %-8s r=%-3lld e_x_red=%.3e  e_x_proj=%.3e  e_y=%.3e\n",
                  method_name(cell.method).c_str(), static_cast<long long>(cell.r),
                  cell.metrics->e_x_red, cell.metrics->e_x_proj, cell.metrics->e_y);
    } else {
      std::printf("  %-8s r=%-3lld FAILED\n", method_name(cell.method).c_str(),
                  static_cast<long long>(cell.r));
      std::cerr << "warning: " << method_name(cell.method) << " r=" << cell.r
                << " failed: " << cell.error << "\n";
    }
  }
}

int cmd_run_experiment(const ExperimentConfig& cfg, const std::string& out_flag, int jobs) {
  const PhSystem sys = build_model(cfg.model);
  const fs::path dir = resolve_output_dir(cfg, out_flag);
  for (const InputConfig& input : cfg.inputs) {
    ExperimentSettings settings = cfg.settings;
    settings.jobs = jobs;
    std::cout << "input " << input.label << ":\n";
    const ExperimentResult result =
        run_experiment(sys, make_input(input), cfg.grid, settings);
    report_cells(result);
    const fs::path errors_path = dir / output_name(cfg, "errors", input);
    const fs::path energy_path = dir / output_name(cfg, "energy", input);
    write_errors_csv(errors_path, result.cells);
    write_energy_csv(energy_path, result);
    std::cout << "wrote " << errors_path.string() << "\n";
    std::cout << "wrote " << energy_path.string() << "\n";
  }
  return 0;
}

int cmd_export_embedding(const ExperimentConfig& cfg, const std::string& out_flag) {
  const PhSystem sys = build_model(cfg.model);
  const fs::path dir = resolve_output_dir(cfg, out_flag);
  const ExperimentSettings& st = cfg.settings;
  const Index r = st.energy_r ? *st.energy_r : st.r_max;
  const bool want_qm =
      std::find(st.methods.begin(), st.methods.end(), RomMethod::GmgQm) != st.methods.end();
  const bool want_gmg_pod =
      std::find(st.methods.begin(), st.methods.end(), RomMethod::GmgPod) != st.methods.end();

  for (const InputConfig& input : cfg.inputs) {
    const Trajectory traj =
        simulate_ph(sys, make_input(input), sys.x0(), cfg.grid, st.newton);
    const Matrix x_snap = snapshot_matrices(sys, traj).first;

    auto emit = [&](const std::string& part, const Matrix& mat) {
      const fs::path path = dir / output_name(cfg, "embedding_" + part, input);
      write_matrix_csv(path, mat);
      std::cout << "wrote " << path.string() << " (" << mat.rows() << "x" << mat.cols()
                << ")\n";
    };

    if (want_qm) {
      const DeflatedPod pod = deflated_pod(x_snap, sys.B());
      double lambda = 0.0;
      if (st.lambda_reg) {
        lambda = *st.lambda_reg;
      } else if (st.lambda_rule) {
        lambda = std::max(st.lambda_rule->factor * linear_projection_error(pod, x_snap, r),
                          st.lambda_rule->floor);
      }
      const QuadraticEmbedding emb =
          quadratic_embedding_from_pod(pod, x_snap, r, st.r_n, lambda);
      emit("B", emb.B);
      emit("V1", emb.V1);
      emit("V2", emb.V2);
      emit("M", emb.M);
    } else if (want_gmg_pod) {
      const LinearEmbedding emb = build_linear_embedding(x_snap, sys.B(), r);
      emit("V", emb.V);
    } else {
      const LinearEmbedding emb = pod_embedding(x_snap, r);
      emit("V", emb.V);
    }
  }
  return 0;
}

int cmd_validate(const ExperimentConfig& cfg, unsigned seed) {
  const PhSystem sys = build_model(cfg.model);
  const std::vector<CheckResult> checks = validate_structure(sys, seed);
  bool all_pass = true;
  for (const CheckResult& check : checks) {
    std::printf("%s  %-42s %.3e\n", check.pass ? "PASS" : "FAIL", check.name.c_str(),
                check.value);
    all_pass = all_pass && check.pass;
  }
  std::cout << (all_pass ? "all checks passed" : "structural checks FAILED") << "\n";
  return all_pass ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"structure-preserving model reduction for port-Hamiltonian systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  unsigned seed = 1u;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    return sub;
  };

  CLI::App* sim = add_common(
      app.add_subcommand("simulate-fom", "integrate the full model, write trajectory CSV"));
  CLI::App* run = add_common(app.add_subcommand(
      "run-experiment", "run the (method, r) sweep, write error and energy CSVs"));
  run->add_option("--jobs", jobs, "parallel sweep cells (results identical at any count)")
      ->check(CLI::PositiveNumber);
  CLI::App* exp = add_common(app.add_subcommand(
      "export-embedding", "write the embedding matrices at the probe order"));
  CLI::App* val = add_common(
      app.add_subcommand("validate", "run structural invariant checks on the config's model"));
  val->add_option("--seed", seed, "seed for the randomized checks");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("phmor");
  for (const std::string& arg : args) {
    argv.push_back(arg.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    const ExperimentConfig cfg = load_config(config_path);
    if (app.got_subcommand(sim)) {
      return cmd_simulate_fom(cfg, out_dir);
    }
    if (app.got_subcommand(run)) {
      return cmd_run_experiment(cfg, out_dir, jobs);
    }
    if (app.got_subcommand(exp)) {
      return cmd_export_embedding(cfg, out_dir);
    }
    return cmd_validate(cfg, seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace phmor
