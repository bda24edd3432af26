/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mwjoin/bench.hpp"

namespace {

using namespace mwjoin;

int run_grid(const ExperimentConfig& cfg, const MatrixOptions& opts) {
  const std::vector<CellResult> cells = run_matrix(cfg, opts);
  std::size_t failed = 0;
  for (const CellResult& c : cells) {
    if (!c.ok) {
      ++failed;
      std::cerr << "cell failed: " << c.strategy << " " << c.initial_order
                << " T=" << c.T << " L=" << c.L << " seed=" << c.seed << ": "
                << c.error << "\n";
    }
  }
  std::cout << cells.size() - failed << "/" << cells.size() << " cells ok, results in "
            << opts.out_dir << "/" << cfg.results_csv << "\n";
  return failed == 0 ? 0 : 1;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int threads,
            bool cycle_stats) {
  ExperimentConfig cfg = load_experiment_file(config_path);
  if (cycle_stats) cfg.dump_cycle_stats = true;
  MatrixOptions opts;
  opts.out_dir = out_dir;
  opts.threads = threads;
  return run_grid(cfg, opts);
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<std::int64_t>& values, const std::string& out_dir,
              int threads) {
  ExperimentConfig cfg = load_experiment_file(config_path);
  cfg.sweep_T.clear();
  cfg.sweep_L.clear();
  if (param == "T") {
    cfg.sweep_T = values;
  } else if (param == "L") {
    for (std::int64_t v : values) {
      if (v < 1) throw std::runtime_error("history length values must be >= 1");
      cfg.sweep_L.push_back(static_cast<std::size_t>(v));
    }
  } else {
    throw std::runtime_error("sweep parameter must be T or L");
  }
  MatrixOptions opts;
  opts.out_dir = out_dir;
  opts.threads = threads;
  return run_grid(cfg, opts);
}

int cmd_gen(const std::string& config_path, const std::string& out_path,
            std::uint64_t seed) {
  ExperimentConfig cfg = load_experiment_file(config_path);
  const InterleavedSource src = build_source(cfg.workload, cfg.graph, seed);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write source dump: " + out_path);
  for (std::size_t i = 0; i < src.tuples.size(); ++i) {
    const Tuple& t = src.tuples[i];
    nlohmann::json keys = nlohmann::json::object();
    for (const auto& [attr, v] : t.key_values) {
      if (std::holds_alternative<std::int64_t>(v)) {
        keys[attr] = std::get<std::int64_t>(v);
      } else {
        keys[attr] = std::get<std::string>(v);
      }
    }
    nlohmann::json line{{"i", i},
                        {"stream", cfg.stream_names[t.stream]},
                        {"event_time", t.event_time},
                        {"keys", keys}};
    out << line.dump() << '\n';
  }
  std::cout << "wrote " << src.tuples.size() << " records to " << out_path;
  if (src.rows_skipped > 0) {
    std::cout << " (" << src.rows_skipped << " rows skipped)";
  }
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-way stream join benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string out_path = "source.ndjson";
  std::string param;
  std::vector<std::int64_t> values;
  std::uint64_t seed = 1;
  int threads = 0;
  bool cycle_stats = false;

  CLI::App* run = app.add_subcommand("run", "execute the configured experiment grid");
  run->add_option("--config", config_path, "experiment config JSON")->required();
  run->add_option("--out-dir", out_dir, "directory for results.csv / summary.json");
  run->add_option("--threads", threads, "parallel grid cells (0 = all cores)");
  run->add_flag("--cycle-stats", cycle_stats, "dump per-cycle statistics CSVs");

  CLI::App* sweep = app.add_subcommand("sweep", "sweep the optimization period or history length");
  sweep->add_option("--config", config_path, "experiment config JSON")->required();
  sweep->add_option("--param", param, "T (period) or L (history length)")->required();
  sweep->add_option("--values", values, "sweep values")->required()->delimiter(',');
  sweep->add_option("--out-dir", out_dir, "directory for results.csv / summary.json");
  sweep->add_option("--threads", threads, "parallel grid cells (0 = all cores)");

  CLI::App* gen = app.add_subcommand("gen", "dump the generated arrival sequence");
  gen->add_option("--spec", config_path, "experiment config JSON")->required();
  gen->add_option("--out", out_path, "newline-delimited output file");
  gen->add_option("--seed", seed, "workload seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, threads, cycle_stats);
    if (sweep->parsed()) return cmd_sweep(config_path, param, values, out_dir, threads);
    if (gen->parsed()) return cmd_gen(config_path, out_path, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
