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
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mwjoin/engine.hpp"
#include "mwjoin/join_model.hpp"
#include "mwjoin/optimizer.hpp"
#include "mwjoin/workload.hpp"

namespace mwjoin {

struct CsvTableSpec {
  StreamId stream = 0;
  std::string path;
  std::string key_column;
};

struct WorkloadSpec {
  enum class Type { Synthetic, Csv } type = Type::Synthetic;

  // synthetic
  std::vector<StreamSpec> streams;
  std::uint64_t total_tuples = 0;
  std::int64_t time_step_ms = 1;

  // csv
  std::vector<CsvTableSpec> tables;
  bool shuffle_within = false;
};

/// Full experiment description: graph, workload, the strategy/initial-order
/// grid, engine parameters, optional period and history-length sweeps, and
/// output paths.
struct ExperimentConfig {
  std::vector<std::string> stream_names;
  JoinGraph graph{2, {}};
  WorkloadSpec workload;
  std::vector<Strategy> strategies;
  std::vector<std::vector<StreamId>> initial_orders;  // permutations by priority
  std::vector<std::string> initial_order_names;
  EngineConfig engine;
  std::vector<std::int64_t> sweep_T;  // empty = just engine.optimization_period
  std::vector<std::size_t> sweep_L;   // empty = just engine.history_length
  std::vector<std::uint64_t> seeds{1};

  std::string results_csv = "results.csv";
  std::string summary_json = "summary.json";
  bool dump_cycle_stats = false;
};

ExperimentConfig load_experiment_file(const std::string& path);
ExperimentConfig load_experiment_json(const std::string& json_text);

/// Builds the arrival sequence for one seed. Identical seeds produce
/// byte-identical sources; sweep parameters do not touch the workload.
InterleavedSource build_source(const WorkloadSpec& workload, const JoinGraph& graph,
                               std::uint64_t seed);

/// Expands a priority permutation of streams into one valid probe sequence
/// per start stream: remaining streams are visited in priority order,
/// deferring any stream not yet reachable through the join graph until the
/// frontier reaches it.
ProbeOrderTable derive_initial_orders(const std::vector<StreamId>& priority,
                                      const JoinGraph& g);

/// Parses an order name like "CuCrWrSr" (or one stream name per '>' token)
/// into a priority permutation.
std::vector<StreamId> parse_order_name(const std::string& name,
                                       const std::vector<std::string>& stream_names);

struct CellResult {
  std::string strategy;
  std::string initial_order;
  std::int64_t T = 0;
  std::size_t L = 0;
  std::uint64_t seed = 0;
  RunReport report;
  std::string config_hash;
  std::string stats_path;  // per-cycle dump, when enabled
  bool ok = false;
  std::string error;
};

struct MatrixOptions {
  std::string out_dir = ".";
  int threads = 0;  // 0 = runtime default
  bool write_files = true;
};

/// Executes the strategy x initial-order x sweep x seed grid. Cells are
/// independent engine instances and run in parallel; per-cell failures are
/// recorded in the row without aborting the rest of the grid. Writes
/// results CSV and summary JSON unless write_files is off.
std::vector<CellResult> run_matrix(const ExperimentConfig& cfg,
                                   const MatrixOptions& opts = {});

bool all_cells_ok(const std::vector<CellResult>& cells);

void write_results_csv(const std::vector<CellResult>& cells, const std::string& path);

/// Per-strategy mean/median probe-work reduction versus the fixedOrder
/// rows of matching (order, T, L, seed) cells.
void write_summary_json(const std::vector<CellResult>& cells, const std::string& path);

/// FNV-1a over the canonical serialization of one cell's full configuration.
std::string config_hash_hex(const ExperimentConfig& cfg, const std::string& strategy,
                            const std::string& order_name, std::int64_t T,
                            std::size_t L, std::uint64_t seed);

}  // namespace mwjoin
