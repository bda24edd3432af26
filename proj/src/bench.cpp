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
#include "mwjoin/bench.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mwjoin {

namespace {

using nlohmann::json;

json key_source_json(const KeySource& ks) {
  return json{{"probability", ks.probability},
              {"lo", ks.lo},
              {"hi", ks.hi},
              {"mode", ks.mode == KeySource::Mode::Sweep ? "sweep" : "uniform"},
              {"stride", ks.stride}};
}

json workload_json(const WorkloadSpec& w) {
  json out;
  if (w.type == WorkloadSpec::Type::Synthetic) {
    out["type"] = "synthetic";
    out["total_tuples"] = w.total_tuples;
    out["time_step_ms"] = w.time_step_ms;
    json streams = json::array();
    for (const StreamSpec& s : w.streams) {
      json js{{"stream", s.stream},
              {"key_attr", s.key_attr},
              {"weight", s.weight},
              {"burst", {s.burst_min, s.burst_max}}};
      js["key_sources"] = json::array();
      for (const KeySource& ks : s.key_sources) {
        js["key_sources"].push_back(key_source_json(ks));
      }
      js["drift"] = json::array();
      for (const DriftEvent& d : s.drift) {
        json jd{{"at_tuple", d.at_tuple}};
        if (d.weight) jd["weight"] = *d.weight;
        if (d.key_sources) {
          jd["key_sources"] = json::array();
          for (const KeySource& ks : *d.key_sources) {
            jd["key_sources"].push_back(key_source_json(ks));
          }
        }
        js["drift"].push_back(jd);
      }
      streams.push_back(js);
    }
    out["streams"] = streams;
  } else {
    out["type"] = "csv";
    out["shuffle_within"] = w.shuffle_within;
    out["time_step_ms"] = w.time_step_ms;
    json tables = json::array();
    for (const CsvTableSpec& t : w.tables) {
      tables.push_back(json{{"stream", t.stream},
                            {"path", t.path},
                            {"key_column", t.key_column}});
    }
    out["tables"] = tables;
  }
  return out;
}

json engine_json(const EngineConfig& e, std::int64_t T, std::size_t L) {
  json backends = json::array();
  for (const BackendConfig& b : e.backends) {
    backends.push_back(json{
        {"structure", b.structure == BackendStructure::HashTable ? "hash" : "sorted"},
        {"slot_count", b.slot_count},
        {"base_query_cost", b.base_query_cost},
        {"ttl_ms", b.ttl_ms}});
  }
  auto sp = [](const SmoothingParams& p) {
    json out{{"alpha", p.alpha}, {"beta", p.beta}, {"phi", p.phi}};
    if (p.clamp) out["clamp"] = {p.clamp->first, p.clamp->second};
    return out;
  };
  return json{
      {"optimization_period", T},
      {"history_length", L},
      {"clock_mode", e.clock_mode == ClockMode::LogicalClock ? "logical" : "wall"},
      {"cost", {{"alpha_q", e.cost.alpha_q}, {"alpha_m", e.cost.alpha_m}}},
      {"backends", backends},
      {"smoothing",
       {{"gamma", sp(e.smoothing.gamma)},
        {"mu", sp(e.smoothing.mu)},
        {"kappa", sp(e.smoothing.kappa)}}},
      {"priors",
       {{"gamma", e.priors.gamma}, {"mu", e.priors.mu}, {"kappa", e.priors.kappa}}},
      {"selectivity_metric",
       e.selectivity_metric == SelectivityMetric::Gamma ? "gamma" : "gamma_mu"}};
}

json graph_json(const ExperimentConfig& cfg) {
  json edges = json::array();
  for (const JoinEdge& e : cfg.graph.edges()) {
    edges.push_back(json{{"a", e.a}, {"b", e.b}, {"attr_a", e.attr_a},
                         {"attr_b", e.attr_b}});
  }
  return json{{"streams", cfg.stream_names}, {"edges", edges}};
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Cell {
  std::size_t strategy_idx;
  std::size_t order_idx;
  std::int64_t T;
  std::size_t L;
  std::uint64_t seed;
  std::size_t source_idx;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

InterleavedSource build_source(const WorkloadSpec& workload, const JoinGraph& graph,
                               std::uint64_t seed) {
  if (workload.type == WorkloadSpec::Type::Synthetic) {
    return generate(workload.streams, workload.total_tuples, seed,
                    workload.time_step_ms);
  }
  std::vector<std::vector<Tuple>> tables;
  std::uint64_t skipped = 0;
  for (const CsvTableSpec& t : workload.tables) {
    const auto attrs = graph.attrs_of(t.stream);
    if (attrs.empty()) {
      throw std::runtime_error("stream " + std::to_string(t.stream) +
                               " has no join attribute in the graph");
    }
    CsvLoadResult loaded = load_csv(t.path, t.stream, t.key_column, attrs.front());
    skipped += loaded.rows_skipped;
    tables.push_back(std::move(loaded.tuples));
  }
  InterleavedSource src = shuffle_interleave(std::move(tables), seed,
                                             workload.shuffle_within,
                                             workload.time_step_ms);
  src.rows_skipped = skipped;
  return src;
}

ProbeOrderTable derive_initial_orders(const std::vector<StreamId>& priority,
                                      const JoinGraph& g) {
  const std::uint32_t n = g.stream_count();
  if (priority.size() != n) {
    throw std::invalid_argument("initial order must list every stream once");
  }
  std::vector<std::uint32_t> rank(n, n);
  for (std::uint32_t i = 0; i < priority.size(); ++i) {
    if (priority[i] >= n || rank[priority[i]] != n) {
      throw std::invalid_argument("initial order is not a permutation");
    }
    rank[priority[i]] = i;
  }

  ProbeOrderTable table;
  table.orders.resize(n);
  for (StreamId start = 0; start < n; ++start) {
    ProbeSequence seq;
    seq.start = start;
    std::vector<bool> visited(n, false);
    visited[start] = true;
    for (std::uint32_t step = 0; step + 1 < n; ++step) {
      // highest-priority stream currently reachable from the visited set
      StreamId target = n;
      std::uint32_t best_rank = n;
      const ProbePair* via = nullptr;
      std::vector<ProbePair> frontier;
      const auto& edges = g.edges();
      for (std::uint32_t e = 0; e < edges.size(); ++e) {
        if (visited[edges[e].a] && !visited[edges[e].b]) {
          frontier.push_back({edges[e].a, edges[e].b, e});
        }
        if (visited[edges[e].b] && !visited[edges[e].a]) {
          frontier.push_back({edges[e].b, edges[e].a, e});
        }
      }
      for (const ProbePair& p : frontier) {
        if (rank[p.r] < best_rank) {
          best_rank = rank[p.r];
          target = p.r;
        }
      }
      for (const ProbePair& p : frontier) {
        if (p.r == target) {
          via = &p;
          break;  // first candidate in edge order probes the target
        }
      }
      if (via == nullptr) {
        throw std::runtime_error("join graph is not connected");
      }
      visited[target] = true;
      seq.pairs.push_back(*via);
    }
    table.orders[start] = seq;
  }
  return table;
}

std::string config_hash_hex(const ExperimentConfig& cfg, const std::string& strategy,
                            const std::string& order_name, std::int64_t T,
                            std::size_t L, std::uint64_t seed) {
  json doc{{"graph", graph_json(cfg)},
           {"workload", workload_json(cfg.workload)},
           {"engine", engine_json(cfg.engine, T, L)},
           {"strategy", strategy},
           {"initial_order", order_name},
           {"seed", seed}};
  std::ostringstream hex;
  hex << std::hex << fnv1a(doc.dump());
  return hex.str();
}

std::vector<CellResult> run_matrix(const ExperimentConfig& cfg,
                                   const MatrixOptions& opts) {
  const std::vector<std::int64_t> Ts =
      cfg.sweep_T.empty() ? std::vector<std::int64_t>{cfg.engine.optimization_period}
                          : cfg.sweep_T;
  const std::vector<std::size_t> Ls =
      cfg.sweep_L.empty() ? std::vector<std::size_t>{cfg.engine.history_length}
                          : cfg.sweep_L;

  // one source per seed, shared read-only across the grid
  std::vector<InterleavedSource> sources;
  sources.reserve(cfg.seeds.size());
  for (std::uint64_t seed : cfg.seeds) {
    sources.push_back(build_source(cfg.workload, cfg.graph, seed));
  }

  std::vector<Cell> cells;
  for (std::size_t oi = 0; oi < cfg.initial_orders.size(); ++oi) {
    for (std::int64_t T : Ts) {
      for (std::size_t L : Ls) {
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
          for (std::size_t sti = 0; sti < cfg.strategies.size(); ++sti) {
            cells.push_back({sti, oi, T, L, cfg.seeds[si], si});
          }
        }
      }
    }
  }

  if (opts.write_files) {
    std::filesystem::create_directories(opts.out_dir);
  }

  std::vector<CellResult> results(cells.size());

#ifdef _OPENMP
  const int thread_count = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(thread_count)
#endif
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& cell = cells[i];
    CellResult& out = results[i];
    out.strategy = std::string(to_string(cfg.strategies[cell.strategy_idx]));
    out.initial_order = cfg.initial_order_names[cell.order_idx];
    out.T = cell.T;
    out.L = cell.L;
    out.seed = cell.seed;
    out.config_hash =
        config_hash_hex(cfg, out.strategy, out.initial_order, cell.T, cell.L,
                        cell.seed);
    try {
      EngineConfig ec = cfg.engine;
      ec.optimization_period = cell.T;
      ec.history_length = cell.L;
      ec.strategy = cfg.strategies[cell.strategy_idx];

      JoinEngine engine(cfg.graph, ec,
                        derive_initial_orders(cfg.initial_orders[cell.order_idx],
                                              cfg.graph));

      std::ofstream stats_out;
      if (cfg.dump_cycle_stats && opts.write_files) {
        out.stats_path = opts.out_dir + "/cycle_stats_" + std::to_string(i) + ".csv";
        stats_out.open(out.stats_path);
        stats_out << "cycle,l,r,q,m,s,gamma,mu,kappa_l,kappa_r\n";
        engine.set_cycle_observer([&stats_out](const CycleStats& snap) {
          for (StreamId l = 0; l < snap.streams; ++l) {
            for (StreamId r = 0; r < snap.streams; ++r) {
              const PairCounters& c = snap.raw_at(l, r);
              if (c.q == 0) continue;
              stats_out << snap.cycle_index << ',' << l << ',' << r << ',' << c.q
                        << ',' << c.m << ',' << c.s << ',';
              if (auto g = snap.gamma_at(l, r)) stats_out << *g;
              stats_out << ',';
              if (auto m = snap.mu_at(l, r)) stats_out << *m;
              stats_out << ',' << snap.kappa[l] << ',' << snap.kappa[r] << '\n';
            }
          }
        });
      }

      BlackholeSink sink;
      out.report = engine.run(sources[cell.source_idx].tuples, sink);
      out.ok = out.report.completed;
      out.error = out.report.error;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
  }

  if (opts.write_files) {
    write_results_csv(results, opts.out_dir + "/" + cfg.results_csv);
    write_summary_json(results, opts.out_dir + "/" + cfg.summary_json);
  }
  return results;
}

bool all_cells_ok(const std::vector<CellResult>& cells) {
  return std::all_of(cells.begin(), cells.end(),
                     [](const CellResult& c) { return c.ok; });
}

void write_results_csv(const std::vector<CellResult>& cells,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results CSV: " + path);
  out << "strategy,initial_order,T,L,seed,tuples,results,queries,matches,"
         "probe_work,wall_ms,config_hash,status\n";
  for (const CellResult& c : cells) {
    out << c.strategy << ',' << c.initial_order << ',' << c.T << ',' << c.L << ','
        << c.seed << ',' << c.report.tuples_processed << ','
        << c.report.results_emitted << ',' << c.report.queries_issued << ','
        << c.report.records_matched << ',' << c.report.probe_work() << ','
        << c.report.wall_ms << ',' << c.config_hash << ','
        << (c.ok ? std::string("ok") : "error:" + csv_escape(c.error)) << '\n';
  }
}

void write_summary_json(const std::vector<CellResult>& cells,
                        const std::string& path) {
  // reductions vs the fixedOrder run of the same (order, T, L, seed) cell
  using CellKey = std::tuple<std::string, std::int64_t, std::size_t, std::uint64_t>;
  std::map<CellKey, double> baseline;
  for (const CellResult& c : cells) {
    if (c.strategy == "fixedOrder" && c.ok) {
      baseline[{c.initial_order, c.T, c.L, c.seed}] =
          static_cast<double>(c.report.probe_work());
    }
  }

  std::map<std::string, std::vector<double>> reductions;
  std::map<std::string, std::vector<double>> probe_work;
  for (const CellResult& c : cells) {
    if (!c.ok) continue;
    probe_work[c.strategy].push_back(static_cast<double>(c.report.probe_work()));
    if (c.strategy == "fixedOrder") continue;
    auto it = baseline.find({c.initial_order, c.T, c.L, c.seed});
    if (it == baseline.end() || it->second <= 0) continue;
    reductions[c.strategy].push_back(
        1.0 - static_cast<double>(c.report.probe_work()) / it->second);
  }

  json strategies = json::object();
  for (const auto& [name, works] : probe_work) {
    json entry{{"runs", works.size()},
               {"median_probe_work", median(works)}};
    auto rit = reductions.find(name);
    if (rit != reductions.end() && !rit->second.empty()) {
      double mean = 0;
      for (double r : rit->second) mean += r;
      mean /= static_cast<double>(rit->second.size());
      entry["mean_reduction_vs_fixedOrder"] = mean;
      entry["median_reduction_vs_fixedOrder"] = median(rit->second);
    }
    strategies[name] = entry;
  }

  json doc{{"baseline", "fixedOrder"},
           {"cells", cells.size()},
           {"strategies", strategies}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary JSON: " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace mwjoin
