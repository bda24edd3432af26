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
#include <stdexcept>

#include "json.hpp"
#include "mwjoin/bench.hpp"

namespace mwjoin {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("experiment config: " + msg);
}

StreamId stream_by_name(const std::vector<std::string>& names, const std::string& n) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == n) return static_cast<StreamId>(i);
  }
  fail("unknown stream name '" + n + "'");
}

BackendConfig parse_backend(const json& j, BackendConfig base) {
  if (j.contains("structure")) {
    const std::string s = j["structure"].get<std::string>();
    if (s == "hash") {
      base.structure = BackendStructure::HashTable;
    } else if (s == "sorted") {
      base.structure = BackendStructure::SortedArray;
    } else {
      fail("backend structure must be 'hash' or 'sorted'");
    }
  }
  if (j.contains("slot_count")) base.slot_count = j["slot_count"].get<std::uint64_t>();
  if (j.contains("base_query_cost")) {
    base.base_query_cost = j["base_query_cost"].get<double>();
  }
  if (j.contains("ttl_ms")) base.ttl_ms = j["ttl_ms"].get<std::int64_t>();
  return base;
}

SmoothingParams parse_smoothing(const json& j, SmoothingParams base) {
  if (j.contains("alpha")) base.alpha = j["alpha"].get<double>();
  if (j.contains("beta")) base.beta = j["beta"].get<double>();
  if (j.contains("phi")) base.phi = j["phi"].get<double>();
  if (j.contains("clamp")) {
    base.clamp = {{j["clamp"].at(0).get<double>(), j["clamp"].at(1).get<double>()}};
  }
  return base;
}

KeySource parse_key_source(const json& j) {
  KeySource ks;
  if (j.contains("probability")) ks.probability = j["probability"].get<double>();
  ks.lo = j.at("lo").get<std::int64_t>();
  ks.hi = j.at("hi").get<std::int64_t>();
  if (j.contains("mode")) {
    const std::string m = j["mode"].get<std::string>();
    if (m == "uniform") {
      ks.mode = KeySource::Mode::Uniform;
    } else if (m == "sweep") {
      ks.mode = KeySource::Mode::Sweep;
    } else {
      fail("key source mode must be 'uniform' or 'sweep'");
    }
  }
  if (j.contains("stride")) ks.stride = j["stride"].get<std::int64_t>();
  return ks;
}

}  // namespace

std::vector<StreamId> parse_order_name(const std::string& name,
                                       const std::vector<std::string>& stream_names) {
  std::vector<StreamId> out;
  std::size_t pos = 0;
  while (pos < name.size()) {
    if (name[pos] == '>' || name[pos] == ' ') {
      ++pos;
      continue;
    }
    // longest stream-name match at this position
    std::size_t best_len = 0;
    StreamId best_id = 0;
    for (std::size_t i = 0; i < stream_names.size(); ++i) {
      const std::string& sn = stream_names[i];
      if (sn.size() > best_len && name.compare(pos, sn.size(), sn) == 0) {
        best_len = sn.size();
        best_id = static_cast<StreamId>(i);
      }
    }
    if (best_len == 0) {
      fail("cannot parse initial order '" + name + "' at position " +
           std::to_string(pos));
    }
    out.push_back(best_id);
    pos += best_len;
  }
  if (out.size() != stream_names.size()) {
    fail("initial order '" + name + "' is not a permutation of all streams");
  }
  std::vector<bool> seen(stream_names.size(), false);
  for (StreamId s : out) {
    if (seen[s]) fail("initial order '" + name + "' repeats a stream");
    seen[s] = true;
  }
  return out;
}

ExperimentConfig load_experiment_json(const std::string& json_text) {
  const json doc = json::parse(json_text);
  ExperimentConfig cfg;

  // graph
  const json& jg = doc.at("graph");
  cfg.stream_names = jg.at("streams").get<std::vector<std::string>>();
  if (cfg.stream_names.size() < 2) fail("need at least two streams");
  std::vector<JoinEdge> edges;
  for (const json& je : jg.at("edges")) {
    JoinEdge e;
    e.a = stream_by_name(cfg.stream_names, je.at("a").get<std::string>());
    e.b = stream_by_name(cfg.stream_names, je.at("b").get<std::string>());
    if (je.contains("attr")) {
      e.attr_a = e.attr_b = je["attr"].get<std::string>();
    } else {
      e.attr_a = je.at("attr_a").get<std::string>();
      e.attr_b = je.at("attr_b").get<std::string>();
    }
    edges.push_back(std::move(e));
  }
  cfg.graph = JoinGraph(static_cast<std::uint32_t>(cfg.stream_names.size()),
                        std::move(edges));
  if (!cfg.graph.connected()) fail("join graph must be connected");
  if (cfg.graph.stream_count() > 8) fail("at most 8 streams are supported");

  // engine
  if (doc.contains("engine")) {
    const json& je = doc["engine"];
    if (je.contains("optimization_period")) {
      cfg.engine.optimization_period = je["optimization_period"].get<std::int64_t>();
    }
    if (je.contains("history_length")) {
      cfg.engine.history_length = je["history_length"].get<std::size_t>();
    }
    if (je.contains("clock_mode")) {
      const std::string m = je["clock_mode"].get<std::string>();
      if (m == "logical") {
        cfg.engine.clock_mode = ClockMode::LogicalClock;
      } else if (m == "wall") {
        cfg.engine.clock_mode = ClockMode::WallClock;
      } else {
        fail("clock_mode must be 'logical' or 'wall'");
      }
    }
    if (je.contains("cost")) {
      cfg.engine.cost.alpha_q = je["cost"].value("alpha_q", 1.0);
      cfg.engine.cost.alpha_m = je["cost"].value("alpha_m", 1.0);
      if (cfg.engine.cost.alpha_q == 0.0 && cfg.engine.cost.alpha_m == 0.0) {
        fail("cost coefficients cannot both be zero");
      }
      if (cfg.engine.cost.alpha_q < 0.0 || cfg.engine.cost.alpha_m < 0.0) {
        fail("cost coefficients must be non-negative");
      }
    }
    BackendConfig base;
    if (je.contains("backend")) base = parse_backend(je["backend"], base);
    cfg.engine.backends.assign(cfg.graph.stream_count(), base);
    if (je.contains("backends")) {
      for (const auto& [name, jb] : je["backends"].items()) {
        cfg.engine.backends[stream_by_name(cfg.stream_names, name)] =
            parse_backend(jb, base);
      }
    }
    if (je.contains("smoothing")) {
      const json& js = je["smoothing"];
      if (js.contains("gamma")) {
        cfg.engine.smoothing.gamma =
            parse_smoothing(js["gamma"], cfg.engine.smoothing.gamma);
      }
      if (js.contains("mu")) {
        cfg.engine.smoothing.mu = parse_smoothing(js["mu"], cfg.engine.smoothing.mu);
      }
      if (js.contains("kappa")) {
        cfg.engine.smoothing.kappa =
            parse_smoothing(js["kappa"], cfg.engine.smoothing.kappa);
      }
    }
    if (je.contains("priors")) {
      cfg.engine.priors.gamma = je["priors"].value("gamma", 0.5);
      cfg.engine.priors.mu = je["priors"].value("mu", 1.0);
      cfg.engine.priors.kappa = je["priors"].value("kappa", 0.0);
    }
    if (je.contains("selectivity_metric")) {
      const std::string m = je["selectivity_metric"].get<std::string>();
      if (m == "gamma") {
        cfg.engine.selectivity_metric = SelectivityMetric::Gamma;
      } else if (m == "gamma_mu") {
        cfg.engine.selectivity_metric = SelectivityMetric::GammaTimesMu;
      } else {
        fail("selectivity_metric must be 'gamma' or 'gamma_mu'");
      }
    }
  } else {
    cfg.engine.backends.assign(cfg.graph.stream_count(), BackendConfig{});
  }
  if (cfg.engine.optimization_period <= 0) fail("optimization period must be > 0");
  if (cfg.engine.history_length == 0) fail("history length must be >= 1");

  // workload
  const json& jw = doc.at("workload");
  const std::string wtype = jw.value("type", std::string("synthetic"));
  if (wtype == "synthetic") {
    cfg.workload.type = WorkloadSpec::Type::Synthetic;
    cfg.workload.total_tuples = jw.at("total_tuples").get<std::uint64_t>();
    cfg.workload.time_step_ms = jw.value("time_step_ms", std::int64_t{1});
    for (const json& js : jw.at("streams")) {
      StreamSpec spec;
      spec.stream =
          stream_by_name(cfg.stream_names, js.at("stream").get<std::string>());
      const auto attrs = cfg.graph.attrs_of(spec.stream);
      spec.key_attr = js.contains("key_attr") ? js["key_attr"].get<std::string>()
                                              : attrs.at(0);
      spec.weight = js.value("weight", 1.0);
      for (const json& jks : js.at("key_sources")) {
        spec.key_sources.push_back(parse_key_source(jks));
      }
      if (js.contains("burst")) {
        spec.burst_min = js["burst"].at(0).get<std::uint32_t>();
        spec.burst_max = js["burst"].at(1).get<std::uint32_t>();
      }
      if (js.contains("drift")) {
        for (const json& jd : js["drift"]) {
          DriftEvent ev;
          if (jd.contains("at_tuple")) {
            ev.at_tuple = jd["at_tuple"].get<std::uint64_t>();
          } else {
            // cycle indices are pinned against the base period at load time,
            // so sweeping the period later cannot change the workload bytes
            ev.at_tuple = jd.at("at_cycle").get<std::uint64_t>() *
                          static_cast<std::uint64_t>(cfg.engine.optimization_period);
          }
          if (jd.contains("weight")) ev.weight = jd["weight"].get<double>();
          if (jd.contains("key_sources")) {
            std::vector<KeySource> sources;
            for (const json& jks : jd["key_sources"]) {
              sources.push_back(parse_key_source(jks));
            }
            ev.key_sources = std::move(sources);
          }
          spec.drift.push_back(std::move(ev));
        }
      }
      cfg.workload.streams.push_back(std::move(spec));
    }
  } else if (wtype == "csv") {
    cfg.workload.type = WorkloadSpec::Type::Csv;
    cfg.workload.shuffle_within = jw.value("shuffle_within", false);
    cfg.workload.time_step_ms = jw.value("time_step_ms", std::int64_t{1});
    for (const json& jt : jw.at("tables")) {
      CsvTableSpec t;
      t.stream = stream_by_name(cfg.stream_names, jt.at("stream").get<std::string>());
      t.path = jt.at("path").get<std::string>();
      t.key_column = jt.at("key_column").get<std::string>();
      cfg.workload.tables.push_back(std::move(t));
    }
  } else {
    fail("workload type must be 'synthetic' or 'csv'");
  }

  // grid
  for (const json& js : doc.at("strategies")) {
    cfg.strategies.push_back(strategy_from_string(js.get<std::string>()));
  }
  if (cfg.strategies.empty()) fail("need at least one strategy");
  for (const json& jo : doc.at("initial_orders")) {
    std::vector<StreamId> perm;
    std::string name;
    if (jo.is_string()) {
      name = jo.get<std::string>();
      perm = parse_order_name(name, cfg.stream_names);
    } else {
      for (const json& jn : jo) {
        perm.push_back(stream_by_name(cfg.stream_names, jn.get<std::string>()));
        name += jn.get<std::string>();
      }
      if (perm.size() != cfg.stream_names.size()) {
        fail("initial order must cover all streams");
      }
    }
    cfg.initial_orders.push_back(std::move(perm));
    cfg.initial_order_names.push_back(std::move(name));
  }
  if (cfg.initial_orders.empty()) fail("need at least one initial order");

  if (doc.contains("sweeps")) {
    if (doc["sweeps"].contains("T")) {
      cfg.sweep_T = doc["sweeps"]["T"].get<std::vector<std::int64_t>>();
    }
    if (doc["sweeps"].contains("L")) {
      cfg.sweep_L = doc["sweeps"]["L"].get<std::vector<std::size_t>>();
    }
  }
  if (doc.contains("seeds")) {
    cfg.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty()) fail("seed list cannot be empty");
  }
  if (doc.contains("output")) {
    cfg.results_csv = doc["output"].value("results_csv", cfg.results_csv);
    cfg.summary_json = doc["output"].value("summary_json", cfg.summary_json);
    cfg.dump_cycle_stats = doc["output"].value("cycle_stats", false);
  }
  return cfg;
}

ExperimentConfig load_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open experiment config: " + path);
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return load_experiment_json(text);
}

}  // namespace mwjoin
