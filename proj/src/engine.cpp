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
#include "mwjoin/engine.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace mwjoin {

namespace {

std::size_t attr_index(const StateBackend& backend, const std::string& attr) {
  const auto& attrs = backend.key_attrs();
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i] == attr) return i;
  }
  throw std::invalid_argument("backend for stream " +
                              std::to_string(backend.stream()) +
                              " does not index attribute '" + attr + "'");
}

}  // namespace

ProbeOutcome probe_by_order(const Tuple& t, const ProbeSequence& order,
                            const JoinGraph& g, std::span<StateBackend> backends,
                            PairCounterMatrix& counters, ProbeTotals& totals,
                            ResultSink& sink) {
  struct Partial {
    const Tuple* bound[8] = {nullptr};
  };
  if (g.stream_count() > 8) {
    throw std::invalid_argument("probe supports at most 8 streams");
  }

  Partial seed;
  seed.bound[t.stream] = &t;
  std::vector<Partial> frontier{seed};
  std::vector<Partial> next;

  for (const ProbePair& pair : order.pairs) {
    const std::string& l_attr = g.attr_on(pair.edge, pair.l);
    const std::string& r_attr = g.attr_on(pair.edge, pair.r);
    StateBackend& target = backends[pair.r];
    const std::size_t r_attr_idx = attr_index(target, r_attr);

    next.clear();
    for (const Partial& partial : frontier) {
      const Value& key = partial.bound[pair.l]->key(l_attr);
      const auto matches = target.query(r_attr_idx, key);
      counters.at(pair.l, pair.r).record(matches.size());
      ++totals.queries;
      totals.records += matches.size();
      for (const StateBackend::Stored& stored : matches) {
        Partial extended = partial;
        extended.bound[pair.r] = &stored.tuple;
        next.push_back(extended);
      }
    }
    frontier.swap(next);
    if (frontier.empty()) return {0, true};  // early abort: no join possible
  }

  ProbeOutcome out;
  const std::uint32_t n = g.stream_count();
  for (const Partial& partial : frontier) {
    JoinResult result;
    result.emission_time = t.event_time;
    result.components.reserve(n);
    for (StreamId s = 0; s < n; ++s) {
      result.components.push_back(*partial.bound[s]);
    }
    ++out.emitted;
    if (!sink.on_result(result)) {
      out.sink_ok = false;
      return out;
    }
  }
  return out;
}

JoinEngine::JoinEngine(JoinGraph graph, EngineConfig config,
                       ProbeOrderTable initial_orders)
    : graph_(std::move(graph)),
      config_(std::move(config)),
      orders_(std::move(initial_orders)),
      counters_(graph_.stream_count()),
      history_(config_.history_length) {
  if (config_.optimization_period <= 0) {
    throw std::invalid_argument("optimization period must be positive");
  }
  if (graph_.stream_count() > 8) {
    throw std::invalid_argument("engine supports at most 8 streams");
  }
  if (!validate_table(graph_, orders_)) {
    throw std::invalid_argument("initial probe order table is invalid");
  }
  if (config_.backends.empty()) {
    config_.backends.assign(graph_.stream_count(), BackendConfig{});
  }
  if (config_.backends.size() != graph_.stream_count()) {
    throw std::invalid_argument("need one backend config per stream");
  }
  backends_.reserve(graph_.stream_count());
  for (StreamId i = 0; i < graph_.stream_count(); ++i) {
    backends_.emplace_back(i, config_.backends[i], graph_.attrs_of(i));
  }
  next_call_ = config_.optimization_period;
}

void JoinEngine::install_orders(ProbeOrderTable table) {
  if (!validate_table(graph_, table)) {
    throw std::invalid_argument("probe order table does not fit the join graph");
  }
  orders_ = std::move(table);
}

void JoinEngine::close_current_cycle() {
  CycleStats snap = close_cycle(cycles_closed_, counters_, backends_);
  ++cycles_closed_;
  if (observer_) observer_(snap);
  history_.append(std::move(snap));
  processed_at_last_close_ = tuples_processed_;
}

void JoinEngine::boundary(std::int64_t event_now) {
  for (StateBackend& b : backends_) {
    tuples_expired_ += b.remove_expired(event_now);
  }
  close_current_cycle();

  SelectInputs inputs{graph_,          history_,        orders_,
                      CostContext{config_.cost, config_.backends},
                      config_.smoothing, config_.priors,
                      config_.selectivity_metric};
  install_orders(select_order(config_.strategy, inputs));
  ++reoptimizations_;
}

std::size_t JoinEngine::process(const Tuple& t, ResultSink& sink) {
  if (t.stream >= graph_.stream_count()) {
    throw std::invalid_argument("tuple arrived for unknown stream " +
                                std::to_string(t.stream));
  }
  event_clock_ = std::max(event_clock_, t.event_time);

  if (config_.clock_mode == ClockMode::LogicalClock) {
    if (static_cast<std::int64_t>(tuples_processed_) >= next_call_) {
      boundary(event_clock_);
      next_call_ = static_cast<std::int64_t>(tuples_processed_) +
                   config_.optimization_period;
    }
  } else {
    const auto wall = std::chrono::steady_clock::now().time_since_epoch();
    const std::int64_t now_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(wall).count();
    if (!wall_armed_) {
      next_call_ = now_ms + config_.optimization_period;
      wall_armed_ = true;
    }
    if (now_ms >= next_call_) {
      boundary(event_clock_);
      next_call_ = now_ms + config_.optimization_period;
    }
  }

  backends_[t.stream].insert(t, t.event_time);
  const ProbeOutcome out =
      probe_by_order(t, orders_.orders[t.stream], graph_, backends_, counters_,
                     totals_, sink);
  ++tuples_processed_;
  results_emitted_ += out.emitted;
  if (!out.sink_ok) sink_failed_ = true;
  return out.emitted;
}

RunReport JoinEngine::run(std::span<const Tuple> source, ResultSink& sink) {
  RunReport rep;
  const auto t0 = std::chrono::steady_clock::now();
  for (const Tuple& t : source) {
    try {
      process(t, sink);
    } catch (const std::exception& e) {
      rep.completed = false;
      rep.error = e.what();
      break;
    }
    if (sink_failed_) {
      rep.completed = false;
      rep.error = "sink rejected a result";
      break;
    }
  }
  if (tuples_processed_ > processed_at_last_close_) {
    close_current_cycle();  // trailing partial cycle, no re-optimization
  }
  const auto t1 = std::chrono::steady_clock::now();

  rep.tuples_processed = tuples_processed_;
  rep.results_emitted = results_emitted_;
  rep.queries_issued = totals_.queries;
  rep.records_matched = totals_.records;
  rep.cycles_closed = cycles_closed_;
  rep.reoptimizations = reoptimizations_;
  rep.tuples_expired = tuples_expired_;
  rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return rep;
}

}  // namespace mwjoin
