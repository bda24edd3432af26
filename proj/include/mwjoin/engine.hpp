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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mwjoin/forecast.hpp"
#include "mwjoin/join_model.hpp"
#include "mwjoin/optimizer.hpp"
#include "mwjoin/state_backend.hpp"
#include "mwjoin/stats.hpp"

namespace mwjoin {

/// LogicalClock counts the optimization period in tuples processed and is
/// fully deterministic; WallClock measures it in elapsed milliseconds.
/// TTL expiry always runs against tuple event time in both modes.
enum class ClockMode { LogicalClock, WallClock };

struct EngineConfig {
  std::int64_t optimization_period = 5000;  // tuples (logical) or ms (wall)
  std::size_t history_length = 10;
  Strategy strategy = Strategy::dpPick;
  CostParams cost;
  SmoothingSet smoothing = default_smoothing();
  StatPriors priors;
  SelectivityMetric selectivity_metric = SelectivityMetric::Gamma;
  ClockMode clock_mode = ClockMode::LogicalClock;
  std::vector<BackendConfig> backends;  // per stream; empty = defaults everywhere
};

/// A fully joined row: one tuple per stream, indexed by StreamId.
struct JoinResult {
  std::vector<Tuple> components;
  std::int64_t emission_time = 0;
};

/// Consumes emitted results. Returning false aborts the run with a partial
/// report. May be drained concurrently by the caller; the engine only calls
/// on_result from its processing context.
class ResultSink {
 public:
  virtual ~ResultSink() = default;
  virtual bool on_result(const JoinResult& result) = 0;
};

/// Counts results and drops them.
class BlackholeSink final : public ResultSink {
 public:
  bool on_result(const JoinResult&) override {
    ++count_;
    return true;
  }
  std::uint64_t count() const { return count_; }

 private:
  std::uint64_t count_ = 0;
};

/// Keeps every result; for tests and small runs.
class CollectingSink final : public ResultSink {
 public:
  bool on_result(const JoinResult& r) override {
    results.push_back(r);
    return true;
  }
  std::vector<JoinResult> results;
};

struct RunReport {
  std::uint64_t tuples_processed = 0;
  std::uint64_t results_emitted = 0;
  std::uint64_t queries_issued = 0;
  std::uint64_t records_matched = 0;  // records returned across all queries
  std::uint64_t cycles_closed = 0;
  std::uint64_t reoptimizations = 0;
  std::uint64_t tuples_expired = 0;
  double wall_ms = 0.0;
  bool completed = true;
  std::string error;

  /// Deterministic runtime proxy: lookups issued plus records they returned.
  std::uint64_t probe_work() const { return queries_issued + records_matched; }
};

struct ProbeTotals {
  std::uint64_t queries = 0;
  std::uint64_t records = 0;
};

struct ProbeOutcome {
  std::size_t emitted = 0;
  bool sink_ok = true;
};

/// Iterative probe of one arrival along its probe sequence. Keeps a frontier
/// of partial results seeded with t; each pair looks up every partial's
/// l-binding key in stream r's state, recording one query per partial.
/// Partials without matches are dropped; an empty frontier stops the chain
/// early. Survivors of all pairs are emitted.
/// Precondition: t is already inserted into its own backend and
/// order.start == t.stream.
ProbeOutcome probe_by_order(const Tuple& t, const ProbeSequence& order,
                            const JoinGraph& g, std::span<StateBackend> backends,
                            PairCounterMatrix& counters, ProbeTotals& totals,
                            ResultSink& sink);

/// The operator runtime: per-arrival insert + probe, cycle statistics,
/// TTL expiry and probe-order re-optimization on the configured period.
///
/// Single logical mutator: one context owns the backends, counters and the
/// active order table. Boundary work (expiry, cycle close, re-optimization,
/// order install) runs between arrivals, never mid-probe, with the expiry
/// cutoff evaluated at the arriving tuple's event time.
class JoinEngine {
 public:
  using CycleObserver = std::function<void(const CycleStats&)>;

  JoinEngine(JoinGraph graph, EngineConfig config, ProbeOrderTable initial_orders);

  /// Processes one arrival; returns the number of results emitted.
  /// Throws std::invalid_argument for tuples on unknown streams.
  std::size_t process(const Tuple& t, ResultSink& sink);

  /// Drives process() over the whole source, closes the trailing partial
  /// cycle, and reports totals since construction. Malformed input and sink
  /// rejection end the run early with completed=false.
  RunReport run(std::span<const Tuple> source, ResultSink& sink);

  /// Swaps in a new order table between arrivals. Rejects tables that do
  /// not validate against the graph.
  void install_orders(ProbeOrderTable table);

  const ProbeOrderTable& orders() const { return orders_; }
  const JoinGraph& graph() const { return graph_; }
  const StatHistory& history() const { return history_; }
  std::span<const StateBackend> backends() const { return backends_; }

  /// Called with each closed cycle's snapshot (boundary and trailing ones).
  void set_cycle_observer(CycleObserver observer) { observer_ = std::move(observer); }

 private:
  void close_current_cycle();
  void boundary(std::int64_t event_now);
  bool sink_failed_ = false;

  JoinGraph graph_;
  EngineConfig config_;
  ProbeOrderTable orders_;
  std::vector<StateBackend> backends_;
  PairCounterMatrix counters_;
  StatHistory history_;
  CycleObserver observer_;

  std::int64_t event_clock_ = 0;
  std::int64_t next_call_ = 0;
  bool wall_armed_ = false;
  std::uint64_t processed_at_last_close_ = 0;

  // run totals
  std::uint64_t tuples_processed_ = 0;
  std::uint64_t results_emitted_ = 0;
  std::uint64_t cycles_closed_ = 0;
  std::uint64_t reoptimizations_ = 0;
  std::uint64_t tuples_expired_ = 0;
  ProbeTotals totals_;
};

}  // namespace mwjoin
