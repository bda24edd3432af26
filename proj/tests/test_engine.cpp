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
#include <random>

#include <stdexcept>

#include "doctest.h"
#include "mwjoin/bench.hpp"
#include "mwjoin/engine.hpp"
#include "oracle.hpp"

using namespace mwjoin;
namespace mt = mwjoin::testing;

namespace {

Tuple arrival(StreamId stream, std::int64_t key, std::int64_t when,
                 std::string payload) {
  Tuple t;
  t.stream = stream;
  t.key_values["k"] = Value{key};
  t.event_time = when;
  t.payload = std::move(payload);
  return t;
}

std::vector<StreamId> identity_perm(std::uint32_t n) {
  std::vector<StreamId> p(n);
  for (StreamId i = 0; i < n; ++i) p[i] = i;
  return p;
}

EngineConfig basic_config(std::uint32_t n, std::int64_t period,
                          std::int64_t ttl = 1'000'000) {
  EngineConfig cfg;
  cfg.optimization_period = period;
  cfg.history_length = 8;
  cfg.strategy = Strategy::fixedOrder;
  BackendConfig b;
  b.ttl_ms = ttl;
  cfg.backends.assign(n, b);
  return cfg;
}

JoinEngine make_engine(const JoinGraph& g, EngineConfig cfg) {
  return JoinEngine(g, std::move(cfg),
                    derive_initial_orders(identity_perm(g.stream_count()), g));
}

void check_against_oracle(const JoinGraph& g, const std::vector<Tuple>& source,
                          std::int64_t period, const std::vector<std::int64_t>& ttls,
                          Strategy strategy) {
  EngineConfig cfg = basic_config(g.stream_count(), period);
  cfg.strategy = strategy;
  for (std::size_t i = 0; i < ttls.size(); ++i) cfg.backends[i].ttl_ms = ttls[i];

  JoinEngine engine = make_engine(g, cfg);
  CollectingSink sink;
  const RunReport rep = engine.run(source, sink);
  REQUIRE(rep.completed);

  const auto expected = mt::nested_loop_oracle(g, source, period, ttls);
  CHECK(rep.results_emitted == expected.size());
  CHECK(mt::same_result_multiset(mt::signatures_of(sink.results), expected));
}

}  // namespace

TEST_CASE("empty source yields an empty completed report") {
  const JoinGraph g(2, {{0, 1, "k", "k"}});
  JoinEngine engine = make_engine(g, basic_config(2, 100));
  BlackholeSink sink;
  const RunReport rep = engine.run({}, sink);
  CHECK(rep.completed);
  CHECK(rep.tuples_processed == 0);
  CHECK(rep.results_emitted == 0);
  CHECK(rep.cycles_closed == 0);
}

TEST_CASE("two streams with one matching tuple each join once, either order") {
  const JoinGraph g(2, {{0, 1, "k", "k"}});
  for (bool zero_first : {true, false}) {
    JoinEngine engine = make_engine(g, basic_config(2, 1000));
    CollectingSink sink;
    std::vector<Tuple> source{arrival(0, 7, 0, "a"), arrival(1, 7, 1, "b")};
    if (!zero_first) std::swap(source[0], source[1]);
    const RunReport rep = engine.run(source, sink);
    CHECK(rep.results_emitted == 1);
    REQUIRE(sink.results.size() == 1);
    CHECK(sink.results[0].components[0].payload == "a");
    CHECK(sink.results[0].components[1].payload == "b");
  }
}

TEST_CASE("non-matching keys never join") {
  const JoinGraph g(2, {{0, 1, "k", "k"}});
  JoinEngine engine = make_engine(g, basic_config(2, 1000));
  BlackholeSink sink;
  const std::vector<Tuple> source{arrival(0, 7, 0, "a"), arrival(1, 8, 1, "b")};
  CHECK(engine.run(source, sink).results_emitted == 0);
}

TEST_CASE("chain multiplicities multiply out") {
  // key 7 appears 2, 3, 2 times across the chain: 12 joined rows in total
  const JoinGraph g(3, {{0, 1, "k", "k"}, {1, 2, "k", "k"}});
  std::vector<Tuple> source;
  int when = 0;
  for (int i = 0; i < 2; ++i) source.push_back(arrival(0, 7, when++, "a" + std::to_string(i)));
  for (int i = 0; i < 3; ++i) source.push_back(arrival(1, 7, when++, "b" + std::to_string(i)));
  for (int i = 0; i < 2; ++i) source.push_back(arrival(2, 7, when++, "c" + std::to_string(i)));

  JoinEngine engine = make_engine(g, basic_config(3, 1000));
  CollectingSink sink;
  const RunReport rep = engine.run(source, sink);
  CHECK(rep.results_emitted == 12);

  const auto expected = mt::nested_loop_oracle(g, source, 1000, {1'000'000, 1'000'000, 1'000'000});
  CHECK(mt::same_result_multiset(mt::signatures_of(sink.results), expected));
}

TEST_CASE("a new center tuple fans out across all leaf matches") {
  const JoinGraph g(4, {{0, 1, "k", "k"}, {0, 2, "k", "k"}, {0, 3, "k", "k"}});
  JoinEngine engine = make_engine(g, basic_config(4, 10'000));
  CollectingSink sink;
  std::vector<Tuple> source;
  int when = 0;
  for (StreamId leaf = 1; leaf <= 3; ++leaf) {
    for (int i = 0; i < 2; ++i) {
      source.push_back(arrival(leaf, 7, when++, std::to_string(leaf) + "_" + std::to_string(i)));
    }
  }
  const RunReport before = engine.run(source, sink);
  CHECK(before.results_emitted == 0);

  const std::size_t emitted = engine.process(arrival(0, 7, when, "center"), sink);
  CHECK(emitted == 8);  // 2 matches per leaf, three leaves
}

TEST_CASE("early abort stops after a single query") {
  const JoinGraph g(3, {{0, 1, "k", "k"}, {0, 2, "k", "k"}});
  std::vector<StateBackend> backends;
  for (StreamId i = 0; i < 3; ++i) {
    backends.emplace_back(i, BackendConfig{}, g.attrs_of(i));
  }
  // stream 2 holds a match, stream 1 stays empty; probing 1 first must abort
  Tuple match = arrival(2, 7, 0, "m");
  backends[2].insert(match, 0);

  Tuple center = arrival(0, 7, 1, "c");
  backends[0].insert(center, 1);

  ProbeSequence order;
  order.start = 0;
  order.pairs = {{0, 1, 0}, {0, 2, 1}};

  PairCounterMatrix counters(3);
  ProbeTotals totals;
  CollectingSink sink;
  const ProbeOutcome out =
      probe_by_order(center, order, g, backends, counters, totals, sink);
  CHECK(out.emitted == 0);
  CHECK(totals.queries == 1);  // the failed lookup into stream 1, nothing after
  CHECK(counters.at(0, 1).q == 1);
  CHECK(counters.at(0, 2).q == 0);
}

TEST_CASE("per-partial probing records one query per surviving partial") {
  const JoinGraph g(3, {{0, 1, "k", "k"}, {0, 2, "k", "k"}});
  std::vector<StateBackend> backends;
  for (StreamId i = 0; i < 3; ++i) {
    backends.emplace_back(i, BackendConfig{}, g.attrs_of(i));
  }
  for (int i = 0; i < 3; ++i) {
    Tuple t = arrival(1, 7, i, "b" + std::to_string(i));
    backends[1].insert(t, i);
  }
  Tuple t2 = arrival(2, 7, 3, "c");
  backends[2].insert(t2, 3);

  Tuple center = arrival(0, 7, 4, "a");
  backends[0].insert(center, 4);

  ProbeSequence order;
  order.start = 0;
  order.pairs = {{0, 1, 0}, {0, 2, 1}};
  PairCounterMatrix counters(3);
  ProbeTotals totals;
  CollectingSink sink;
  const ProbeOutcome out =
      probe_by_order(center, order, g, backends, counters, totals, sink);
  CHECK(out.emitted == 3);
  CHECK(counters.at(0, 1).q == 1);
  CHECK(counters.at(0, 2).q == 3);  // one lookup per partial from the first hop
  CHECK(totals.queries == 4);
  CHECK(totals.records == 6);  // 3 from the first hop, 1 each from the second
}

TEST_CASE("duplicated tuples re-emit one result per stored copy") {
  const JoinGraph g(2, {{0, 1, "k", "k"}});
  JoinEngine engine = make_engine(g, basic_config(2, 1000));
  CollectingSink sink;
  const std::vector<Tuple> source{
      arrival(1, 7, 0, "b"), arrival(1, 7, 1, "b"),  // identical twice
      arrival(0, 7, 2, "a")};
  const RunReport rep = engine.run(source, sink);
  CHECK(rep.results_emitted == 2);
  const auto expected = mt::nested_loop_oracle(g, source, 1000, {1'000'000, 1'000'000});
  CHECK(mt::same_result_multiset(mt::signatures_of(sink.results), expected));
}

TEST_CASE("installing a new table takes effect between arrivals") {
  const JoinGraph g(3, {{0, 1, "k", "k"}, {0, 2, "k", "k"}});
  JoinEngine engine = make_engine(g, basic_config(3, 100'000));
  BlackholeSink sink;

  // leaf 2 holds the only match; leaf 1 stays empty
  engine.process(arrival(2, 7, 0, "m"), sink);  // its own probe: 1 query

  engine.process(arrival(0, 7, 1, "c1"), sink);  // probes 1 first: aborts, 1 query

  ProbeOrderTable flipped = engine.orders();
  flipped.orders[0].pairs = {{0, 2, 1}, {0, 1, 0}};
  engine.install_orders(flipped);

  CollectingSink collect;
  engine.process(arrival(0, 7, 2, "c2"), collect);  // probes 2: hit, then 1: abort
  const RunReport rep = engine.run({}, sink);
  CHECK(rep.queries_issued == 4);  // 1 + 1 + 2
  CHECK(rep.results_emitted == 0);
}

TEST_CASE("invalid order tables are rejected") {
  const JoinGraph g(2, {{0, 1, "k", "k"}});
  JoinEngine engine = make_engine(g, basic_config(2, 100));
  ProbeOrderTable bad = engine.orders();
  bad.orders[0].pairs = {{1, 0, 0}};  // wrong probing end for start 0
  CHECK_THROWS_AS(engine.install_orders(bad), std::invalid_argument);
}

TEST_CASE("tuples for unknown streams end the run with a partial report") {
  const JoinGraph g(2, {{0, 1, "k", "k"}});
  JoinEngine engine = make_engine(g, basic_config(2, 100));
  BlackholeSink sink;
  const std::vector<Tuple> source{arrival(0, 1, 0, "a"), arrival(9, 1, 1, "x")};
  const RunReport rep = engine.run(source, sink);
  CHECK_FALSE(rep.completed);
  CHECK(rep.tuples_processed == 1);
  CHECK(rep.error.find("unknown stream") != std::string::npos);
}

TEST_CASE("a rejecting sink aborts with a partial report") {
  class RejectingSink final : public ResultSink {
   public:
    bool on_result(const JoinResult&) override { return false; }
  };
  const JoinGraph g(2, {{0, 1, "k", "k"}});
  JoinEngine engine = make_engine(g, basic_config(2, 1000));
  RejectingSink sink;
  const std::vector<Tuple> source{arrival(0, 7, 0, "a"), arrival(1, 7, 1, "b"),
                                  arrival(0, 7, 2, "c")};
  const RunReport rep = engine.run(source, sink);
  CHECK_FALSE(rep.completed);
  CHECK(rep.error == "sink rejected a result");
  CHECK(rep.tuples_processed == 2);
}

TEST_CASE("results match the nested-loop reference under every strategy") {
  std::mt19937_64 rng(818);
  const Strategy all[] = {Strategy::fixedOrder,      Strategy::dpPick,
                          Strategy::selectivityFirst, Strategy::greedy_MSJ,
                          Strategy::dpPick_queryCost, Strategy::dpPick_matchCost,
                          Strategy::dpPick_noSmooth};
  for (int round = 0; round < 12; ++round) {
    const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng() % 3);
    const JoinGraph g = mt::random_connected_graph(rng, n, 0.4);
    const std::size_t count = 40 + rng() % 80;
    const std::int64_t period = 8 + static_cast<std::int64_t>(rng() % 32);
    std::vector<std::int64_t> ttls;
    for (std::uint32_t i = 0; i < n; ++i) {
      ttls.push_back(5 + static_cast<std::int64_t>(rng() % 75));
    }
    std::vector<Tuple> source;
    for (std::size_t i = 0; i < count; ++i) {
      source.push_back(arrival(static_cast<StreamId>(rng() % n),
                                  static_cast<std::int64_t>(rng() % 6),
                                  static_cast<std::int64_t>(i),
                                  std::to_string(i)));
    }
    for (Strategy s : all) {
      check_against_oracle(g, source, period, ttls, s);
    }
  }
}

TEST_CASE("logical-clock runs are deterministic") {
  std::mt19937_64 rng(321);
  const JoinGraph g = mt::random_connected_graph(rng, 3, 0.5);
  std::vector<Tuple> source;
  for (int i = 0; i < 150; ++i) {
    source.push_back(arrival(static_cast<StreamId>(rng() % 3),
                                static_cast<std::int64_t>(rng() % 5), i,
                                std::to_string(i)));
  }
  EngineConfig cfg = basic_config(3, 20, 60);
  cfg.strategy = Strategy::dpPick;

  RunReport reports[2];
  for (int i = 0; i < 2; ++i) {
    JoinEngine engine = make_engine(g, cfg);
    BlackholeSink sink;
    reports[i] = engine.run(source, sink);
  }
  CHECK(reports[0].results_emitted == reports[1].results_emitted);
  CHECK(reports[0].queries_issued == reports[1].queries_issued);
  CHECK(reports[0].records_matched == reports[1].records_matched);
  CHECK(reports[0].cycles_closed == reports[1].cycles_closed);
  CHECK(reports[0].tuples_expired == reports[1].tuples_expired);
}

TEST_CASE("wall-clock mode runs to completion with matching results") {
  const JoinGraph g(2, {{0, 1, "k", "k"}});
  std::vector<Tuple> source;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 3000; ++i) {
    source.push_back(arrival(static_cast<StreamId>(rng() % 2),
                                static_cast<std::int64_t>(rng() % 50), i,
                                std::to_string(i)));
  }
  EngineConfig wall = basic_config(2, 5);  // 5 ms period, ttl large
  wall.clock_mode = ClockMode::WallClock;
  wall.strategy = Strategy::dpPick;
  JoinEngine wall_engine = make_engine(g, wall);
  BlackholeSink wall_sink;
  const RunReport wall_rep = wall_engine.run(source, wall_sink);
  CHECK(wall_rep.completed);

  EngineConfig logical = basic_config(2, 500);
  JoinEngine logical_engine = make_engine(g, logical);
  BlackholeSink logical_sink;
  const RunReport logical_rep = logical_engine.run(source, logical_sink);

  // with an effectively infinite ttl the emitted multiset cannot depend on
  // when boundaries fire, so both modes agree on the result count
  CHECK(wall_rep.results_emitted == logical_rep.results_emitted);
}

TEST_CASE("per-cycle observer sees every closed cycle") {
  const JoinGraph g(2, {{0, 1, "k", "k"}});
  EngineConfig cfg = basic_config(2, 10);
  JoinEngine engine = make_engine(g, cfg);
  std::vector<std::uint64_t> seen;
  engine.set_cycle_observer([&seen](const CycleStats& s) {
    seen.push_back(s.cycle_index);
  });
  std::vector<Tuple> source;
  for (int i = 0; i < 35; ++i) {
    source.push_back(arrival(static_cast<StreamId>(i % 2), i % 4, i,
                                std::to_string(i)));
  }
  BlackholeSink sink;
  const RunReport rep = engine.run(source, sink);
  CHECK(rep.cycles_closed == seen.size());
  CHECK(seen.size() == 4);  // boundaries at 10, 20, 30 plus the trailing close
  for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == i);
}
