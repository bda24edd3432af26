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
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mwjoin/stats.hpp"

using namespace mwjoin;

TEST_CASE("probe recording") {
  PairCounters c;
  c.record(0);
  CHECK(c.q == 1);
  CHECK(c.m == 0);
  CHECK(c.s == 0);

  c.record(4);
  c.record(0);
  CHECK(c.q == 3);
  CHECK(c.m == 1);
  CHECK(c.s == 4);
}

TEST_CASE("ten probes five successful") {
  PairCounters c;
  for (int i = 0; i < 10; ++i) c.record(i % 2 == 0 ? 4 : 0);
  CHECK(c.q == 10);
  CHECK(c.m == 5);
  CHECK(c.s == 20);
  CHECK(c.m <= c.q);
  CHECK(c.s >= c.m);
}

TEST_CASE("cycle close derives exact ratios") {
  PairCounterMatrix counters(2);
  for (int i = 0; i < 10; ++i) counters.at(0, 1).record(i < 5 ? 4 : 0);
  std::vector<StateBackend> backends;  // none: kappa snapshot stays empty

  const CycleStats snap = close_cycle(3, counters, backends);
  CHECK(snap.cycle_index == 3);
  REQUIRE(snap.gamma_at(0, 1).has_value());
  CHECK(*snap.gamma_at(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(snap.mu_at(0, 1).has_value());
  CHECK(*snap.mu_at(0, 1) == doctest::Approx(4.0).epsilon(1e-12));

  // counters were reset: a second close yields all-absent entries
  const CycleStats again = close_cycle(4, counters, backends);
  CHECK_FALSE(again.gamma_at(0, 1).has_value());
  CHECK_FALSE(again.mu_at(0, 1).has_value());
}

TEST_CASE("division guards: no queries means absent entries") {
  PairCounterMatrix counters(2);
  std::vector<StateBackend> backends;
  const CycleStats snap = close_cycle(0, counters, backends);
  CHECK_FALSE(snap.gamma_at(0, 1).has_value());
  CHECK_FALSE(snap.mu_at(1, 0).has_value());
}

TEST_CASE("queries without matches give gamma zero and absent mu") {
  PairCounterMatrix counters(2);
  counters.at(0, 1).record(0);
  counters.at(0, 1).record(0);
  std::vector<StateBackend> backends;
  const CycleStats snap = close_cycle(0, counters, backends);
  REQUIRE(snap.gamma_at(0, 1).has_value());
  CHECK(*snap.gamma_at(0, 1) == 0.0);
  CHECK_FALSE(snap.mu_at(0, 1).has_value());
}

TEST_CASE("every probe matching exactly once gives gamma and mu of one") {
  PairCounterMatrix counters(2);
  for (int i = 0; i < 7; ++i) counters.at(1, 0).record(1);
  std::vector<StateBackend> backends;
  const CycleStats snap = close_cycle(0, counters, backends);
  CHECK(*snap.gamma_at(1, 0) == 1.0);
  CHECK(*snap.mu_at(1, 0) == 1.0);
}

TEST_CASE("cycle close snapshots backend key counts and resets cycle counters") {
  PairCounterMatrix counters(2);
  std::vector<StateBackend> backends;
  BackendConfig cfg;
  backends.emplace_back(0, cfg, std::vector<std::string>{"k"});
  backends.emplace_back(1, cfg, std::vector<std::string>{"k"});

  Tuple t;
  t.stream = 0;
  t.key_values["k"] = Value{std::int64_t{1}};
  backends[0].insert(t, 0);
  CHECK(backends[0].keys_in() == 1);

  const CycleStats snap = close_cycle(0, counters, backends);
  CHECK(snap.kappa[0] == 1);
  CHECK(snap.kappa[1] == 0);
  CHECK(backends[0].keys_in() == 0);  // reset for the next cycle
}

TEST_CASE("history keeps only the newest L snapshots") {
  StatHistory h(3);
  for (std::uint64_t i = 1; i <= 4; ++i) {
    CycleStats s;
    s.cycle_index = i;
    s.streams = 0;
    h.append(std::move(s));
  }
  REQUIRE(h.size() == 3);
  CHECK(h.items().front().cycle_index == 2);
  CHECK(h.latest().cycle_index == 4);
}

TEST_CASE("length-one history always holds the latest snapshot") {
  StatHistory h(1);
  for (std::uint64_t i = 0; i < 5; ++i) {
    CycleStats s;
    s.cycle_index = i;
    h.append(std::move(s));
    CHECK(h.size() == 1);
    CHECK(h.latest().cycle_index == i);
  }
}

TEST_CASE("absent entries are stored as gaps, not dropped") {
  StatHistory h(5);
  PairCounterMatrix counters(2);
  std::vector<StateBackend> backends;
  h.append(close_cycle(0, counters, backends));  // all gaps
  counters.at(0, 1).record(2);
  h.append(close_cycle(1, counters, backends));
  CHECK(h.size() == 2);
  CHECK_FALSE(h.items()[0].gamma_at(0, 1).has_value());
  CHECK(h.items()[1].gamma_at(0, 1).has_value());
}

TEST_CASE("history rejects zero capacity") {
  CHECK_THROWS_AS(StatHistory(0), std::invalid_argument);
}
