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
#include <map>
#include <random>
#include <set>

#include <stdexcept>

#include "doctest.h"
#include "mwjoin/state_backend.hpp"

using namespace mwjoin;

namespace {

Tuple arrival(StreamId stream, std::int64_t key, std::int64_t when,
                 const std::string& payload = "") {
  Tuple t;
  t.stream = stream;
  t.key_values["k"] = Value{key};
  t.event_time = when;
  t.payload = payload;
  return t;
}

StateBackend make_backend(BackendStructure structure, std::int64_t ttl = 60'000) {
  BackendConfig cfg;
  cfg.structure = structure;
  cfg.ttl_ms = ttl;
  return StateBackend(0, cfg, {"k"});
}

}  // namespace

TEST_CASE("insert tracks distinct keys and inflow") {
  for (auto structure : {BackendStructure::HashTable, BackendStructure::SortedArray}) {
    StateBackend b = make_backend(structure);
    CHECK(b.key_count() == 0);

    b.insert(arrival(0, 7, 0), 0);
    CHECK(b.key_count() == 1);
    CHECK(b.keys_in() == 1);

    b.insert(arrival(0, 7, 1), 1);  // duplicate key
    CHECK(b.key_count() == 1);
    CHECK(b.keys_in() == 1);
    CHECK(b.query(Value{std::int64_t{7}}).size() == 2);

    b.insert(arrival(0, 9, 2), 2);
    CHECK(b.key_count() == 2);
    CHECK(b.keys_in() == 2);
  }
}

TEST_CASE("query returns live tuples in insertion order, empty when absent") {
  StateBackend b = make_backend(BackendStructure::HashTable);
  CHECK(b.query(Value{std::int64_t{1}}).empty());
  b.insert(arrival(0, 1, 0, "a"), 0);
  b.insert(arrival(0, 1, 1, "b"), 1);
  b.insert(arrival(0, 1, 2, "c"), 2);
  const auto got = b.query(Value{std::int64_t{1}});
  REQUIRE(got.size() == 3);
  CHECK(got[0].tuple.payload == "a");
  CHECK(got[1].tuple.payload == "b");
  CHECK(got[2].tuple.payload == "c");
}

TEST_CASE("expiry empties a key after its ttl and decrements the key count") {
  StateBackend b = make_backend(BackendStructure::HashTable, 10);
  b.insert(arrival(0, 5, 0), 0);
  const std::size_t removed = b.remove_expired(11);  // cutoff 1, tuple at 0
  CHECK(removed == 1);
  CHECK(b.query(Value{std::int64_t{5}}).empty());
  CHECK(b.key_count() == 0);
  CHECK(b.keys_expired() == 1);
}

TEST_CASE("expiry keeps exactly the strictly-older-than-ttl boundary") {
  StateBackend b = make_backend(BackendStructure::HashTable, 10);
  b.insert(arrival(0, 5, 1), 1);
  CHECK(b.remove_expired(11) == 0);  // cutoff 1: 1 < 1 is false, tuple stays
  CHECK(b.query(Value{std::int64_t{5}}).size() == 1);
}

TEST_CASE("no expiry when nothing is older than the ttl") {
  StateBackend b = make_backend(BackendStructure::SortedArray, 100);
  b.insert(arrival(0, 1, 0), 0);
  b.insert(arrival(0, 2, 10), 10);
  CHECK(b.remove_expired(50) == 0);
  CHECK(b.key_count() == 2);
}

TEST_CASE("partially expired key stays live and is not counted as expired") {
  StateBackend b = make_backend(BackendStructure::HashTable, 10);
  b.insert(arrival(0, 5, 0), 0);
  b.insert(arrival(0, 5, 8), 8);
  CHECK(b.remove_expired(11) == 1);  // only the tuple from t=0
  CHECK(b.key_count() == 1);
  CHECK(b.keys_expired() == 0);
  CHECK(b.query(Value{std::int64_t{5}}).size() == 1);
}

TEST_CASE("key count identity direct substitution") {
  // 100 keys live, 20 new this cycle, 5 emptied: 100 + 20 - 5 = 115
  StateBackend b = make_backend(BackendStructure::HashTable, 100);
  for (std::int64_t k = 0; k < 100; ++k) b.insert(arrival(0, k, 0), 0);
  b.reset_cycle_counters();
  const std::size_t kappa_old = b.key_count();

  for (std::int64_t k = 100; k < 120; ++k) b.insert(arrival(0, k, 150), 150);
  // age out keys 0..4 only: give 5..99 a refresher tuple inside the window
  for (std::int64_t k = 5; k < 100; ++k) b.insert(arrival(0, k, 150), 150);
  b.remove_expired(150);  // cutoff 50 expires the t=0 tuples; keys 0..4 die

  CHECK(kappa_old == 100);
  CHECK(b.keys_in() == 20);
  CHECK(b.keys_expired() == 5);
  CHECK(b.key_count() == 115);
  CHECK(b.key_count() == kappa_old + b.keys_in() - b.keys_expired());
}

TEST_CASE("bookkeeping identity holds across randomized insert/expire schedules") {
  std::mt19937_64 rng(20240817);
  for (int round = 0; round < 200; ++round) {
    const auto structure = (rng() % 2 == 0) ? BackendStructure::HashTable
                                            : BackendStructure::SortedArray;
    const std::int64_t ttl = 5 + static_cast<std::int64_t>(rng() % 40);
    StateBackend b = make_backend(structure, ttl);
    std::int64_t now = 0;

    for (int cycle = 0; cycle < 5; ++cycle) {
      const std::size_t kappa_start = b.key_count();
      b.reset_cycle_counters();
      const int ops = 1 + static_cast<int>(rng() % 30);
      for (int i = 0; i < ops; ++i) {
        now += static_cast<std::int64_t>(rng() % 7);
        if (rng() % 4 == 0) {
          b.remove_expired(now);
        } else {
          b.insert(arrival(0, static_cast<std::int64_t>(rng() % 12), now), now);
        }
      }
      b.remove_expired(now);

      // recount oracle: walk all still-live keys through fresh queries
      std::set<std::int64_t> live_keys;
      for (std::int64_t k = 0; k < 12; ++k) {
        if (!b.query(Value{k}).empty()) live_keys.insert(k);
      }
      CHECK(b.key_count() == live_keys.size());
      CHECK(b.key_count() == kappa_start + b.keys_in() - b.keys_expired());
    }
  }
}

TEST_CASE("inserted unexpired tuples always come back on their key") {
  std::mt19937_64 rng(7);
  for (auto structure : {BackendStructure::HashTable, BackendStructure::SortedArray}) {
    StateBackend b = make_backend(structure, 1'000'000);
    std::map<std::int64_t, std::size_t> expected;
    for (int i = 0; i < 500; ++i) {
      const std::int64_t k = static_cast<std::int64_t>(rng() % 40);
      b.insert(arrival(0, k, i), i);
      ++expected[k];
    }
    for (const auto& [k, count] : expected) {
      CHECK(b.query(Value{k}).size() == count);
    }
  }
}

TEST_CASE("string and integer keys coexist without collision") {
  StateBackend b = make_backend(BackendStructure::SortedArray);
  Tuple t1 = arrival(0, 7, 0);
  Tuple t2;
  t2.stream = 0;
  t2.key_values["k"] = Value{std::string{"7"}};
  t2.event_time = 0;
  b.insert(t1, 0);
  b.insert(t2, 0);
  CHECK(b.key_count() == 2);
  CHECK(b.query(Value{std::int64_t{7}}).size() == 1);
  CHECK(b.query(Value{std::string{"7"}}).size() == 1);
}

TEST_CASE("malformed tuple is rejected") {
  StateBackend b = make_backend(BackendStructure::HashTable);
  Tuple t;
  t.stream = 0;
  t.key_values["other"] = Value{std::int64_t{1}};
  CHECK_THROWS_AS(b.insert(t, 0), std::invalid_argument);
}

TEST_CASE("multi-attribute backends index per attribute") {
  BackendConfig cfg;
  StateBackend b(0, cfg, {"x", "y"});
  Tuple t;
  t.stream = 0;
  t.key_values["x"] = Value{std::int64_t{1}};
  t.key_values["y"] = Value{std::int64_t{2}};
  b.insert(t, 0);
  CHECK(b.query(0, Value{std::int64_t{1}}).size() == 1);
  CHECK(b.query(1, Value{std::int64_t{2}}).size() == 1);
  CHECK(b.query(0, Value{std::int64_t{2}}).empty());
  CHECK(b.key_count() == 2);  // one live key per attribute index
}
