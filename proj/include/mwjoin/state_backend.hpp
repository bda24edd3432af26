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
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mwjoin/join_model.hpp"

namespace mwjoin {

enum class BackendStructure { HashTable, SortedArray };

struct BackendConfig {
  BackendStructure structure = BackendStructure::HashTable;
  std::uint64_t slot_count = 1u << 20;  // hash slots, feeds the lookup cost model
  double base_query_cost = 1.0;         // fixed per-lookup cost term
  std::int64_t ttl_ms = 60'000;
};

/// Keyed multimap of live tuples for one input stream.
///
/// Keys are (attribute, value) composites so a stream that joins on more than
/// one attribute stays queryable per attribute; with a single join attribute
/// (the common case) this degenerates to a plain value-keyed multimap.
/// Tracks the live distinct-key count and the per-cycle key inflow/expiry
/// counters the cost statistics are built from.
class StateBackend {
 public:
  struct Stored {
    Tuple tuple;
    std::int64_t inserted_at = 0;
  };
  using Bucket = std::vector<Stored>;

  StateBackend(StreamId stream, BackendConfig config,
               std::vector<std::string> key_attrs);

  StreamId stream() const { return stream_; }
  const BackendConfig& config() const { return config_; }
  const std::vector<std::string>& key_attrs() const { return attrs_; }

  /// Indexes the tuple under each declared key attribute. Throws
  /// std::invalid_argument if an attribute is missing from the tuple.
  void insert(const Tuple& t, std::int64_t now);

  /// All live tuples stored under attrs()[attr_idx] == key, in insertion
  /// order. Empty span if the key is absent. Never mutates state.
  std::span<const Stored> query(std::size_t attr_idx, const Value& key) const;

  /// Single-attribute convenience; requires exactly one declared attribute.
  std::span<const Stored> query(const Value& key) const;

  /// Drops every tuple with inserted_at < now - ttl. Returns the number of
  /// stored entries removed. A key counts as expired only when its last
  /// tuple goes away.
  std::size_t remove_expired(std::int64_t now);

  /// Number of distinct keys with at least one live tuple.
  std::size_t key_count() const { return kappa_; }

  std::uint64_t keys_in() const { return keys_in_; }
  std::uint64_t keys_expired() const { return keys_expired_; }
  void reset_cycle_counters();

  std::size_t live_tuples() const { return live_tuples_; }

 private:
  using Key = std::pair<std::uint32_t, Value>;

  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  Bucket& bucket_for(const Key& k, bool& created);
  const Bucket* find_bucket(const Key& k) const;

  StreamId stream_;
  BackendConfig config_;
  std::vector<std::string> attrs_;

  std::unordered_map<Key, Bucket, KeyHash> hash_;
  std::vector<std::pair<Key, Bucket>> sorted_;  // ordered by Key

  std::size_t kappa_ = 0;
  std::size_t live_tuples_ = 0;
  std::uint64_t keys_in_ = 0;
  std::uint64_t keys_expired_ = 0;
};

}  // namespace mwjoin
