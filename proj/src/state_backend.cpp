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
#include "mwjoin/state_backend.hpp"

#include <algorithm>
#include <stdexcept>

namespace mwjoin {

namespace {

bool key_less(const std::pair<std::uint32_t, Value>& a,
              const std::pair<std::uint32_t, Value>& b) {
  if (a.first != b.first) return a.first < b.first;
  return a.second < b.second;
}

}  // namespace

std::size_t StateBackend::KeyHash::operator()(const Key& k) const {
  std::size_t h = std::hash<std::uint32_t>{}(k.first);
  std::size_t v = std::hash<Value>{}(k.second);
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

StateBackend::StateBackend(StreamId stream, BackendConfig config,
                           std::vector<std::string> key_attrs)
    : stream_(stream), config_(config), attrs_(std::move(key_attrs)) {
  if (attrs_.empty()) {
    throw std::invalid_argument("state backend needs at least one key attribute");
  }
  if (config_.slot_count == 0) {
    throw std::invalid_argument("hash slot count must be positive");
  }
  if (config_.ttl_ms <= 0) {
    throw std::invalid_argument("ttl must be positive");
  }
  if (config_.base_query_cost < 0) {
    throw std::invalid_argument("base query cost must be non-negative");
  }
}

StateBackend::Bucket& StateBackend::bucket_for(const Key& k, bool& created) {
  if (config_.structure == BackendStructure::HashTable) {
    auto [it, inserted] = hash_.try_emplace(k);
    created = inserted;
    return it->second;
  }
  auto it = std::lower_bound(
      sorted_.begin(), sorted_.end(), k,
      [](const auto& entry, const Key& key) { return key_less(entry.first, key); });
  if (it != sorted_.end() && it->first == k) {
    created = false;
    return it->second;
  }
  created = true;
  return sorted_.insert(it, {k, Bucket{}})->second;
}

const StateBackend::Bucket* StateBackend::find_bucket(const Key& k) const {
  if (config_.structure == BackendStructure::HashTable) {
    auto it = hash_.find(k);
    return it == hash_.end() ? nullptr : &it->second;
  }
  auto it = std::lower_bound(
      sorted_.begin(), sorted_.end(), k,
      [](const auto& entry, const Key& key) { return key_less(entry.first, key); });
  if (it != sorted_.end() && it->first == k) return &it->second;
  return nullptr;
}

void StateBackend::insert(const Tuple& t, std::int64_t now) {
  if (t.stream != stream_) {
    throw std::invalid_argument("tuple routed to the wrong stream backend");
  }
  for (std::uint32_t i = 0; i < attrs_.size(); ++i) {
    const Value& v = t.key(attrs_[i]);  // throws if the attribute is missing
    bool created = false;
    Bucket& b = bucket_for({i, v}, created);
    const bool key_was_dead = b.empty();
    b.push_back({t, now});
    ++live_tuples_;
    if (created || key_was_dead) {
      ++kappa_;
      ++keys_in_;
    }
  }
}

std::span<const StateBackend::Stored> StateBackend::query(std::size_t attr_idx,
                                                          const Value& key) const {
  if (attr_idx >= attrs_.size()) {
    throw std::invalid_argument("unknown key attribute index");
  }
  const Bucket* b = find_bucket({static_cast<std::uint32_t>(attr_idx), key});
  if (b == nullptr) return {};
  return {b->data(), b->size()};
}

std::span<const StateBackend::Stored> StateBackend::query(const Value& key) const {
  if (attrs_.size() != 1) {
    throw std::invalid_argument("backend has several key attributes; name one");
  }
  return query(0, key);
}

std::size_t StateBackend::remove_expired(std::int64_t now) {
  const std::int64_t cutoff = now - config_.ttl_ms;
  std::size_t removed = 0;

  auto sweep_bucket = [&](Bucket& b) {
    auto keep = std::remove_if(b.begin(), b.end(), [&](const Stored& s) {
      return s.inserted_at < cutoff;
    });
    const std::size_t dropped = static_cast<std::size_t>(b.end() - keep);
    b.erase(keep, b.end());
    removed += dropped;
    live_tuples_ -= dropped;
    if (b.empty() && dropped > 0) {
      --kappa_;
      ++keys_expired_;
      return true;  // bucket is now dead
    }
    return false;
  };

  if (config_.structure == BackendStructure::HashTable) {
    for (auto it = hash_.begin(); it != hash_.end();) {
      if (sweep_bucket(it->second)) {
        it = hash_.erase(it);
      } else {
        ++it;
      }
    }
  } else {
    for (auto& entry : sorted_) sweep_bucket(entry.second);
    sorted_.erase(std::remove_if(sorted_.begin(), sorted_.end(),
                                 [](const auto& e) { return e.second.empty(); }),
                  sorted_.end());
  }
  return removed;
}

void StateBackend::reset_cycle_counters() {
  keys_in_ = 0;
  keys_expired_ = 0;
}

}  // namespace mwjoin
