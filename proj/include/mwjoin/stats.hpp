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
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "mwjoin/join_model.hpp"
#include "mwjoin/state_backend.hpp"

namespace mwjoin {

/// Probe counters for one directed pair, reset each cycle.
/// q = queries issued, m = queries that returned at least one record,
/// s = records returned over those successful queries.
struct PairCounters {
  std::uint64_t q = 0;
  std::uint64_t m = 0;
  std::uint64_t s = 0;

  void record(std::uint64_t returned) {
    ++q;
    if (returned > 0) {
      ++m;
      s += returned;
    }
  }
};

/// Dense n x n matrix of PairCounters indexed (probing stream, probed stream).
class PairCounterMatrix {
 public:
  explicit PairCounterMatrix(std::uint32_t n) : n_(n), data_(std::size_t{n} * n) {}

  std::uint32_t streams() const { return n_; }
  PairCounters& at(StreamId l, StreamId r) { return data_[idx(l, r)]; }
  const PairCounters& at(StreamId l, StreamId r) const { return data_[idx(l, r)]; }

  void reset() { data_.assign(data_.size(), PairCounters{}); }

 private:
  std::size_t idx(StreamId l, StreamId r) const {
    return std::size_t{l} * n_ + r;
  }
  std::uint32_t n_;
  std::vector<PairCounters> data_;
};

/// Snapshot of one closed cycle. gamma and mu are absent for pairs that saw
/// no queries (resp. no successful queries) during the cycle; the raw
/// counters are kept alongside for dumps and the no-smoothing strategy.
struct CycleStats {
  std::uint64_t cycle_index = 0;
  std::uint32_t streams = 0;
  std::vector<std::optional<double>> gamma;  // n*n, match rate
  std::vector<std::optional<double>> mu;     // n*n, records per successful query
  std::vector<std::uint64_t> kappa;          // per stream, live distinct keys
  std::vector<PairCounters> raw;             // n*n

  std::optional<double> gamma_at(StreamId l, StreamId r) const {
    return gamma[std::size_t{l} * streams + r];
  }
  std::optional<double> mu_at(StreamId l, StreamId r) const {
    return mu[std::size_t{l} * streams + r];
  }
  const PairCounters& raw_at(StreamId l, StreamId r) const {
    return raw[std::size_t{l} * streams + r];
  }
};

/// Derives gamma = m/q and mu = s/m per pair, snapshots per-stream key
/// counts, then resets the counters and the backends' cycle counters.
CycleStats close_cycle(std::uint64_t cycle_index, PairCounterMatrix& counters,
                       std::span<StateBackend> backends);

/// Bounded FIFO of the most recent L cycle snapshots.
class StatHistory {
 public:
  explicit StatHistory(std::size_t max_len);

  void append(CycleStats snap);

  std::size_t size() const { return items_.size(); }
  std::size_t max_len() const { return max_len_; }
  bool empty() const { return items_.empty(); }
  const CycleStats& latest() const { return items_.back(); }
  const std::deque<CycleStats>& items() const { return items_; }

 private:
  std::size_t max_len_;
  std::deque<CycleStats> items_;
};

}  // namespace mwjoin
