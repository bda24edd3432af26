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
#include "mwjoin/stats.hpp"

#include <stdexcept>

namespace mwjoin {

CycleStats close_cycle(std::uint64_t cycle_index, PairCounterMatrix& counters,
                       std::span<StateBackend> backends) {
  const std::uint32_t n = counters.streams();
  CycleStats snap;
  snap.cycle_index = cycle_index;
  snap.streams = n;
  snap.gamma.resize(std::size_t{n} * n);
  snap.mu.resize(std::size_t{n} * n);
  snap.raw.resize(std::size_t{n} * n);
  snap.kappa.resize(n, 0);

  for (StreamId l = 0; l < n; ++l) {
    for (StreamId r = 0; r < n; ++r) {
      const PairCounters& c = counters.at(l, r);
      const std::size_t i = std::size_t{l} * n + r;
      snap.raw[i] = c;
      if (c.q > 0) {
        snap.gamma[i] = static_cast<double>(c.m) / static_cast<double>(c.q);
      }
      if (c.m > 0) {
        snap.mu[i] = static_cast<double>(c.s) / static_cast<double>(c.m);
      }
    }
  }
  for (std::size_t i = 0; i < backends.size() && i < n; ++i) {
    snap.kappa[i] = backends[i].key_count();
    backends[i].reset_cycle_counters();
  }
  counters.reset();
  return snap;
}

StatHistory::StatHistory(std::size_t max_len) : max_len_(max_len) {
  if (max_len_ == 0) {
    throw std::invalid_argument("history length must be at least 1");
  }
}

void StatHistory::append(CycleStats snap) {
  items_.push_back(std::move(snap));
  while (items_.size() > max_len_) items_.pop_front();
}

}  // namespace mwjoin
