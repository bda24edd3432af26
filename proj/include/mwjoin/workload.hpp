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
#include <optional>
#include <string>
#include <vector>

#include "mwjoin/join_model.hpp"

namespace mwjoin {

/// One component of a stream's key distribution: with the given probability
/// an emission draws its key from [lo, hi), either uniformly or by cycling
/// through the range (a sweep emits every key exactly once per pass, which
/// pins the per-key multiplicity to 1 while the pass fits in the TTL window).
/// A sweep stride coprime to the range size walks the same range in a
/// different orbit, so two sweeping streams keep statistically independent
/// live key sets instead of nested ones.
struct KeySource {
  double probability = 1.0;
  std::int64_t lo = 0;
  std::int64_t hi = 1;
  enum class Mode { Uniform, Sweep } mode = Mode::Uniform;
  std::int64_t stride = 1;  // sweep only
};

/// Scheduled parameter change, applied from the given emission index on.
struct DriftEvent {
  std::uint64_t at_tuple = 0;
  std::optional<double> weight;
  std::optional<std::vector<KeySource>> key_sources;
};

/// How one synthetic stream emits: relative arrival weight, key
/// distribution, burst size per key draw, and drift schedule.
struct StreamSpec {
  StreamId stream = 0;
  std::string key_attr = "k";
  double weight = 1.0;
  std::vector<KeySource> key_sources;
  std::uint32_t burst_min = 1;  // copies of the drawn key emitted back to back
  std::uint32_t burst_max = 1;
  std::vector<DriftEvent> drift;
};

/// Merged, timestamped arrival sequence. Tuples carry their stream id;
/// event times are non-decreasing.
struct InterleavedSource {
  std::vector<Tuple> tuples;
  std::uint64_t seed = 0;
  std::uint64_t rows_skipped = 0;  // unparseable CSV rows, when loaded
};

struct CsvLoadResult {
  std::vector<Tuple> tuples;
  std::uint64_t rows_skipped = 0;
};

/// Loads a comma-separated file with a header row into tuples for `stream`,
/// keyed by `key_column` stored under attribute `key_attr`. Rows whose key
/// field is empty are skipped and counted. Integer-looking keys parse as
/// integers, anything else stays a string. The raw row is kept as payload.
CsvLoadResult load_csv(const std::string& path, StreamId stream,
                       const std::string& key_column, const std::string& key_attr);

/// Deterministic synthetic source: each emission picks a stream by weight,
/// draws a key from that stream's sources, and emits burst copies with
/// monotone event times (time_step_ms apart). Drift events swap stream
/// parameters at their emission index.
InterleavedSource generate(const std::vector<StreamSpec>& specs,
                           std::uint64_t total_tuples, std::uint64_t seed,
                           std::int64_t time_step_ms = 1);

/// Uniformly random interleaving of per-stream tuple lists, deterministic
/// per seed. Preserves within-table order unless shuffle_within is set.
/// Event times are reassigned monotonically (time_step_ms apart).
InterleavedSource shuffle_interleave(std::vector<std::vector<Tuple>> tables,
                                     std::uint64_t seed,
                                     bool shuffle_within = false,
                                     std::int64_t time_step_ms = 1);

}  // namespace mwjoin
