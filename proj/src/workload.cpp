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
#include "mwjoin/workload.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mwjoin {

namespace {

// mt19937_64 output is pinned by the standard; the draw helpers below are
// hand-rolled so the byte stream does not depend on the standard library's
// distribution implementations.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
  return bound == 0 ? 0 : rng() % bound;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

Value parse_key(const std::string& raw) {
  std::int64_t v = 0;
  const char* begin = raw.data();
  const char* end = raw.data() + raw.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec == std::errc{} && ptr == end) return Value{v};
  return Value{raw};
}

struct StreamState {
  StreamSpec spec;
  std::size_t next_drift = 0;
  std::vector<std::uint64_t> sweep_pos;  // per key source

  void apply_due_drift(std::uint64_t emission_index) {
    while (next_drift < spec.drift.size() &&
           spec.drift[next_drift].at_tuple <= emission_index) {
      const DriftEvent& ev = spec.drift[next_drift];
      if (ev.weight) spec.weight = *ev.weight;
      if (ev.key_sources) {
        spec.key_sources = *ev.key_sources;
        sweep_pos.assign(spec.key_sources.size(), 0);
      }
      ++next_drift;
    }
  }
};

}  // namespace

CsvLoadResult load_csv(const std::string& path, StreamId stream,
                       const std::string& key_column, const std::string& key_attr) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open CSV file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("CSV file has no header row: " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  const auto col_it = std::find(header.begin(), header.end(), key_column);
  if (col_it == header.end()) {
    throw std::runtime_error("CSV file " + path + " has no column '" + key_column +
                             "'");
  }
  const std::size_t key_idx = static_cast<std::size_t>(col_it - header.begin());

  CsvLoadResult out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() <= key_idx || fields[key_idx].empty()) {
      ++out.rows_skipped;
      continue;
    }
    Tuple t;
    t.stream = stream;
    t.key_values[key_attr] = parse_key(fields[key_idx]);
    t.payload = line;
    out.tuples.push_back(std::move(t));
  }
  return out;
}

InterleavedSource generate(const std::vector<StreamSpec>& specs,
                           std::uint64_t total_tuples, std::uint64_t seed,
                           std::int64_t time_step_ms) {
  if (total_tuples == 0) {
    throw std::invalid_argument("total tuple count must be positive");
  }
  if (specs.empty()) {
    throw std::invalid_argument("need at least one stream spec");
  }
  std::vector<StreamState> states;
  states.reserve(specs.size());
  for (const StreamSpec& s : specs) {
    if (s.weight <= 0) throw std::invalid_argument("stream weights must be positive");
    if (s.key_sources.empty()) {
      throw std::invalid_argument("stream spec needs at least one key source");
    }
    for (const KeySource& ks : s.key_sources) {
      if (ks.hi <= ks.lo) throw std::invalid_argument("empty key domain");
      if (ks.probability < 0) throw std::invalid_argument("negative key-source weight");
      if (ks.stride < 1) throw std::invalid_argument("sweep stride must be >= 1");
    }
    if (s.burst_min == 0 || s.burst_max < s.burst_min) {
      throw std::invalid_argument("burst range must satisfy 1 <= min <= max");
    }
    StreamState st;
    st.spec = s;
    st.sweep_pos.assign(s.key_sources.size(), 0);
    states.push_back(std::move(st));
  }

  std::mt19937_64 rng(seed);
  InterleavedSource out;
  out.seed = seed;
  out.tuples.reserve(total_tuples);

  std::uint64_t emitted = 0;
  while (emitted < total_tuples) {
    for (StreamState& st : states) st.apply_due_drift(emitted);

    double total_weight = 0;
    for (const StreamState& st : states) total_weight += st.spec.weight;
    double pick = unit_draw(rng) * total_weight;
    std::size_t chosen = states.size() - 1;
    for (std::size_t i = 0; i < states.size(); ++i) {
      pick -= states[i].spec.weight;
      if (pick < 0) {
        chosen = i;
        break;
      }
    }
    StreamState& st = states[chosen];

    double src_total = 0;
    for (const KeySource& ks : st.spec.key_sources) src_total += ks.probability;
    double src_pick = unit_draw(rng) * src_total;
    std::size_t src_idx = st.spec.key_sources.size() - 1;
    for (std::size_t i = 0; i < st.spec.key_sources.size(); ++i) {
      src_pick -= st.spec.key_sources[i].probability;
      if (src_pick < 0) {
        src_idx = i;
        break;
      }
    }
    const KeySource& src = st.spec.key_sources[src_idx];
    const std::uint64_t span = static_cast<std::uint64_t>(src.hi - src.lo);
    std::int64_t key;
    if (src.mode == KeySource::Mode::Sweep) {
      const std::int64_t pos =
          static_cast<std::int64_t>(st.sweep_pos[src_idx] % span);
      key = src.lo + (pos * src.stride) % static_cast<std::int64_t>(span);
      ++st.sweep_pos[src_idx];
    } else {
      key = src.lo + static_cast<std::int64_t>(bounded_draw(rng, span));
    }

    std::uint32_t burst = st.spec.burst_min;
    if (st.spec.burst_max > st.spec.burst_min) {
      burst += static_cast<std::uint32_t>(bounded_draw(
          rng, st.spec.burst_max - st.spec.burst_min + 1));
    }
    for (std::uint32_t b = 0; b < burst && emitted < total_tuples; ++b) {
      Tuple t;
      t.stream = st.spec.stream;
      t.key_values[st.spec.key_attr] = Value{key};
      t.event_time = static_cast<std::int64_t>(emitted) * time_step_ms;
      t.payload = std::to_string(emitted);
      out.tuples.push_back(std::move(t));
      ++emitted;
    }
  }
  return out;
}

InterleavedSource shuffle_interleave(std::vector<std::vector<Tuple>> tables,
                                     std::uint64_t seed, bool shuffle_within,
                                     std::int64_t time_step_ms) {
  std::mt19937_64 rng(seed);
  if (shuffle_within) {
    for (auto& table : tables) {
      for (std::size_t i = table.size(); i > 1; --i) {
        std::swap(table[i - 1], table[bounded_draw(rng, i)]);
      }
    }
  }

  std::uint64_t remaining = 0;
  std::vector<std::size_t> pos(tables.size(), 0);
  for (const auto& t : tables) remaining += t.size();

  InterleavedSource out;
  out.seed = seed;
  out.tuples.reserve(remaining);
  // Picking a table with probability proportional to its remaining rows
  // makes every order-preserving interleaving equally likely.
  while (remaining > 0) {
    std::uint64_t pick = bounded_draw(rng, remaining);
    for (std::size_t i = 0; i < tables.size(); ++i) {
      const std::uint64_t left = tables[i].size() - pos[i];
      if (pick < left) {
        Tuple t = std::move(tables[i][pos[i]++]);
        t.event_time = static_cast<std::int64_t>(out.tuples.size()) * time_step_ms;
        out.tuples.push_back(std::move(t));
        break;
      }
      pick -= left;
    }
    --remaining;
  }
  return out;
}

}  // namespace mwjoin
