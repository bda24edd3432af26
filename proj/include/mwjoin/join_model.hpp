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
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace mwjoin {

/// Index of an input stream. Streams are numbered 0..n-1.
using StreamId = std::uint32_t;

/// Join-key scalar. Equality is exact; integer and string keys never compare
/// equal to each other.
using Value = std::variant<std::int64_t, std::string>;

std::string to_string(const Value& v);

/// One record of an input stream. key_values must contain every join
/// attribute the JoinGraph declares for the stream.
struct Tuple {
  StreamId stream = 0;
  std::map<std::string, Value> key_values;
  std::string payload;
  std::int64_t event_time = 0;  // milliseconds

  /// Throws std::invalid_argument if the attribute is missing.
  const Value& key(const std::string& attr) const;

  friend bool operator==(const Tuple&, const Tuple&) = default;
};

/// Undirected equi-join predicate between two streams. Each edge yields the
/// two directed probe pairs <a,b> and <b,a>.
struct JoinEdge {
  StreamId a = 0;
  StreamId b = 0;
  std::string attr_a;
  std::string attr_b;
};

/// Streams as nodes, equi-join predicates as edges. Source of every legal
/// probe sequence. Cycles are legal; connectivity is required before any
/// complete probe sequence can exist (checked by callers that need it).
class JoinGraph {
 public:
  JoinGraph(std::uint32_t stream_count, std::vector<JoinEdge> edges);

  std::uint32_t stream_count() const { return n_; }
  const std::vector<JoinEdge>& edges() const { return edges_; }

  bool connected() const;

  /// Attribute that edge `edge_idx` matches on stream `s`.
  const std::string& attr_on(std::size_t edge_idx, StreamId s) const;

  /// Sorted, de-duplicated join attributes of stream `s`.
  std::vector<std::string> attrs_of(StreamId s) const;

 private:
  std::uint32_t n_;
  std::vector<JoinEdge> edges_;
};

/// Directed probe step: results bound to stream `l` look up matches in
/// stream `r`'s state, via graph edge `edge`.
struct ProbePair {
  StreamId l = 0;
  StreamId r = 0;
  std::uint32_t edge = 0;

  friend bool operator==(const ProbePair&, const ProbePair&) = default;
};

/// Ordered probe pairs covering all streams, starting at `start`. A valid
/// sequence has n-1 pairs; every pair probes from an already-visited stream
/// into an unvisited one.
struct ProbeSequence {
  StreamId start = 0;
  std::vector<ProbePair> pairs;

  friend bool operator==(const ProbeSequence&, const ProbeSequence&) = default;
};

/// One probe sequence per input stream; orders[i].start == i.
struct ProbeOrderTable {
  std::vector<ProbeSequence> orders;
};

/// True iff `s` satisfies the probe-sequence invariants against `g`:
/// pairs[0].l == start, every l already visited, every r fresh, all
/// streams covered, and every pair backed by the edge it references.
bool validate_sequence(const JoinGraph& g, const ProbeSequence& s);

/// validate_sequence over every entry, plus orders[i].start == i.
bool validate_table(const JoinGraph& g, const ProbeOrderTable& t);

}  // namespace mwjoin
