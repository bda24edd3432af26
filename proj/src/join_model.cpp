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
#include "mwjoin/join_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace mwjoin {

std::string to_string(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) {
    return std::to_string(std::get<std::int64_t>(v));
  }
  return std::get<std::string>(v);
}

const Value& Tuple::key(const std::string& attr) const {
  auto it = key_values.find(attr);
  if (it == key_values.end()) {
    throw std::invalid_argument("tuple on stream " + std::to_string(stream) +
                                " is missing join attribute '" + attr + "'");
  }
  return it->second;
}

JoinGraph::JoinGraph(std::uint32_t stream_count, std::vector<JoinEdge> edges)
    : n_(stream_count), edges_(std::move(edges)) {
  if (n_ < 2) {
    throw std::invalid_argument("join graph needs at least 2 streams");
  }
  for (const auto& e : edges_) {
    if (e.a >= n_ || e.b >= n_) {
      throw std::invalid_argument("join edge references unknown stream");
    }
    if (e.a == e.b) {
      throw std::invalid_argument("self-edges are not valid join predicates");
    }
    if (e.attr_a.empty() || e.attr_b.empty()) {
      throw std::invalid_argument("join edge attributes must be named");
    }
  }
}

bool JoinGraph::connected() const {
  std::vector<bool> seen(n_, false);
  std::vector<StreamId> stack{0};
  seen[0] = true;
  std::uint32_t count = 1;
  while (!stack.empty()) {
    StreamId s = stack.back();
    stack.pop_back();
    for (const auto& e : edges_) {
      StreamId other;
      if (e.a == s) {
        other = e.b;
      } else if (e.b == s) {
        other = e.a;
      } else {
        continue;
      }
      if (!seen[other]) {
        seen[other] = true;
        ++count;
        stack.push_back(other);
      }
    }
  }
  return count == n_;
}

const std::string& JoinGraph::attr_on(std::size_t edge_idx, StreamId s) const {
  const JoinEdge& e = edges_.at(edge_idx);
  if (e.a == s) return e.attr_a;
  if (e.b == s) return e.attr_b;
  throw std::invalid_argument("stream is not an endpoint of the edge");
}

std::vector<std::string> JoinGraph::attrs_of(StreamId s) const {
  std::vector<std::string> out;
  for (const auto& e : edges_) {
    if (e.a == s) out.push_back(e.attr_a);
    if (e.b == s) out.push_back(e.attr_b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool validate_sequence(const JoinGraph& g, const ProbeSequence& s) {
  const std::uint32_t n = g.stream_count();
  if (s.start >= n) return false;
  if (s.pairs.size() != static_cast<std::size_t>(n) - 1) return false;

  std::vector<bool> visited(n, false);
  visited[s.start] = true;
  for (std::size_t i = 0; i < s.pairs.size(); ++i) {
    const ProbePair& p = s.pairs[i];
    if (p.l >= n || p.r >= n) return false;
    if (p.edge >= g.edges().size()) return false;
    const JoinEdge& e = g.edges()[p.edge];
    const bool matches_edge = (e.a == p.l && e.b == p.r) || (e.a == p.r && e.b == p.l);
    if (!matches_edge) return false;
    if (i == 0 && p.l != s.start) return false;
    if (!visited[p.l]) return false;
    if (visited[p.r]) return false;
    visited[p.r] = true;
  }
  return std::all_of(visited.begin(), visited.end(), [](bool b) { return b; });
}

bool validate_table(const JoinGraph& g, const ProbeOrderTable& t) {
  if (t.orders.size() != g.stream_count()) return false;
  for (StreamId i = 0; i < t.orders.size(); ++i) {
    if (t.orders[i].start != i) return false;
    if (!validate_sequence(g, t.orders[i])) return false;
  }
  return true;
}

}  // namespace mwjoin
