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
#include "mwjoin/optimizer.hpp"

#include <limits>
#include <stdexcept>

namespace mwjoin {

namespace {

constexpr std::uint32_t kMaxStreamsForEnumeration = 8;

/// Candidate pairs from the visited set into unvisited streams, in the
/// deterministic (edge index, forward-then-reverse) order every search in
/// this module shares.
void for_each_frontier_pair(const JoinGraph& g, const std::vector<bool>& visited,
                            const auto& fn) {
  const auto& edges = g.edges();
  for (std::uint32_t e = 0; e < edges.size(); ++e) {
    const JoinEdge& edge = edges[e];
    if (visited[edge.a] && !visited[edge.b]) {
      fn(ProbePair{edge.a, edge.b, e});
    }
    if (visited[edge.b] && !visited[edge.a]) {
      fn(ProbePair{edge.b, edge.a, e});
    }
  }
}

void dfs_sequences(const JoinGraph& g, std::vector<bool>& visited,
                   std::uint32_t visited_count, ProbeSequence& current,
                   std::vector<ProbeSequence>& out) {
  if (visited_count == g.stream_count()) {
    out.push_back(current);
    return;
  }
  for_each_frontier_pair(g, visited, [&](const ProbePair& p) {
    visited[p.r] = true;
    current.pairs.push_back(p);
    dfs_sequences(g, visited, visited_count + 1, current, out);
    current.pairs.pop_back();
    visited[p.r] = false;
  });
}

ProbeOrderTable table_from_dict(const JoinGraph& g, const CostDict& dict) {
  ProbeOrderTable table;
  table.orders.resize(g.stream_count());
  for (StreamId i = 0; i < g.stream_count(); ++i) {
    if (!dict[i].has_value()) {
      throw std::runtime_error("no probe sequence found for stream " +
                               std::to_string(i) + "; graph is not connected");
    }
    table.orders[i] = dict[i]->sequence;
  }
  return table;
}

/// Builds one order per start by repeatedly taking the frontier pair with
/// the minimal score (first wins on ties).
ProbeOrderTable pick_stepwise(const JoinGraph& g, const auto& score) {
  const std::uint32_t n = g.stream_count();
  ProbeOrderTable table;
  table.orders.resize(n);
  for (StreamId start = 0; start < n; ++start) {
    ProbeSequence seq;
    seq.start = start;
    std::vector<bool> visited(n, false);
    visited[start] = true;
    for (std::uint32_t step = 0; step + 1 < n; ++step) {
      std::optional<ProbePair> best;
      double best_score = std::numeric_limits<double>::infinity();
      for_each_frontier_pair(g, visited, [&](const ProbePair& p) {
        const double s = score(p);
        if (s < best_score) {
          best_score = s;
          best = p;
        }
      });
      if (!best.has_value()) {
        throw std::runtime_error("no probe sequence found for stream " +
                                 std::to_string(start) +
                                 "; graph is not connected");
      }
      visited[best->r] = true;
      seq.pairs.push_back(*best);
    }
    table.orders[start] = seq;
  }
  return table;
}

}  // namespace

Strategy strategy_from_string(std::string_view name) {
  if (name == "dpPick") return Strategy::dpPick;
  if (name == "fixedOrder") return Strategy::fixedOrder;
  if (name == "selectivityFirst") return Strategy::selectivityFirst;
  if (name == "greedy_MSJ") return Strategy::greedy_MSJ;
  if (name == "dpPick_queryCost") return Strategy::dpPick_queryCost;
  if (name == "dpPick_matchCost") return Strategy::dpPick_matchCost;
  if (name == "dpPick_noSmooth") return Strategy::dpPick_noSmooth;
  throw std::invalid_argument("unknown strategy: " + std::string(name));
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::dpPick: return "dpPick";
    case Strategy::fixedOrder: return "fixedOrder";
    case Strategy::selectivityFirst: return "selectivityFirst";
    case Strategy::greedy_MSJ: return "greedy_MSJ";
    case Strategy::dpPick_queryCost: return "dpPick_queryCost";
    case Strategy::dpPick_matchCost: return "dpPick_matchCost";
    case Strategy::dpPick_noSmooth: return "dpPick_noSmooth";
  }
  return "unknown";
}

std::vector<ProbeSequence> get_sequences(const JoinGraph& g) {
  if (g.stream_count() > kMaxStreamsForEnumeration) {
    throw std::invalid_argument(
        "probe-order enumeration is exhaustive and limited to " +
        std::to_string(kMaxStreamsForEnumeration) + " streams; got " +
        std::to_string(g.stream_count()));
  }
  std::vector<ProbeSequence> out;
  std::vector<bool> visited(g.stream_count(), false);
  for (StreamId start = 0; start < g.stream_count(); ++start) {
    ProbeSequence current;
    current.start = start;
    visited[start] = true;
    dfs_sequences(g, visited, 1, current, out);
    visited[start] = false;
  }
  return out;
}

CostDict dp_pick(const JoinGraph& g, const PredictedStats& stats,
                 const CostContext& ctx) {
  CostDict dict(g.stream_count());
  SuffixMemo memo;  // shared across all sequences of this invocation
  for (const ProbeSequence& seq : get_sequences(g)) {
    const double cost = sequence_cost(seq.pairs, stats, ctx, &memo);
    auto& entry = dict[seq.start];
    if (!entry.has_value() || cost < entry->cost) {
      entry = CostDictEntry{seq, cost};
    }
  }
  return dict;
}

ProbeOrderTable greedy_pick(const JoinGraph& g, const PredictedStats& stats,
                            const CostContext& ctx) {
  return pick_stepwise(g, [&](const ProbePair& p) {
    return query_cost(p.r, stats, ctx) +
           stats.gamma_at(p.l, p.r) * match_cost(p.l, p.r, stats, ctx);
  });
}

ProbeOrderTable selectivity_pick(const JoinGraph& g, const PredictedStats& stats,
                                 SelectivityMetric metric) {
  return pick_stepwise(g, [&](const ProbePair& p) {
    const double gamma = stats.gamma_at(p.l, p.r);
    return metric == SelectivityMetric::Gamma ? gamma
                                              : gamma * stats.mu_at(p.l, p.r);
  });
}

PredictedStats stats_from_latest(const StatHistory& history, std::uint32_t streams,
                                 const StatPriors& priors) {
  PredictedStats out =
      PredictedStats::filled(streams, priors.gamma, priors.mu, priors.kappa);
  if (history.empty()) return out;
  const CycleStats& last = history.latest();
  for (StreamId l = 0; l < streams; ++l) {
    for (StreamId r = 0; r < streams; ++r) {
      if (auto gv = last.gamma_at(l, r)) out.gamma_ref(l, r) = *gv;
      if (auto mv = last.mu_at(l, r)) out.mu_ref(l, r) = *mv;
    }
  }
  for (StreamId i = 0; i < streams && i < last.kappa.size(); ++i) {
    out.kappa[i] = static_cast<double>(last.kappa[i]);
  }
  return out;
}

ProbeOrderTable select_order(Strategy strategy, const SelectInputs& in) {
  const std::uint32_t n = in.graph.stream_count();
  switch (strategy) {
    case Strategy::fixedOrder:
      return in.current_orders;

    case Strategy::dpPick: {
      const PredictedStats stats =
          forecast_all(in.history, n, in.smoothing, in.priors);
      return table_from_dict(in.graph, dp_pick(in.graph, stats, in.cost));
    }

    case Strategy::dpPick_noSmooth: {
      const PredictedStats stats = stats_from_latest(in.history, n, in.priors);
      return table_from_dict(in.graph, dp_pick(in.graph, stats, in.cost));
    }

    case Strategy::dpPick_queryCost: {
      const PredictedStats stats =
          forecast_all(in.history, n, in.smoothing, in.priors);
      CostContext ctx = in.cost;
      ctx.params.alpha_m = 0.0;
      return table_from_dict(in.graph, dp_pick(in.graph, stats, ctx));
    }

    case Strategy::dpPick_matchCost: {
      const PredictedStats stats =
          forecast_all(in.history, n, in.smoothing, in.priors);
      CostContext ctx = in.cost;
      ctx.params.alpha_q = 0.0;
      return table_from_dict(in.graph, dp_pick(in.graph, stats, ctx));
    }

    case Strategy::greedy_MSJ: {
      const PredictedStats stats =
          forecast_all(in.history, n, in.smoothing, in.priors);
      return greedy_pick(in.graph, stats, in.cost);
    }

    case Strategy::selectivityFirst: {
      const PredictedStats stats =
          forecast_all(in.history, n, in.smoothing, in.priors);
      return selectivity_pick(in.graph, stats, in.selectivity_metric);
    }
  }
  throw std::invalid_argument("unknown strategy");
}

}  // namespace mwjoin
