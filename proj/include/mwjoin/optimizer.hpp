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

#include <optional>
#include <string_view>
#include <vector>

#include "mwjoin/cost_model.hpp"
#include "mwjoin/forecast.hpp"
#include "mwjoin/join_model.hpp"
#include "mwjoin/stats.hpp"

namespace mwjoin {

enum class Strategy {
  dpPick,
  fixedOrder,
  selectivityFirst,
  greedy_MSJ,
  dpPick_queryCost,
  dpPick_matchCost,
  dpPick_noSmooth,
};

Strategy strategy_from_string(std::string_view name);
std::string_view to_string(Strategy s);

/// How selectivityFirst ranks candidate pairs: predicted match rate alone
/// (the default), or match rate times match count.
enum class SelectivityMetric { Gamma, GammaTimesMu };

/// Every legal probe sequence of the graph, for every start stream, in
/// deterministic order: starts ascending, and within a start the DFS visits
/// candidate pairs by (edge index, forward-then-reverse direction).
/// Disconnected graphs enumerate to an empty list. Throws for more than
/// 8 streams; enumeration is factorial and meant for small joins.
std::vector<ProbeSequence> get_sequences(const JoinGraph& g);

struct CostDictEntry {
  ProbeSequence sequence;
  double cost = 0.0;
};

/// Best sequence and cost per start stream; index is the StreamId.
using CostDict = std::vector<std::optional<CostDictEntry>>;

/// Exhaustive minimum-expected-cost pick: enumerates every sequence, costs
/// each one against a suffix memo shared across the whole invocation, and
/// keeps the first-found minimum per start stream (strict improvement only,
/// so enumeration order breaks ties).
CostDict dp_pick(const JoinGraph& g, const PredictedStats& stats,
                 const CostContext& ctx);

/// One-step lookahead: repeatedly appends the frontier pair with the
/// smallest single-step cost alpha_q*f(kappa_r) + gamma*alpha_m*mu.
ProbeOrderTable greedy_pick(const JoinGraph& g, const PredictedStats& stats,
                            const CostContext& ctx);

/// Repeatedly appends the frontier pair with the smallest selectivity.
ProbeOrderTable selectivity_pick(const JoinGraph& g, const PredictedStats& stats,
                                 SelectivityMetric metric);

/// Everything select_order needs to evaluate a strategy at a cycle boundary.
struct SelectInputs {
  const JoinGraph& graph;
  const StatHistory& history;
  const ProbeOrderTable& current_orders;
  CostContext cost;
  SmoothingSet smoothing;
  StatPriors priors;
  SelectivityMetric selectivity_metric = SelectivityMetric::Gamma;
};

/// Dispatches on the strategy: fixedOrder returns the current table
/// untouched; the dpPick family re-optimizes from forecasts (or from the
/// latest raw cycle for the no-smoothing variant, with coefficient forcing
/// for the single-cost variants); the greedy and selectivity baselines
/// build orders from the same forecasts.
ProbeOrderTable select_order(Strategy strategy, const SelectInputs& in);

/// Raw latest-cycle statistics with priors filling the gaps; what the
/// no-smoothing variant feeds the cost model.
PredictedStats stats_from_latest(const StatHistory& history, std::uint32_t streams,
                                 const StatPriors& priors);

}  // namespace mwjoin
