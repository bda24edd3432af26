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
#include <unordered_map>
#include <vector>

#include "mwjoin/join_model.hpp"
#include "mwjoin/state_backend.hpp"

namespace mwjoin {

/// Coefficients of the probe cost model. Rejecting both-zero configurations
/// happens at config load; the ablation strategies force one side to zero.
struct CostParams {
  double alpha_q = 1.0;  // weight of one state lookup
  double alpha_m = 1.0;  // weight per matched record
};

/// Next-cycle predictions feeding the cost model: match rate per directed
/// pair (in [0,1]), average records per successful query (>= 1), and live
/// key count per stream (>= 0). Values are real-valued; forecasts are
/// expectations, not executions.
struct PredictedStats {
  std::uint32_t streams = 0;
  std::vector<double> gamma;  // n*n
  std::vector<double> mu;     // n*n
  std::vector<double> kappa;  // n

  static PredictedStats filled(std::uint32_t n, double gamma0, double mu0,
                               double kappa0);

  double gamma_at(StreamId l, StreamId r) const {
    return gamma[std::size_t{l} * streams + r];
  }
  double mu_at(StreamId l, StreamId r) const {
    return mu[std::size_t{l} * streams + r];
  }
  double& gamma_ref(StreamId l, StreamId r) {
    return gamma[std::size_t{l} * streams + r];
  }
  double& mu_ref(StreamId l, StreamId r) {
    return mu[std::size_t{l} * streams + r];
  }
};

/// Cost model inputs that stay fixed across one optimization pass.
struct CostContext {
  CostParams params;
  std::vector<BackendConfig> backends;  // per stream
};

/// Lookup cost as a function of the live key count. Hash tables pay the
/// base cost plus the expected collision-chain traversal kappa/(2m); sorted
/// storage pays a binary-search log2(kappa), zero for kappa <= 1.
double f_keys(const BackendConfig& backend, double kappa);

/// Expected cost of one lookup in stream r's state.
double query_cost(StreamId r, const PredictedStats& stats, const CostContext& ctx);

/// Expected cost of matching l's records against r's state on a hit.
double match_cost(StreamId l, StreamId r, const PredictedStats& stats,
                  const CostContext& ctx);

/// Memo of suffix costs, keyed by the exact ordered remaining pairs. Suffix
/// costs are context-free (they depend only on the pairs in the suffix), so
/// one memo is shared across every sequence of an optimization pass.
class SuffixMemo {
 public:
  const double* find(std::span<const ProbePair> suffix) const;
  void store(std::span<const ProbePair> suffix, double cost);
  std::size_t size() const { return memo_.size(); }

 private:
  static std::string encode(std::span<const ProbePair> suffix);
  std::unordered_map<std::string, double> memo_;
};

/// Expected total cost of probing the given suffix of a sequence:
/// 0 for the empty suffix, otherwise
///   query_cost(r1) + gamma[l1][r1] * (match_cost(l1,r1) + cost(rest)).
/// The memo, when given, is consulted before recursing and populated after.
double sequence_cost(std::span<const ProbePair> suffix, const PredictedStats& stats,
                     const CostContext& ctx, SuffixMemo* memo);

}  // namespace mwjoin
