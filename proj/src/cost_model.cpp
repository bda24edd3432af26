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
#include "mwjoin/cost_model.hpp"

#include <cmath>
#include <stdexcept>

namespace mwjoin {

PredictedStats PredictedStats::filled(std::uint32_t n, double gamma0, double mu0,
                                      double kappa0) {
  PredictedStats s;
  s.streams = n;
  s.gamma.assign(std::size_t{n} * n, gamma0);
  s.mu.assign(std::size_t{n} * n, mu0);
  s.kappa.assign(n, kappa0);
  return s;
}

double f_keys(const BackendConfig& backend, double kappa) {
  if (kappa < 0) {
    throw std::invalid_argument("key count cannot be negative");
  }
  if (backend.structure == BackendStructure::HashTable) {
    return backend.base_query_cost +
           kappa / (2.0 * static_cast<double>(backend.slot_count));
  }
  // Binary search: log2 of the key count, zero once there is at most one key.
  return kappa <= 1.0 ? 0.0 : std::log2(kappa);
}

double query_cost(StreamId r, const PredictedStats& stats, const CostContext& ctx) {
  return ctx.params.alpha_q * f_keys(ctx.backends.at(r), stats.kappa.at(r));
}

double match_cost(StreamId l, StreamId r, const PredictedStats& stats,
                  const CostContext& ctx) {
  return ctx.params.alpha_m * stats.mu_at(l, r);
}

std::string SuffixMemo::encode(std::span<const ProbePair> suffix) {
  std::string key;
  key.reserve(suffix.size() * 2);
  for (const ProbePair& p : suffix) {
    key.push_back(static_cast<char>(p.l));
    key.push_back(static_cast<char>(p.r));
  }
  return key;
}

const double* SuffixMemo::find(std::span<const ProbePair> suffix) const {
  auto it = memo_.find(encode(suffix));
  return it == memo_.end() ? nullptr : &it->second;
}

void SuffixMemo::store(std::span<const ProbePair> suffix, double cost) {
  memo_.emplace(encode(suffix), cost);
}

double sequence_cost(std::span<const ProbePair> suffix, const PredictedStats& stats,
                     const CostContext& ctx, SuffixMemo* memo) {
  if (suffix.empty()) return 0.0;
  if (memo != nullptr) {
    if (const double* hit = memo->find(suffix)) return *hit;
  }
  const ProbePair& head = suffix.front();
  const double rest = sequence_cost(suffix.subspan(1), stats, ctx, memo);
  const double cost =
      query_cost(head.r, stats, ctx) +
      stats.gamma_at(head.l, head.r) * (match_cost(head.l, head.r, stats, ctx) + rest);
  if (memo != nullptr) memo->store(suffix, cost);
  return cost;
}

}  // namespace mwjoin
