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
#include "mwjoin/forecast.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mwjoin {

namespace {

double apply_clamp(double v, const SmoothingParams& p) {
  if (p.clamp) {
    if (v < p.clamp->first) return p.clamp->first;
    if (v > p.clamp->second) return p.clamp->second;
  }
  return v;
}

void check_params(const SmoothingParams& p) {
  auto in_unit = [](double w) { return w > 0.0 && w <= 1.0; };
  if (!in_unit(p.alpha) || !in_unit(p.beta) || !in_unit(p.phi)) {
    throw std::invalid_argument("smoothing weights must lie in (0, 1]");
  }
}

}  // namespace

void SmoothState::update(const SmoothingParams& p, double y, double phi) {
  check_params(p);
  if (!std::isfinite(y)) {
    throw std::invalid_argument("smoothing rejects non-finite observations");
  }
  if (!has_level_) {
    level_ = y;
    has_level_ = true;
    return;
  }
  if (!has_trend_) {
    trend_ = y - level_;
    level_ = y;
    has_trend_ = true;
    return;
  }
  const double prev_level = level_;
  level_ = p.alpha * y + (1.0 - p.alpha) * (prev_level + phi * trend_);
  trend_ = p.beta * (level_ - prev_level) + (1.0 - p.beta) * phi * trend_;
}

void SmoothState::holt_update(const SmoothingParams& p, double y) {
  update(p, y, 1.0);
}

void SmoothState::damped_update(const SmoothingParams& p, double y) {
  update(p, y, p.phi);
}

std::optional<double> SmoothState::holt_forecast(const SmoothingParams& p) const {
  if (!has_level_) return std::nullopt;
  const double raw = has_trend_ ? level_ + trend_ : level_;
  return apply_clamp(raw, p);
}

std::optional<double> SmoothState::damped_forecast(const SmoothingParams& p) const {
  if (!has_level_) return std::nullopt;
  const double raw = has_trend_ ? level_ + p.phi * trend_ : level_;
  return apply_clamp(raw, p);
}

SmoothingSet default_smoothing() {
  SmoothingSet set;
  set.gamma.clamp = {{0.0, 1.0}};
  set.mu.clamp = {{1.0, std::numeric_limits<double>::infinity()}};
  set.kappa.clamp = {{0.0, std::numeric_limits<double>::infinity()}};
  return set;
}

PredictedStats forecast_all(const StatHistory& history, std::uint32_t streams,
                            const SmoothingSet& params, const StatPriors& priors) {
  PredictedStats out =
      PredictedStats::filled(streams, priors.gamma, priors.mu, priors.kappa);

  for (StreamId l = 0; l < streams; ++l) {
    for (StreamId r = 0; r < streams; ++r) {
      SmoothState g_state, m_state;
      for (const CycleStats& snap : history.items()) {
        if (auto g = snap.gamma_at(l, r)) g_state.damped_update(params.gamma, *g);
        if (auto m = snap.mu_at(l, r)) m_state.holt_update(params.mu, *m);
      }
      if (auto f = g_state.damped_forecast(params.gamma)) out.gamma_ref(l, r) = *f;
      if (auto f = m_state.holt_forecast(params.mu)) out.mu_ref(l, r) = *f;
    }
  }
  for (StreamId i = 0; i < streams; ++i) {
    SmoothState k_state;
    for (const CycleStats& snap : history.items()) {
      if (i < snap.kappa.size()) {
        k_state.holt_update(params.kappa, static_cast<double>(snap.kappa[i]));
      }
    }
    if (auto f = k_state.holt_forecast(params.kappa)) out.kappa[i] = *f;
  }
  return out;
}

}  // namespace mwjoin
