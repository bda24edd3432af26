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
#include <utility>

#include "mwjoin/cost_model.hpp"
#include "mwjoin/stats.hpp"

namespace mwjoin {

/// Level/trend smoothing weights. phi damps the trend (1.0 = no damping,
/// which makes the damped recurrence identical to the plain linear one).
struct SmoothingParams {
  double alpha = 0.5;
  double beta = 0.3;
  double phi = 0.9;
  std::optional<std::pair<double, double>> clamp;  // [lo, hi] on forecasts
};

/// Level-plus-trend state for double exponential smoothing.
///
/// Initialization: the first observation sets the level; the second sets the
/// trend to the first difference. This makes the linear-trend forecast exact
/// on affine series for any alpha/beta, which the tests rely on.
class SmoothState {
 public:
  bool initialized() const { return has_level_; }
  double level() const { return level_; }
  double trend() const { return trend_; }

  /// Holt linear-trend update. Rejects non-finite observations.
  void holt_update(const SmoothingParams& p, double y);

  /// Damped-trend update (trend attenuated by phi each step).
  void damped_update(const SmoothingParams& p, double y);

  /// One-step-ahead forecast level + trend, clamped to p.clamp.
  /// Empty until the first observation.
  std::optional<double> holt_forecast(const SmoothingParams& p) const;

  /// One-step-ahead forecast level + phi * trend, clamped to p.clamp.
  std::optional<double> damped_forecast(const SmoothingParams& p) const;

 private:
  void update(const SmoothingParams& p, double y, double phi);

  bool has_level_ = false;
  bool has_trend_ = false;
  double level_ = 0.0;
  double trend_ = 0.0;
};

/// Smoothing configuration per forecast quantity.
struct SmoothingSet {
  SmoothingParams gamma;  // damped, clamped to [0,1]
  SmoothingParams mu;     // linear, clamped to >= 1
  SmoothingParams kappa;  // linear, clamped to >= 0
};

/// Fallbacks for quantities with no observations yet.
struct StatPriors {
  double gamma = 0.5;
  double mu = 1.0;
  double kappa = 0.0;
};

/// Runs the per-quantity recurrences over the history (skipping absent
/// entries) and returns next-cycle predictions: damped-trend for match
/// rates, linear-trend for match counts and key counts. Quantities that
/// were never observed take the priors.
PredictedStats forecast_all(const StatHistory& history, std::uint32_t streams,
                            const SmoothingSet& params, const StatPriors& priors);

/// Default clamps applied on top of any user-provided ones.
SmoothingSet default_smoothing();

}  // namespace mwjoin
