// Copyright 2026 The MD-GAN Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace mdgan {

struct Generator;

// Quality of the generator at one checkpoint.
struct MetricsRow {
  std::int64_t iteration = 0;
  double frechet = 0.0;
  double mode_coverage = 0.0;
  double quality_fraction = 0.0;
  // Set when a fitted covariance was singular and had to be regularized.
  bool covariance_regularized = false;

  bool operator==(const MetricsRow&) const = default;
};

using MetricsSeries = std::vector<MetricsRow>;

using Scorer =
    std::function<MetricsRow(const Generator& generator, std::int64_t iteration)>;

}  // namespace mdgan
