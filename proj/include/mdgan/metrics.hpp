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

// Generator quality scores that need no pretrained network: the Frechet
// distance between Gaussian fits of generated and real samples, and mode
// coverage / sample quality against a known mixture.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>

#include <Eigen/Dense>

#include "mdgan/data.hpp"
#include "mdgan/gan.hpp"
#include "mdgan/metrics_row.hpp"

namespace mdgan {

inline constexpr std::size_t kDefaultScoreSamples = 500;
inline constexpr double kDefaultModeThreshold = 3.0;  // in stddevs

// ||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^{1/2}), clamped at zero.
// Throws NumericError for covariances that are not symmetric PSD.
double frechet_gaussian(const Eigen::VectorXd& mean1,
                        const Eigen::MatrixXd& cov1,
                        const Eigen::VectorXd& mean2,
                        const Eigen::MatrixXd& cov2);

struct GaussianFit {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  bool regularized = false;
};

// Sample mean and unbiased covariance. A singular covariance gets 1e-8 * I
// added and is flagged.
GaussianFit fit_gaussian(const Tensor& samples);

struct ScoreOptions {
  std::size_t sample_count = kDefaultScoreSamples;
  double threshold = kDefaultModeThreshold;
};

// Scores already-drawn generated points against a real sample. Mode scores
// are only defined when `ring` is given; they are zero otherwise.
MetricsRow score_samples(const Tensor& generated, const Tensor& real,
                         const std::optional<GaussianRingSpec>& ring,
                         double threshold);

// Draws `options.sample_count` generated points and as many real points
// (fresh ring draws for synthetic data, rows of `dataset` otherwise), both
// from streams keyed on (seed, iteration).
MetricsRow score_generator(const Generator& g, const Dataset& dataset,
                           const ScoreOptions& options, std::uint64_t seed,
                           std::int64_t iteration);

// Scorer bound to one dataset, for the training loops.
Scorer make_scorer(const Dataset& dataset, ScoreOptions options,
                   std::uint64_t seed);

// CSV: iteration,frechet,mode_coverage,quality_fraction
void write_metrics_csv(std::ostream& out, const MetricsSeries& series);

}  // namespace mdgan
