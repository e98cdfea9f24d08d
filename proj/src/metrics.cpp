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

#include "mdgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "mdgan/errors.hpp"

namespace mdgan {

namespace {

constexpr double kRegularization = 1e-8;

double psd_tolerance(const Eigen::MatrixXd& m) {
  return 1e-9 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

void check_psd(const Eigen::MatrixXd& cov, const char* name) {
  if (cov.rows() != cov.cols()) {
    throw NumericError(std::string(name) + " is not square");
  }
  const double tol = psd_tolerance(cov);
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw NumericError(std::string(name) + " is not symmetric");
  }
  if (cov.rows() <= 2) {
    // A symmetric 2x2 (or 1x1) matrix is PSD iff its diagonal and
    // determinant are non-negative.
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
      if (cov(i, i) < -tol) {
        throw NumericError(std::string(name) + " is not positive semidefinite");
      }
    }
    if (cov.rows() == 2 && cov.determinant() < -tol * tol) {
      throw NumericError(std::string(name) + " is not positive semidefinite");
    }
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov,
                                                     Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -tol) {
    throw NumericError(std::string(name) + " is not positive semidefinite");
  }
}

// Tr((S1 S2)^{1/2}). S1 S2 is similar to the PSD matrix S1^{1/2} S2 S1^{1/2},
// so its eigenvalues are real and non-negative.
double trace_sqrt_product(const Eigen::MatrixXd& cov1,
                          const Eigen::MatrixXd& cov2) {
  const Eigen::Index d = cov1.rows();
  if (d == 1) return std::sqrt(std::max(0.0, cov1(0, 0) * cov2(0, 0)));
  if (d == 2) {
    // For eigenvalues l1, l2 >= 0: (sqrt l1 + sqrt l2)^2 = tr + 2 sqrt det.
    const Eigen::Matrix2d product =
        cov1.topLeftCorner<2, 2>() * cov2.topLeftCorner<2, 2>();
    const double det = std::max(0.0, product.determinant());
    return std::sqrt(std::max(0.0, product.trace() + 2.0 * std::sqrt(det)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig1(cov1);
  const Eigen::VectorXd roots = eig1.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd root1 =
      eig1.eigenvectors() * roots.asDiagonal() * eig1.eigenvectors().transpose();
  const Eigen::MatrixXd inner = root1 * cov2 * root1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig2(
      0.5 * (inner + inner.transpose()), Eigen::EigenvaluesOnly);
  return eig2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

}  // namespace

double frechet_gaussian(const Eigen::VectorXd& mean1,
                        const Eigen::MatrixXd& cov1,
                        const Eigen::VectorXd& mean2,
                        const Eigen::MatrixXd& cov2) {
  const Eigen::Index d = mean1.size();
  if (mean2.size() != d || cov1.rows() != d || cov2.rows() != d) {
    throw ShapeError("Frechet distance arguments disagree on dimension");
  }
  check_psd(cov1, "first covariance");
  check_psd(cov2, "second covariance");
  const double mean_term = (mean1 - mean2).squaredNorm();
  const double value = mean_term + cov1.trace() + cov2.trace() -
                       2.0 * trace_sqrt_product(cov1, cov2);
  return std::max(0.0, value);
}

GaussianFit fit_gaussian(const Tensor& samples) {
  if (samples.rows() < 2) {
    throw ConfigError("a Gaussian fit needs at least two samples");
  }
  GaussianFit fit;
  fit.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered =
      samples.rowwise() - fit.mean.transpose();
  fit.cov = (centered.transpose() * centered) /
            static_cast<double>(samples.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.cov,
                                                     Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, fit.cov.cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() <= 1e-12 * scale) {
    fit.cov += kRegularization *
               Eigen::MatrixXd::Identity(fit.cov.rows(), fit.cov.cols());
    fit.regularized = true;
  }
  return fit;
}

MetricsRow score_samples(const Tensor& generated, const Tensor& real,
                         const std::optional<GaussianRingSpec>& ring,
                         double threshold) {
  const GaussianFit gen_fit = fit_gaussian(generated);
  const GaussianFit real_fit = fit_gaussian(real);
  MetricsRow row;
  row.frechet = frechet_gaussian(gen_fit.mean, gen_fit.cov, real_fit.mean,
                                 real_fit.cov);
  row.covariance_regularized = gen_fit.regularized || real_fit.regularized;
  if (!ring || generated.cols() != 2) return row;

  const Tensor centers = ring->centers();
  const double radius = threshold * ring->stddev;
  const double radius_sq = radius * radius;
  std::vector<bool> hit(static_cast<std::size_t>(centers.rows()), false);
  std::size_t good = 0;
  for (Eigen::Index i = 0; i < generated.rows(); ++i) {
    Eigen::Index nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < centers.rows(); ++j) {
      const double dist = (generated.row(i) - centers.row(j)).squaredNorm();
      if (dist < best) {
        best = dist;
        nearest = j;
      }
    }
    if (best <= radius_sq) {
      ++good;
      hit[static_cast<std::size_t>(nearest)] = true;
    }
  }
  row.mode_coverage =
      static_cast<double>(std::count(hit.begin(), hit.end(), true)) /
      static_cast<double>(centers.rows());
  row.quality_fraction =
      static_cast<double>(good) / static_cast<double>(generated.rows());
  return row;
}

MetricsRow score_generator(const Generator& g, const Dataset& dataset,
                           const ScoreOptions& options, std::uint64_t seed,
                           std::int64_t iteration) {
  if (options.sample_count < 2) {
    throw ConfigError("scoring needs at least two samples");
  }
  const auto index = static_cast<std::uint64_t>(iteration);
  Rng gen_rng = make_rng(seed, Stream::kMetrics, index);
  Rng real_rng = make_rng(seed, Stream::kMetricsReal, index);
  const Tensor generated =
      generate(g, sample_noise(options.sample_count, g.noise_dim, gen_rng))
          .samples;
  const Tensor real =
      dataset.ring ? sample_ring(*dataset.ring, options.sample_count, real_rng)
                   : sample_real(dataset.samples, options.sample_count,
                                 real_rng)
                         .samples;
  MetricsRow row = score_samples(generated, real, dataset.ring,
                                 options.threshold);
  row.iteration = iteration;
  return row;
}

Scorer make_scorer(const Dataset& dataset, ScoreOptions options,
                   std::uint64_t seed) {
  return [&dataset, options, seed](const Generator& g,
                                   std::int64_t iteration) {
    return score_generator(g, dataset, options, seed, iteration);
  };
}

void write_metrics_csv(std::ostream& out, const MetricsSeries& series) {
  out << "iteration,frechet,mode_coverage,quality_fraction\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (const MetricsRow& row : series) {
    line.str("");
    line << row.iteration << ',' << row.frechet << ',' << row.mode_coverage
         << ',' << row.quality_fraction << '\n';
    out << line.str();
  }
}

}  // namespace mdgan
