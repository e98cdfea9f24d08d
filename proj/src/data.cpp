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

#include "mdgan/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "mdgan/errors.hpp"

namespace mdgan {

namespace {

std::uint32_t read_be32(const std::vector<unsigned char>& bytes,
                        std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) |
         (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) |
         std::uint32_t{bytes[offset + 3]};
}

}  // namespace

void GaussianRingSpec::validate() const {
  if (modes < 1) throw ConfigError("ring needs at least one mode");
  if (!(stddev > 0.0)) throw ConfigError("ring stddev must be positive");
  if (!(radius >= 0.0)) throw ConfigError("ring radius must be non-negative");
  if (samples_per_mode < 1) {
    throw ConfigError("ring needs at least one sample per mode");
  }
}

Tensor GaussianRingSpec::centers() const {
  Tensor out(static_cast<Eigen::Index>(modes), 2);
  for (std::size_t j = 0; j < modes; ++j) {
    const double angle =
        2.0 * std::numbers::pi * static_cast<double>(j) /
        static_cast<double>(modes);
    out(static_cast<Eigen::Index>(j), 0) = radius * std::cos(angle);
    out(static_cast<Eigen::Index>(j), 1) = radius * std::sin(angle);
  }
  return out;
}

Dataset make_ring(const GaussianRingSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng = make_rng(seed, Stream::kDataset);
  std::normal_distribution<double> noise(0.0, spec.stddev);
  const Tensor centers = spec.centers();
  Dataset ds;
  ds.samples.resize(static_cast<Eigen::Index>(spec.modes * spec.samples_per_mode),
                    2);
  Eigen::Index row = 0;
  for (Eigen::Index j = 0; j < centers.rows(); ++j) {
    for (std::size_t s = 0; s < spec.samples_per_mode; ++s, ++row) {
      ds.samples(row, 0) = centers(j, 0) + noise(rng);
      ds.samples(row, 1) = centers(j, 1) + noise(rng);
    }
  }
  ds.ring = spec;
  std::ostringstream src;
  src << "ring(modes=" << spec.modes << ", radius=" << spec.radius
      << ", stddev=" << spec.stddev
      << ", samples_per_mode=" << spec.samples_per_mode << ")";
  ds.source = src.str();
  return ds;
}

Tensor sample_ring(const GaussianRingSpec& spec, std::size_t count, Rng& rng) {
  spec.validate();
  const Tensor centers = spec.centers();
  std::uniform_int_distribution<Eigen::Index> pick(0, centers.rows() - 1);
  std::normal_distribution<double> noise(0.0, spec.stddev);
  Tensor out(static_cast<Eigen::Index>(count), 2);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Eigen::Index j = pick(rng);
    out(i, 0) = centers(j, 0) + noise(rng);
    out(i, 1) = centers(j, 1) + noise(rng);
  }
  return out;
}

std::vector<Shard> shard_iid(const Dataset& dataset, std::size_t workers,
                             std::uint64_t seed) {
  const std::size_t total = dataset.size();
  if (workers < 1) throw ConfigError("need at least one worker");
  if (workers > total) {
    std::ostringstream msg;
    msg << "cannot split " << total << " samples over " << workers
        << " workers";
    throw ConfigError(msg.str());
  }
  std::vector<Eigen::Index> order(total);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (workers > 1) {
    Rng rng = make_rng(seed, Stream::kShard);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<Shard> shards;
  shards.reserve(workers);
  const std::size_t base = total / workers;
  const std::size_t extra = total % workers;
  std::size_t next = 0;
  for (std::size_t n = 0; n < workers; ++n) {
    const std::size_t count = base + (n < extra ? 1 : 0);
    Shard shard{n + 1,
                Tensor(static_cast<Eigen::Index>(count), dataset.samples.cols())};
    for (std::size_t r = 0; r < count; ++r) {
      shard.samples.row(static_cast<Eigen::Index>(r)) =
          dataset.samples.row(order[next++]);
    }
    shards.push_back(std::move(shard));
  }
  return shards;
}

Dataset load_idx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open IDX file " + path.string());
  const std::vector<unsigned char> bytes(
      (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 4) throw FormatError("IDX file too short for a header");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != 0x00000801 && magic != 0x00000803) {
    std::ostringstream msg;
    msg << "unsupported IDX magic 0x" << std::hex << magic;
    throw FormatError(msg.str());
  }
  const std::size_t ndims = magic & 0xff;
  const std::size_t header = 4 + 4 * ndims;
  if (bytes.size() < header) throw FormatError("IDX header truncated");
  std::vector<std::size_t> dims(ndims);
  for (std::size_t i = 0; i < ndims; ++i) dims[i] = read_be32(bytes, 4 + 4 * i);
  const std::size_t rows = dims[0];
  std::size_t cols = 1;
  for (std::size_t i = 1; i < ndims; ++i) cols *= dims[i];
  if (rows == 0 || cols == 0) throw FormatError("IDX file holds no samples");
  if (bytes.size() - header != rows * cols) {
    std::ostringstream msg;
    msg << "IDX payload has " << bytes.size() - header << " bytes, header "
        << "declares " << rows * cols;
    throw FormatError(msg.str());
  }
  Dataset ds;
  ds.samples.resize(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows * cols; ++i) {
    ds.samples.data()[i] = static_cast<double>(bytes[header + i]) / 255.0;
  }
  ds.source = "idx(" + path.string() + ")";
  return ds;
}

}  // namespace mdgan
