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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mdgan/nn.hpp"
#include "mdgan/rng.hpp"

namespace mdgan {

// Mixture of isotropic Gaussians whose centers sit evenly on a circle.
struct GaussianRingSpec {
  std::size_t modes = 8;
  double radius = 2.0;
  double stddev = 0.05;
  std::size_t samples_per_mode = 1000;

  void validate() const;
  // modes x 2, center j at angle 2*pi*j/modes.
  Tensor centers() const;
};

struct Dataset {
  Tensor samples;  // m_total x d
  std::optional<GaussianRingSpec> ring;
  std::string source;

  std::size_t size() const { return static_cast<std::size_t>(samples.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(samples.cols()); }
};

struct Shard {
  std::size_t owner = 0;  // worker index, 1-based
  Tensor samples;
};

Dataset make_ring(const GaussianRingSpec& spec, std::uint64_t seed);

// `count` fresh draws from the ring mixture, modes picked uniformly.
Tensor sample_ring(const GaussianRingSpec& spec, std::size_t count, Rng& rng);

// Shuffles the rows under `seed`, then cuts them into `workers` contiguous
// shards whose sizes differ by at most one. A single worker receives the
// dataset rows unshuffled.
std::vector<Shard> shard_iid(const Dataset& dataset, std::size_t workers,
                             std::uint64_t seed);

// Big-endian IDX file of unsigned bytes (magic 0x00000801 or 0x00000803).
// Each leading-dimension entry becomes one row, scaled to [0, 1].
Dataset load_idx(const std::filesystem::path& path);

}  // namespace mdgan
