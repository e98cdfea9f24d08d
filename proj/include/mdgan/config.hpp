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
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mdgan/cluster.hpp"
#include "mdgan/cost.hpp"
#include "mdgan/data.hpp"
#include "mdgan/gan.hpp"

namespace mdgan {

// Experiment description, read from a `key = value` text file (one pair per
// line, `#` starts a comment). The accepted keys are listed by
// ExperimentConfig::keys() and documented in the README. to_text() writes
// every key, defaults included, so the output can be fed back in.
struct ExperimentConfig {
  ProtocolKind protocol = ProtocolKind::kMdGan;
  std::optional<std::uint64_t> seed;

  std::string dataset = "ring";  // ring | idx
  GaussianRingSpec ring;
  std::string idx_path;

  std::size_t workers = 10;
  std::size_t batch_size = 10;
  std::optional<std::size_t> k;  // unset: floor(log_base N), at least 1
  std::string k_log_base = "e";  // e | 2 | 10
  std::size_t epochs = 1;
  int disc_steps = 1;
  std::int64_t iterations = 10000;
  std::int64_t checkpoint_stride = 1000;

  std::size_t noise_dim = 2;
  NetworkShape gen_shape{{64, 64}, Activation::kRelu};
  NetworkShape disc_shape{{64, 64}, Activation::kRelu};
  AdamConfig gen_adam;
  AdamConfig disc_adam;

  std::size_t score_samples = 500;
  double mode_threshold = 3.0;

  std::string crash = "none";  // none | every | "w@i,w@i,..."

  std::string output_dir = "out";

  static const std::vector<std::string>& keys();

  // Throws ConfigError for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  void validate() const;

  std::size_t resolved_k() const;
  CrashSchedule crash_schedule() const;
  std::set<std::int64_t> checkpoints() const;

  std::string to_text() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

// floor(log_base(workers)) clamped to [1, workers].
std::size_t resolve_k(std::size_t workers, std::string_view log_base);

// Weights plus biases of an MLP with the given layer widths.
std::size_t mlp_param_count(const std::vector<std::size_t>& dims);

}  // namespace mdgan
