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

#include "mdgan/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mdgan/errors.hpp"

namespace mdgan {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value '" + std::string(value) + "' for key '" +
                    std::string(key) + "'");
}

template <class T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value);
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(out)) {
    bad_value(key, value);
  }
  return out;
}

std::vector<std::size_t> parse_widths(std::string_view key,
                                      std::string_view value) {
  std::vector<std::size_t> out;
  if (value == "none" || value.empty()) return out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::string_view item = trim(value.substr(start, comma - start));
    const auto width = parse_integer<std::size_t>(key, item);
    if (width == 0) bad_value(key, value);
    out.push_back(width);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general);
  return std::string(buf, ptr);
}

std::string format_widths(const std::vector<std::size_t>& widths) {
  if (widths.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(widths[i]);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> kKeys = {
      "protocol",           "seed",
      "dataset",            "ring_modes",
      "ring_radius",        "ring_stddev",
      "ring_samples_per_mode", "idx_path",
      "workers",            "batch_size",
      "k",                  "k_log_base",
      "epochs",             "disc_steps",
      "iterations",         "checkpoint_stride",
      "noise_dim",          "gen_hidden",
      "disc_hidden",        "gen_activation",
      "disc_activation",    "gen_learning_rate",
      "gen_beta1",          "gen_beta2",
      "disc_learning_rate", "disc_beta1",
      "disc_beta2",         "score_samples",
      "mode_threshold",     "crash",
      "output_dir"};
  return kKeys;
}

void ExperimentConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "protocol") {
    protocol = parse_protocol(value);
  } else if (key == "seed") {
    seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "dataset") {
    if (value != "ring" && value != "idx") bad_value(key, value);
    dataset = std::string(value);
  } else if (key == "ring_modes") {
    ring.modes = parse_integer<std::size_t>(key, value);
  } else if (key == "ring_radius") {
    ring.radius = parse_double(key, value);
  } else if (key == "ring_stddev") {
    ring.stddev = parse_double(key, value);
  } else if (key == "ring_samples_per_mode") {
    ring.samples_per_mode = parse_integer<std::size_t>(key, value);
  } else if (key == "idx_path") {
    idx_path = std::string(value);
  } else if (key == "workers") {
    workers = parse_integer<std::size_t>(key, value);
  } else if (key == "batch_size") {
    batch_size = parse_integer<std::size_t>(key, value);
  } else if (key == "k") {
    if (value == "auto") {
      k.reset();
    } else {
      k = parse_integer<std::size_t>(key, value);
    }
  } else if (key == "k_log_base") {
    if (value != "e" && value != "2" && value != "10") bad_value(key, value);
    k_log_base = std::string(value);
  } else if (key == "epochs") {
    epochs = parse_integer<std::size_t>(key, value);
  } else if (key == "disc_steps") {
    disc_steps = parse_integer<int>(key, value);
  } else if (key == "iterations") {
    iterations = parse_integer<std::int64_t>(key, value);
  } else if (key == "checkpoint_stride") {
    checkpoint_stride = parse_integer<std::int64_t>(key, value);
  } else if (key == "noise_dim") {
    noise_dim = parse_integer<std::size_t>(key, value);
  } else if (key == "gen_hidden") {
    gen_shape.hidden = parse_widths(key, value);
  } else if (key == "disc_hidden") {
    disc_shape.hidden = parse_widths(key, value);
  } else if (key == "gen_activation") {
    gen_shape.hidden_activation = parse_activation(value);
  } else if (key == "disc_activation") {
    disc_shape.hidden_activation = parse_activation(value);
  } else if (key == "gen_learning_rate") {
    gen_adam.learning_rate = parse_double(key, value);
  } else if (key == "gen_beta1") {
    gen_adam.beta1 = parse_double(key, value);
  } else if (key == "gen_beta2") {
    gen_adam.beta2 = parse_double(key, value);
  } else if (key == "disc_learning_rate") {
    disc_adam.learning_rate = parse_double(key, value);
  } else if (key == "disc_beta1") {
    disc_adam.beta1 = parse_double(key, value);
  } else if (key == "disc_beta2") {
    disc_adam.beta2 = parse_double(key, value);
  } else if (key == "score_samples") {
    score_samples = parse_integer<std::size_t>(key, value);
  } else if (key == "mode_threshold") {
    mode_threshold = parse_double(key, value);
  } else if (key == "crash") {
    crash = std::string(value);
    if (crash != "none" && crash != "every") crash_schedule();  // validates
  } else if (key == "output_dir") {
    output_dir = std::string(value);
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::validate() const {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (disc_steps < 1) throw ConfigError("disc_steps must be >= 1");
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (checkpoint_stride < 1) throw ConfigError("checkpoint_stride must be >= 1");
  if (noise_dim < 1) throw ConfigError("noise_dim must be >= 1");
  if (score_samples < 2) throw ConfigError("score_samples must be >= 2");
  if (!(mode_threshold > 0.0)) throw ConfigError("mode_threshold must be > 0");
  if (k && (*k < 1 || *k > workers)) {
    throw ConfigError("k must satisfy 1 <= k <= workers");
  }
  if (dataset == "ring") {
    ring.validate();
    if (ring.modes * ring.samples_per_mode < workers) {
      throw ConfigError("fewer ring samples than workers");
    }
  } else if (idx_path.empty()) {
    throw ConfigError("dataset = idx requires idx_path");
  }
  for (const AdamConfig* adam : {&gen_adam, &disc_adam}) {
    if (adam->learning_rate < 0.0 || adam->beta1 < 0.0 || adam->beta1 >= 1.0 ||
        adam->beta2 < 0.0 || adam->beta2 >= 1.0) {
      throw ConfigError("Adam hyper-parameters out of range");
    }
  }
  crash_schedule().validate(workers);
}

std::size_t resolve_k(std::size_t workers, std::string_view log_base) {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  const double n = static_cast<double>(workers);
  double log_value = 0.0;
  if (log_base == "e") {
    log_value = std::log(n);
  } else if (log_base == "2") {
    log_value = std::log2(n);
  } else if (log_base == "10") {
    log_value = std::log10(n);
  } else {
    throw ConfigError("unsupported log base '" + std::string(log_base) + "'");
  }
  const auto k = static_cast<std::size_t>(std::floor(log_value));
  return std::clamp<std::size_t>(k, 1, workers);
}

std::size_t ExperimentConfig::resolved_k() const {
  return k ? *k : resolve_k(workers, k_log_base);
}

CrashSchedule ExperimentConfig::crash_schedule() const {
  if (crash == "none") return {};
  if (crash == "every") return CrashSchedule::every(workers, iterations);
  CrashSchedule schedule;
  std::string_view rest = crash;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    const std::size_t at = item.find('@');
    if (at == std::string_view::npos) bad_value("crash", crash);
    schedule.events.push_back(
        {parse_integer<std::size_t>("crash", trim(item.substr(0, at))),
         parse_integer<std::int64_t>("crash", trim(item.substr(at + 1)))});
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return schedule;
}

std::set<std::int64_t> ExperimentConfig::checkpoints() const {
  std::set<std::int64_t> out;
  for (std::int64_t i = checkpoint_stride; i <= iterations;
       i += checkpoint_stride) {
    out.insert(i);
  }
  return out;
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  out << "protocol = " << to_string(protocol) << "\n";
  if (seed) out << "seed = " << *seed << "\n";
  out << "dataset = " << dataset << "\n"
      << "ring_modes = " << ring.modes << "\n"
      << "ring_radius = " << format_double(ring.radius) << "\n"
      << "ring_stddev = " << format_double(ring.stddev) << "\n"
      << "ring_samples_per_mode = " << ring.samples_per_mode << "\n";
  if (!idx_path.empty()) out << "idx_path = " << idx_path << "\n";
  out << "workers = " << workers << "\n"
      << "batch_size = " << batch_size << "\n"
      << "k = " << (k ? std::to_string(*k) : std::string("auto")) << "\n"
      << "k_log_base = " << k_log_base << "\n"
      << "# k resolves to " << resolved_k() << "\n"
      << "epochs = " << epochs << "\n"
      << "disc_steps = " << disc_steps << "\n"
      << "iterations = " << iterations << "\n"
      << "checkpoint_stride = " << checkpoint_stride << "\n"
      << "noise_dim = " << noise_dim << "\n"
      << "gen_hidden = " << format_widths(gen_shape.hidden) << "\n"
      << "disc_hidden = " << format_widths(disc_shape.hidden) << "\n"
      << "gen_activation = " << to_string(gen_shape.hidden_activation) << "\n"
      << "disc_activation = " << to_string(disc_shape.hidden_activation)
      << "\n"
      << "gen_learning_rate = " << format_double(gen_adam.learning_rate)
      << "\n"
      << "gen_beta1 = " << format_double(gen_adam.beta1) << "\n"
      << "gen_beta2 = " << format_double(gen_adam.beta2) << "\n"
      << "disc_learning_rate = " << format_double(disc_adam.learning_rate)
      << "\n"
      << "disc_beta1 = " << format_double(disc_adam.beta1) << "\n"
      << "disc_beta2 = " << format_double(disc_adam.beta2) << "\n"
      << "score_samples = " << score_samples << "\n"
      << "mode_threshold = " << format_double(mode_threshold) << "\n"
      << "crash = " << crash << "\n"
      << "output_dir = " << output_dir << "\n";
  return out.str();
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    config.set(trim(view.substr(0, eq)), view.substr(eq + 1));
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

std::size_t mlp_param_count(const std::vector<std::size_t>& dims) {
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    count += dims[i] * dims[i + 1] + dims[i + 1];
  }
  return count;
}

}  // namespace mdgan
