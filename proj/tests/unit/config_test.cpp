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

#include <sstream>

#include <gtest/gtest.h>

#include "mdgan/config.hpp"
#include "mdgan/errors.hpp"

namespace mdgan {
namespace {

TEST(ResolveK, NaturalLogByDefault) {
  EXPECT_EQ(resolve_k(10, "e"), 2u);
  EXPECT_EQ(resolve_k(10, "2"), 3u);
  EXPECT_EQ(resolve_k(10, "10"), 1u);
  EXPECT_EQ(resolve_k(1, "e"), 1u);
  EXPECT_EQ(resolve_k(2, "e"), 1u);
  EXPECT_EQ(resolve_k(8, "2"), 3u);
  EXPECT_EQ(resolve_k(100, "10"), 2u);
  EXPECT_THROW(resolve_k(10, "3"), ConfigError);
  ExperimentConfig c;
  EXPECT_EQ(c.resolved_k(), 2u);
  c.k = 5;
  EXPECT_EQ(c.resolved_k(), 5u);
}

TEST(Checkpoints, StrideMultiples) {
  ExperimentConfig c;
  c.iterations = 20000;
  c.checkpoint_stride = 1000;
  const auto cp = c.checkpoints();
  EXPECT_EQ(cp.size(), 20u);
  EXPECT_EQ(*cp.begin(), 1000);
  EXPECT_EQ(*cp.rbegin(), 20000);
  c.iterations = 999;
  EXPECT_TRUE(c.checkpoints().empty());
}

TEST(Parse, KeyValueWithComments) {
  std::istringstream in(
      "# experiment\n"
      "protocol = flgan\n"
      "seed = 42   # trailing comment\n"
      "\n"
      "workers=5\n"
      "gen_hidden = 32, 32\n"
      "disc_activation = tanh\n"
      "k = auto\n"
      "crash = 1@10, 3@20\n");
  const ExperimentConfig c = parse_config(in);
  EXPECT_EQ(c.protocol, ProtocolKind::kFlGan);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.workers, 5u);
  EXPECT_EQ(c.gen_shape.hidden, (std::vector<std::size_t>{32, 32}));
  EXPECT_EQ(c.disc_shape.hidden_activation, Activation::kTanh);
  EXPECT_FALSE(c.k.has_value());
  const CrashSchedule s = c.crash_schedule();
  ASSERT_EQ(s.events.size(), 2u);
  EXPECT_EQ(s.events[1], (CrashEvent{3, 20}));
  EXPECT_NO_THROW(c.validate());
}

TEST(Parse, Errors) {
  std::istringstream unknown("colour = blue\n");
  EXPECT_THROW(parse_config(unknown), ConfigError);
  std::istringstream no_eq("workers 5\n");
  EXPECT_THROW(parse_config(no_eq), ConfigError);
  ExperimentConfig c;
  EXPECT_THROW(c.set("workers", "five"), ConfigError);
  EXPECT_THROW(c.set("batch_size", "-1"), ConfigError);
  EXPECT_THROW(c.set("gen_learning_rate", "nan"), ConfigError);
  EXPECT_THROW(c.set("crash", "1-10"), ConfigError);
  EXPECT_THROW(c.set("dataset", "cifar"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/mdgan.cfg"), ConfigError);
}

TEST(Validate, RejectsInconsistentSettings) {
  ExperimentConfig c;
  c.k = 11;
  EXPECT_THROW(c.validate(), ConfigError);
  c.k.reset();
  c.crash = "11@5";
  EXPECT_THROW(c.validate(), ConfigError);
  c.crash = "none";
  c.dataset = "idx";
  EXPECT_THROW(c.validate(), ConfigError);
  c.dataset = "ring";
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Serialize, ResolvedTextRoundTrips) {
  ExperimentConfig c;
  c.seed = 7;
  c.set("gen_learning_rate", "0.0005");
  c.set("crash", "every");
  c.set("disc_hidden", "none");
  const std::string text = c.to_text();
  EXPECT_NE(text.find("# k resolves to 2"), std::string::npos);
  EXPECT_NE(text.find("gen_learning_rate = 0.0005"), std::string::npos);
  std::istringstream in(text);
  const ExperimentConfig back = parse_config(in);
  EXPECT_EQ(back.to_text(), text);
  EXPECT_TRUE(back.disc_shape.hidden.empty());
  for (const std::string& key : ExperimentConfig::keys()) {
    if (key == "idx_path") continue;
    EXPECT_NE(text.find(key + " = "), std::string::npos) << key;
  }
}

TEST(ParamCount, MlpDims) {
  EXPECT_EQ(mlp_param_count({2, 16, 2}), 2u * 16 + 16 + 16 * 2 + 2);
  EXPECT_EQ(mlp_param_count({5}), 0u);
}

}  // namespace
}  // namespace mdgan
