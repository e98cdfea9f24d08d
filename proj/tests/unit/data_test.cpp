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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "mdgan/data.hpp"
#include "mdgan/errors.hpp"

namespace mdgan {
namespace {

using Row = std::vector<double>;

std::vector<Row> sorted_rows(const Tensor& t) {
  std::vector<Row> rows;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    rows.emplace_back(t.row(i).data(), t.row(i).data() + t.cols());
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

class TempFile {
 public:
  explicit TempFile(const std::string& name)
      : path_(std::filesystem::temp_directory_path() /
              ("mdgan_data_test_" + name)) {}
  ~TempFile() { std::filesystem::remove(path_); }
  const std::filesystem::path& path() const { return path_; }
  void write(const std::vector<unsigned char>& bytes) const {
    std::ofstream out(path_, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }

 private:
  std::filesystem::path path_;
};

TEST(Ring, SingleModeCollapsesToCenter) {
  GaussianRingSpec spec{1, 2.0, 1e-9, 50};
  const Dataset ds = make_ring(spec, 3);
  ASSERT_EQ(ds.size(), 50u);
  for (Eigen::Index i = 0; i < 50; ++i) {
    EXPECT_NEAR(ds.samples(i, 0), 2.0, 1e-6);
    EXPECT_NEAR(ds.samples(i, 1), 0.0, 1e-6);
  }
}

TEST(Ring, NearestCenterRecoversEqualClusters) {
  GaussianRingSpec spec{8, 2.0, 0.02, 250};
  const Dataset ds = make_ring(spec, 11);
  ASSERT_EQ(ds.size(), 2000u);
  ASSERT_TRUE(ds.ring.has_value());
  const Tensor centers = spec.centers();
  for (Eigen::Index j = 0; j < 8; ++j) {
    EXPECT_NEAR(centers.row(j).norm(), 2.0, 1e-12);
  }
  std::map<Eigen::Index, int> counts;
  for (Eigen::Index i = 0; i < ds.samples.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < 8; ++j) {
      if ((ds.samples.row(i) - centers.row(j)).squaredNorm() <
          (ds.samples.row(i) - centers.row(best)).squaredNorm()) {
        best = j;
      }
    }
    ++counts[best];
  }
  ASSERT_EQ(counts.size(), 8u);
  for (const auto& [mode, count] : counts) EXPECT_EQ(count, 250) << mode;
}

TEST(Ring, SeededDeterminism) {
  const GaussianRingSpec spec;
  EXPECT_EQ(make_ring(spec, 5).samples, make_ring(spec, 5).samples);
  EXPECT_NE(make_ring(spec, 5).samples, make_ring(spec, 6).samples);
}

TEST(Ring, FreshSamplesStayNearModes) {
  const GaussianRingSpec spec;
  Rng rng(4);
  const Tensor x = sample_ring(spec, 1000, rng);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    EXPECT_NEAR(x.row(i).norm(), spec.radius, 6 * spec.stddev);
  }
}

TEST(Ring, RejectsInvalidSpec) {
  EXPECT_THROW(make_ring({0, 2.0, 0.05, 10}, 1), ConfigError);
  EXPECT_THROW(make_ring({8, 2.0, 0.0, 10}, 1), ConfigError);
}

TEST(Shards, SingleWorkerGetsWholeDataset) {
  const Dataset ds = make_ring(GaussianRingSpec{8, 2.0, 0.05, 10}, 1);
  const auto shards = shard_iid(ds, 1, 9);
  ASSERT_EQ(shards.size(), 1u);
  EXPECT_EQ(shards[0].owner, 1u);
  EXPECT_EQ(shards[0].samples, ds.samples);
}

TEST(Shards, EqualSizesAndExactPartition) {
  const Dataset ds = make_ring(GaussianRingSpec{10, 2.0, 0.05, 100}, 2);
  const auto shards = shard_iid(ds, 10, 9);
  ASSERT_EQ(shards.size(), 10u);
  Tensor all(0, 2);
  for (std::size_t n = 0; n < shards.size(); ++n) {
    EXPECT_EQ(shards[n].owner, n + 1);
    EXPECT_EQ(shards[n].samples.rows(), 100);
    Tensor grown(all.rows() + shards[n].samples.rows(), 2);
    grown << all, shards[n].samples;
    all = grown;
  }
  EXPECT_EQ(sorted_rows(all), sorted_rows(ds.samples));
}

TEST(Shards, UnevenSplitDiffersByAtMostOne) {
  const Dataset ds = make_ring(GaussianRingSpec{1, 1.0, 0.05, 23}, 2);
  const auto shards = shard_iid(ds, 5, 1);
  Eigen::Index lo = 100, hi = 0, total = 0;
  for (const Shard& s : shards) {
    lo = std::min(lo, s.samples.rows());
    hi = std::max(hi, s.samples.rows());
    total += s.samples.rows();
  }
  EXPECT_LE(hi - lo, 1);
  EXPECT_EQ(total, 23);
}

TEST(Shards, ShuffleDependsOnSeed) {
  const Dataset ds = make_ring(GaussianRingSpec{8, 2.0, 0.05, 20}, 2);
  EXPECT_EQ(shard_iid(ds, 4, 1)[0].samples, shard_iid(ds, 4, 1)[0].samples);
  EXPECT_NE(shard_iid(ds, 4, 1)[0].samples, shard_iid(ds, 4, 2)[0].samples);
}

TEST(Shards, RejectsTooManyWorkers) {
  const Dataset ds = make_ring(GaussianRingSpec{1, 1.0, 0.05, 3}, 2);
  EXPECT_THROW(shard_iid(ds, 4, 1), ConfigError);
  EXPECT_THROW(shard_iid(ds, 0, 1), ConfigError);
}

TEST(Idx, HandBuiltFixture) {
  TempFile file("fixture.idx");
  file.write({0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2,  //
              0, 1, 2, 3, 4, 5, 6, 7});
  const Dataset ds = load_idx(file.path());
  ASSERT_EQ(ds.size(), 2u);
  ASSERT_EQ(ds.dim(), 4u);
  for (int i = 0; i < 8; ++i) {
    EXPECT_DOUBLE_EQ(ds.samples.data()[i], i / 255.0);
  }
  EXPECT_FALSE(ds.ring.has_value());
}

TEST(Idx, OneDimensionalFile) {
  TempFile file("labels.idx");
  file.write({0, 0, 8, 1, 0, 0, 0, 3, 255, 0, 51});
  const Dataset ds = load_idx(file.path());
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_DOUBLE_EQ(ds.samples(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(ds.samples(2, 0), 0.2);
}

TEST(Idx, FormatErrors) {
  TempFile file("bad.idx");
  file.write({});
  EXPECT_THROW(load_idx(file.path()), FormatError);
  file.write({0, 0, 9, 3, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0});
  EXPECT_THROW(load_idx(file.path()), FormatError);  // wrong type byte
  file.write({0, 0, 8, 3, 0, 0, 0, 2});
  EXPECT_THROW(load_idx(file.path()), FormatError);  // truncated header
  file.write({0, 0, 8, 1, 0, 0, 0, 4, 1, 2});
  EXPECT_THROW(load_idx(file.path()), FormatError);  // truncated payload
  file.write({0, 0, 8, 1, 0, 0, 0, 0});
  EXPECT_THROW(load_idx(file.path()), FormatError);  // no samples
  EXPECT_THROW(load_idx("/nonexistent/mdgan.idx"), FormatError);
}

}  // namespace
}  // namespace mdgan
