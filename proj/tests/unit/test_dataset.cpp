#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>

#include "ebm/dataset.hpp"
#include "ebm/errors.hpp"
#include "fixtures.hpp"

using namespace ebm;
using fixtures::TempDir;

namespace {

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<unsigned char> be32(std::uint32_t x) {
  return {static_cast<unsigned char>(x >> 24), static_cast<unsigned char>(x >> 16),
          static_cast<unsigned char>(x >> 8), static_cast<unsigned char>(x)};
}

std::vector<unsigned char> concat(std::initializer_list<std::vector<unsigned char>> parts) {
  std::vector<unsigned char> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Dataset column(std::initializer_list<double> values) {
  Matrix m(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) m(i++) = v;
  return Dataset::from_matrix(m);
}

}  // namespace

TEST(LoadIdxImages, HandBuiltTwoByTwo) {
  TempDir dir;
  write_bytes(dir / "img", concat({be32(2051), be32(1), be32(2), be32(2), {0, 255, 0, 255}}));
  const Dataset d = load_idx_images(dir / "img");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.feature_rows(), 2u);
  EXPECT_EQ(d.feature_cols(), 2u);
  EXPECT_EQ(d.mode(), DataMode::raw);
  EXPECT_EQ(d.samples(), (Matrix{{0.0, 1.0, 0.0, 1.0}}));
}

TEST(LoadIdxImages, WrongMagic) {
  TempDir dir;
  write_bytes(dir / "img", concat({be32(2052), be32(1), be32(1), be32(1), {7}}));
  EXPECT_THROW(load_idx_images(dir / "img"), FormatError);
  write_bytes(dir / "lbl", concat({be32(2049), be32(1), {7}}));
  EXPECT_THROW(load_idx_images(dir / "lbl"), FormatError);
}

TEST(LoadIdxImages, Truncated) {
  TempDir dir;
  write_bytes(dir / "img", concat({be32(2051), be32(2), be32(2), be32(2), {1, 2, 3, 4, 5}}));
  EXPECT_THROW(load_idx_images(dir / "img"), FormatError);
  write_bytes(dir / "short", {0, 0, 8});
  EXPECT_THROW(load_idx_images(dir / "short"), FormatError);
}

TEST(LoadIdxImages, MissingFile) {
  EXPECT_THROW(load_idx_images("/nonexistent/ebm/images"), IoError);
}

TEST(LoadIdxImages, RoundTripSyntheticFile) {
  TempDir dir;
  std::vector<std::uint8_t> pixels(5 * 3 * 4);
  std::iota(pixels.begin(), pixels.end(), std::uint8_t{0});
  pixels[7] = 255;
  write_idx_images(dir / "img", 5, 3, 4, pixels);
  const Dataset d = load_idx_images(dir / "img");
  ASSERT_EQ(d.size(), 5u);
  ASSERT_EQ(d.num_features(), 12u);
  for (std::size_t s = 0; s < 5; ++s) {
    for (std::size_t f = 0; f < 12; ++f) {
      ASSERT_EQ(d.samples()(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(f)),
                pixels[s * 12 + f] / 255.0);
    }
  }
}

TEST(LoadIdxImages, BundledSubset) {
  const Dataset train = load_idx_images(fixtures::train_images());
  EXPECT_EQ(train.size(), 1000u);
  EXPECT_EQ(train.num_features(), 784u);
  EXPECT_EQ(train.feature_rows(), 28u);
  EXPECT_GE(train.samples().minCoeff(), 0.0);
  EXPECT_LE(train.samples().maxCoeff(), 1.0);
  EXPECT_EQ(load_idx_labels(fixtures::train_labels()).size(), 1000u);
}

TEST(LoadIdxImages, ReferenceMnistTrainingFile) {
  const char* dir = std::getenv("EBM_MNIST_DIR");
  if (dir == nullptr) GTEST_SKIP() << "set EBM_MNIST_DIR to the directory holding train-images-idx3-ubyte";
  const Dataset d = load_idx_images(std::filesystem::path(dir) / "train-images-idx3-ubyte");
  EXPECT_EQ(d.size(), 60000u);
  EXPECT_EQ(d.num_features(), 784u);
  EXPECT_GE(d.samples().minCoeff(), 0.0);
  EXPECT_LE(d.samples().maxCoeff(), 1.0);
}

TEST(LoadIdxLabels, Examples) {
  TempDir dir;
  write_bytes(dir / "a", concat({be32(2049), be32(3), {3, 1, 4}}));
  EXPECT_EQ(load_idx_labels(dir / "a"), (std::vector<int>{3, 1, 4}));
  write_bytes(dir / "b", concat({be32(2049), be32(0)}));
  EXPECT_TRUE(load_idx_labels(dir / "b").empty());
  write_bytes(dir / "c", concat({be32(2051), be32(1), {1}}));
  EXPECT_THROW(load_idx_labels(dir / "c"), FormatError);
  write_bytes(dir / "d", concat({be32(2049), be32(4), {1, 2}}));
  EXPECT_THROW(load_idx_labels(dir / "d"), FormatError);
}

TEST(LoadIdxLabels, RoundTrip) {
  TempDir dir;
  const std::vector<std::uint8_t> labels{9, 0, 255, 4};
  write_idx_labels(dir / "l", labels);
  EXPECT_EQ(load_idx_labels(dir / "l"), (std::vector<int>{9, 0, 255, 4}));
}

TEST(DatasetInvariants, ConstructorChecks) {
  EXPECT_THROW(Dataset(Matrix::Zero(2, 4), 3, 1), InvalidArgument);
  EXPECT_THROW(Dataset(Matrix::Constant(1, 2, 1.5), 1, 2), InvalidArgument);
  EXPECT_THROW(Dataset(Matrix::Constant(1, 2, 0.5), 1, 2, DataMode::binarized), InvalidArgument);
  EXPECT_NO_THROW(Dataset(Matrix::Constant(1, 2, -3.0), 1, 2, DataMode::standardized));
}

TEST(DatasetInvariants, LabelZipping) {
  const Dataset d = Dataset::from_matrix(Matrix::Zero(3, 2));
  EXPECT_THROW(d.with_labels({1, 2}), InvalidArgument);
  const Dataset labelled = d.with_labels({1, 2, 0});
  ASSERT_TRUE(labelled.has_labels());
  EXPECT_EQ(*labelled.labels(), (std::vector<int>{1, 2, 0}));
  EXPECT_EQ(*labelled.head(2).labels(), (std::vector<int>{1, 2}));
}

TEST(Binarize, Examples) {
  const Dataset d = column({0.6, 0.5, 0.0, 1.0, 0.49});
  const Dataset b = binarize(d, 0.5);
  EXPECT_EQ(b.mode(), DataMode::binarized);
  EXPECT_EQ(b.samples(), (Matrix{{1.0}, {0.0}, {0.0}, {1.0}, {0.0}}));
  const Dataset zeros = binarize(Dataset::from_matrix(Matrix::Zero(2, 5)));
  EXPECT_EQ(zeros.samples(), Matrix::Zero(2, 5));
}

TEST(Binarize, TwiceRejected) {
  const Dataset b = binarize(column({0.2, 0.9}));
  EXPECT_THROW(binarize(b), InvalidState);
  EXPECT_THROW(binarize(standardize(column({0.2, 0.9})).data), InvalidState);
}

TEST(Binarize, OutputIsBinaryOnRealData) {
  const Dataset b = binarize(load_idx_images(fixtures::test_images()));
  EXPECT_TRUE(is_binary(b.samples()));
  EXPECT_EQ(b.feature_rows(), 28u);
}

TEST(Standardize, Examples) {
  const StandardizedDataset s = standardize(column({0.0, 1.0}));
  EXPECT_EQ(s.data.mode(), DataMode::standardized);
  EXPECT_EQ(s.data.samples(), (Matrix{{-1.0}, {1.0}}));
  EXPECT_DOUBLE_EQ(s.stats.mean(0), 0.5);
  EXPECT_DOUBLE_EQ(s.stats.stddev(0), 0.5);

  const StandardizedDataset c = standardize(column({0.3, 0.3, 0.3}));
  EXPECT_EQ(c.data.samples(), Matrix::Zero(3, 1));
  EXPECT_EQ(c.stats.stddev(0), kStdFloor);
}

TEST(Standardize, ZeroMeanPerFeature) {
  const StandardizedDataset s = standardize(load_idx_images(fixtures::test_images()));
  const Vector means = s.data.samples().colwise().mean();
  EXPECT_LT(means.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_GE(s.stats.stddev.minCoeff(), kStdFloor);
}

TEST(Standardize, Errors) {
  EXPECT_THROW(standardize(Dataset::from_matrix(Matrix(0, 3))), InvalidArgument);
  EXPECT_THROW(standardize(binarize(column({0.1}))), InvalidState);
}

TEST(Standardize, ReusesStatistics) {
  const StandardizedDataset s = standardize(column({0.0, 1.0}));
  const Dataset test = apply_standardization(column({0.25}), s.stats);
  EXPECT_DOUBLE_EQ(test.samples()(0, 0), -0.5);
  EXPECT_EQ(test.mode(), DataMode::standardized);
}

TEST(Batches, SizesWithoutShuffle) {
  Matrix m(10, 1);
  for (int i = 0; i < 10; ++i) m(i) = i / 10.0;
  const Dataset d = Dataset::from_matrix(m);
  Rng rng(0);
  const auto bs = batches(d, 4, false, rng);
  ASSERT_EQ(bs.size(), 3u);
  EXPECT_EQ(bs[0].samples.rows(), 4);
  EXPECT_EQ(bs[1].samples.rows(), 4);
  EXPECT_EQ(bs[2].samples.rows(), 2);
  EXPECT_EQ(bs[1].samples(0, 0), 0.4);
  EXPECT_EQ(Rng(0), rng);

  const auto one = batches(d, 16, false, rng);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].samples, m);
  EXPECT_THROW(batches(d, 0, false, rng), InvalidArgument);
}

TEST(Batches, ShuffleDeterministicAndComplete) {
  Matrix m(37, 2);
  for (int i = 0; i < 37; ++i) m.row(i) << i / 37.0, 0.0;
  const Dataset d = Dataset::from_matrix(m).with_labels(std::vector<int>(37, 0));
  Rng x(5);
  Rng y(5);
  const auto first = batches(d, 8, true, x);
  const auto second = batches(d, 8, true, y);
  ASSERT_EQ(first.size(), second.size());
  std::vector<double> seen;
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first[i].samples, second[i].samples);
    ASSERT_TRUE(first[i].labels.has_value());
    EXPECT_EQ(first[i].labels->size(), static_cast<std::size_t>(first[i].samples.rows()));
    for (Eigen::Index r = 0; r < first[i].samples.rows(); ++r) seen.push_back(first[i].samples(r, 0));
  }
  std::vector<double> expected(m.col(0).data(), m.col(0).data() + 37);
  EXPECT_NE(seen, expected);
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(seen, expected);
}

TEST(EpochOrder, FisherYatesPermutation) {
  Rng rng(3);
  for (std::size_t n : {1u, 2u, 10u, 101u}) {
    auto order = epoch_order(n, true, rng);
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> identity(n);
    std::iota(identity.begin(), identity.end(), 0u);
    EXPECT_EQ(order, identity);
  }
}

TEST(DatasetSelect, PicksRowsAndLabels) {
  const Dataset d = Dataset::from_matrix(Matrix{{0.0}, {0.5}, {1.0}}).with_labels({7, 8, 9});
  const std::vector<std::size_t> idx{2, 0};
  const Dataset s = d.select(idx);
  EXPECT_EQ(s.samples(), (Matrix{{1.0}, {0.0}}));
  EXPECT_EQ(*s.labels(), (std::vector<int>{9, 7}));
  const std::vector<std::size_t> bad{3};
  EXPECT_THROW(d.select(bad), InvalidArgument);
}
