#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "ebm/errors.hpp"
#include "ebm/io.hpp"
#include "ebm/visual.hpp"
#include "fixtures.hpp"

using namespace ebm;
using fixtures::TempDir;

TEST(WeightMosaic, SingleTileExample) {
  const GrayImage img = weight_mosaic(Matrix{{0.0}, {5.0}, {10.0}, {5.0}}, {2, 2}, {1, 1}, 0);
  EXPECT_EQ(img.width, 2u);
  EXPECT_EQ(img.height, 2u);
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{0, 128, 255, 128}));
}

TEST(WeightMosaic, ConstantColumnIsBlack) {
  const GrayImage img = weight_mosaic(Matrix::Constant(4, 1, 3.0), {2, 2}, {1, 1}, 0);
  EXPECT_EQ(img.pixels, std::vector<std::uint8_t>(4, 0));
}

TEST(WeightMosaic, UnusedCellsAreBlack) {
  Matrix w(4, 7);
  for (Eigen::Index j = 0; j < 7; ++j) w.col(j) << 0, 1, 2, 3;
  const GrayImage img = weight_mosaic(w, {2, 2}, {3, 3}, 1);
  EXPECT_EQ(img.width, 3u * 2 + 4 * 1);
  EXPECT_EQ(img.height, 3u * 2 + 4 * 1);
  // Cell (2,1) holds unit 7 and (2,2) unit 8: neither exists.
  for (std::size_t cell : {7u, 8u}) {
    const std::size_t top = 1 + (cell / 3) * 3;
    const std::size_t left = 1 + (cell % 3) * 3;
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(img.at(top + r, left + c), 0);
    }
  }
  // Unit 6 sits in cell (2,0) and keeps its tile.
  EXPECT_EQ(img.at(7, 1), 0);
  EXPECT_EQ(img.at(7, 2), 85);
  EXPECT_EQ(img.at(8, 1), 170);
  EXPECT_EQ(img.at(8, 2), 255);
  // Gutters.
  for (std::size_t c = 0; c < img.width; ++c) EXPECT_EQ(img.at(0, c), 0);
}

TEST(WeightMosaic, DimensionFormula) {
  for (std::size_t pad : {0u, 1u, 3u}) {
    const GrayImage img = weight_mosaic(Matrix::Ones(12, 5), {3, 4}, {2, 3}, pad);
    EXPECT_EQ(img.width, 3 * 4 + 4 * pad);
    EXPECT_EQ(img.height, 2 * 3 + 3 * pad);
    EXPECT_EQ(img.pixels.size(), img.width * img.height);
  }
}

TEST(WeightMosaic, PerTileScaling) {
  Matrix w(2, 2);
  w << 0, 100, 1, 200;
  const GrayImage img = weight_mosaic(w, {1, 2}, {1, 2}, 0);
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{0, 255, 0, 255}));
}

TEST(WeightMosaic, ShapeErrors) {
  EXPECT_THROW(weight_mosaic(Matrix::Ones(5, 2), {2, 2}, {1, 2}, 0), InvalidArgument);
  EXPECT_THROW(weight_mosaic(Matrix::Ones(4, 5), {2, 2}, {2, 2}, 0), InvalidArgument);
  EXPECT_THROW(weight_mosaic(Matrix::Ones(4, 1), {2, 2}, {0, 1}, 0), InvalidArgument);
}

TEST(TensorToImage, Examples) {
  Matrix t(1, 784);
  for (Eigen::Index i = 0; i < 784; ++i) t(i) = static_cast<double>(i % 17);
  const GrayImage img = tensor_to_image(t, {28, 28});
  EXPECT_EQ(img.width, 28u);
  EXPECT_EQ(img.height, 28u);
  EXPECT_EQ(*std::min_element(img.pixels.begin(), img.pixels.end()), 0);
  EXPECT_EQ(*std::max_element(img.pixels.begin(), img.pixels.end()), 255);

  const GrayImage unit = tensor_to_image(Matrix{{0.0, 0.5, 1.0, 0.2}}, {2, 2});
  EXPECT_EQ(unit.pixels, (std::vector<std::uint8_t>{0, 128, 255, 51}));
  EXPECT_THROW(tensor_to_image(Matrix::Ones(1, 5), {2, 2}), InvalidArgument);
}

TEST(TensorToImage, RowMajorFlattening) {
  Matrix t(2, 2);
  t << 0, 1, 2, 3;
  const GrayImage img = tensor_to_image(t, {1, 4});
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{0, 85, 170, 255}));
}

TEST(Pgm, MinimalFile) {
  TempDir dir;
  write_pgm(GrayImage(1, 1), dir / "a.pgm");
  const auto bytes = io::read_file(dir / "a.pgm");
  const std::string expected("P5\n1 1\n255\n\0", 12);
  EXPECT_EQ(std::string(bytes.begin(), bytes.end()), expected);
}

TEST(Pgm, RoundTrip) {
  TempDir dir;
  GrayImage img(5, 3);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(i * 17);
  img.pixels[4] = 10;  // '\n' as a pixel value must survive
  write_pgm(img, dir / "a.pgm");
  const GrayImage back = read_pgm(dir / "a.pgm");
  EXPECT_EQ(back.width, 5u);
  EXPECT_EQ(back.height, 3u);
  EXPECT_EQ(back.pixels, img.pixels);
  write_pgm(img, dir / "b.pgm");
  EXPECT_EQ(io::read_file(dir / "a.pgm"), io::read_file(dir / "b.pgm"));
}

TEST(Pgm, ReadRejectsOtherFormats) {
  TempDir dir;
  io::atomic_write(dir / "p2.pgm", std::string("P2\n1 1\n255\n0\n"));
  EXPECT_THROW(read_pgm(dir / "p2.pgm"), FormatError);
  io::atomic_write(dir / "short.pgm", std::string("P5\n2 2\n255\n\x01", 12));
  EXPECT_THROW(read_pgm(dir / "short.pgm"), FormatError);
}

TEST(Pgm, WriteErrorIsIoError) {
  EXPECT_THROW(write_pgm(GrayImage(1, 1), "/nonexistent-dir/x.pgm"), IoError);
}

TEST(HistoryCsv, Layout) {
  TrainingHistory h;
  h.add_epoch(0.125, -12.5, 40);
  h.add_epoch(0.1234567891234, std::nan(""), 41);
  const std::string csv = history_csv(h);
  EXPECT_EQ(csv, "epoch,mse,pl,wall_time_ms\n1,0.125,-12.5,40\n2,0.123456789,nan,41\n");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(HistoryCsv, ParseBack) {
  TrainingHistory h;
  const double values[] = {0.31830988618379067, 0.0271828182845904, 1.0e-7};
  for (double v : values) h.add_epoch(v, -v * 1000, 1);
  TempDir dir;
  export_history_csv(h, dir / "h.csv");
  const auto bytes = io::read_file(dir / "h.csv");
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::string line;
  std::getline(in, line);
  for (double v : values) {
    ASSERT_TRUE(std::getline(in, line));
    std::istringstream row(line);
    std::string epoch, mse, pl;
    std::getline(row, epoch, ',');
    std::getline(row, mse, ',');
    std::getline(row, pl, ',');
    EXPECT_NEAR(std::strtod(mse.c_str(), nullptr), v, 1e-9 * std::max(1.0, v));
    EXPECT_NEAR(std::strtod(pl.c_str(), nullptr), -v * 1000, 1e-9 * std::max(1.0, v * 1000));
  }
}

TEST(HistoryCsv, EmptyRejected) {
  TempDir dir;
  EXPECT_THROW(export_history_csv(TrainingHistory{}, dir / "h.csv"), InvalidState);
  EXPECT_FALSE(std::filesystem::exists(dir / "h.csv"));
}
