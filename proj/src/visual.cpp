#include "ebm/visual.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "ebm/errors.hpp"
#include "ebm/io.hpp"

namespace ebm {

namespace {

std::uint8_t quantize(double x) { return static_cast<std::uint8_t>(std::lround(255.0 * x)); }

std::string format_g9(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace

GrayImage::GrayImage(std::size_t w, std::size_t h, std::uint8_t fill)
    : width(w), height(h), pixels(w * h, fill) {}

GrayImage weight_mosaic(const Matrix& weights, Shape2d tile, Shape2d grid, std::size_t pad) {
  if (tile.rows == 0 || tile.cols == 0 || grid.rows == 0 || grid.cols == 0) {
    throw InvalidArgument("weight_mosaic: tile and grid dimensions must be positive");
  }
  if (tile.rows * tile.cols != static_cast<std::size_t>(weights.rows())) {
    throw InvalidArgument("weight_mosaic: tile " + std::to_string(tile.rows) + "x" +
                          std::to_string(tile.cols) + " does not hold " +
                          std::to_string(weights.rows()) + " weights");
  }
  const auto units = static_cast<std::size_t>(weights.cols());
  if (grid.rows * grid.cols < units) {
    throw InvalidArgument("weight_mosaic: grid has fewer cells than hidden units");
  }

  GrayImage img(grid.cols * tile.cols + (grid.cols + 1) * pad,
                grid.rows * tile.rows + (grid.rows + 1) * pad);
  for (std::size_t unit = 0; unit < units; ++unit) {
    const Vector scaled = scale_unitary(Vector(weights.col(static_cast<Eigen::Index>(unit))));
    const std::size_t top = pad + (unit / grid.cols) * (tile.rows + pad);
    const std::size_t left = pad + (unit % grid.cols) * (tile.cols + pad);
    for (std::size_t r = 0; r < tile.rows; ++r) {
      for (std::size_t c = 0; c < tile.cols; ++c) {
        img.at(top + r, left + c) = quantize(scaled(static_cast<Eigen::Index>(r * tile.cols + c)));
      }
    }
  }
  return img;
}

GrayImage tensor_to_image(const Matrix& t, Shape2d shape) {
  if (shape.rows * shape.cols != static_cast<std::size_t>(t.size()) || t.size() == 0) {
    throw InvalidArgument("tensor_to_image: " + std::to_string(t.size()) +
                          " elements cannot form a " + std::to_string(shape.rows) + "x" +
                          std::to_string(shape.cols) + " image");
  }
  // Row-major flattening of t, so a 1 x 784 sample reads as consecutive pixel rows.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = t;
  const Vector flat = Eigen::Map<const Vector>(row_major.data(), row_major.size());
  const Vector scaled = scale_unitary(flat);
  GrayImage img(shape.cols, shape.rows);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = quantize(scaled(static_cast<Eigen::Index>(i)));
  }
  return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  if (img.pixels.size() != img.width * img.height) {
    throw InvalidArgument("encode_pgm: pixel count does not match dimensions");
  }
  const std::string header =
      "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  io::atomic_write(path, encode_pgm(img));
}

GrayImage read_pgm(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = io::read_file(path);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::string magic;
  std::size_t width = 0;
  std::size_t height = 0;
  int maxval = 0;
  in >> magic >> width >> height >> maxval;
  if (!in || magic != "P5" || maxval != 255) {
    throw FormatError("read_pgm: '" + path.string() + "' is not an 8-bit binary PGM");
  }
  in.get();  // single whitespace after maxval
  GrayImage img(width, height);
  const auto offset = static_cast<std::size_t>(in.tellg());
  if (bytes.size() - offset != img.pixels.size()) {
    throw FormatError("read_pgm: '" + path.string() + "' has a truncated pixel section");
  }
  std::copy(bytes.begin() + static_cast<long>(offset), bytes.end(), img.pixels.begin());
  return img;
}

std::string history_csv(const TrainingHistory& history) {
  if (history.empty()) {
    throw InvalidState("export_history_csv: history is empty");
  }
  std::string out = "epoch,mse,pl,wall_time_ms\n";
  for (const EpochRecord& e : history.epochs()) {
    out += std::to_string(e.epoch_index) + "," + format_g9(e.mse) + "," + format_g9(e.pl) + "," +
           std::to_string(e.wall_time_ms) + "\n";
  }
  return out;
}

void export_history_csv(const TrainingHistory& history, const std::filesystem::path& path) {
  io::atomic_write(path, history_csv(history));
}

}  // namespace ebm
