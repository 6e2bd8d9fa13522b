#ifndef EBM_VISUAL_HPP
#define EBM_VISUAL_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ebm/math.hpp"
#include "ebm/metrics.hpp"

namespace ebm {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, width * height

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, std::uint8_t fill = 0);

  std::uint8_t& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }
  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

struct Shape2d {
  std::size_t rows = 0;
  std::size_t cols = 0;
};

/// Tiles every column of W (one hidden unit's incoming weights) as a
/// tile.rows x tile.cols image, left to right and top to bottom over
/// grid.rows x grid.cols cells separated by `pad` black pixels. Each tile is
/// min-max scaled on its own. Unused cells stay black.
///
/// Width = grid.cols * tile.cols + (grid.cols + 1) * pad; height likewise.
GrayImage weight_mosaic(const Matrix& weights, Shape2d tile, Shape2d grid, std::size_t pad);

/// Reshapes (row-major) and min-max scales a tensor to an 8-bit image.
GrayImage tensor_to_image(const Matrix& t, Shape2d shape);

/// Binary PGM: "P5\n<width> <height>\n255\n" followed by the raw pixels.
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);
GrayImage read_pgm(const std::filesystem::path& path);

/// "epoch,mse,pl,wall_time_ms" then one row per epoch, %.9g, LF endings.
std::string history_csv(const TrainingHistory& history);
void export_history_csv(const TrainingHistory& history, const std::filesystem::path& path);

}  // namespace ebm

#endif  // EBM_VISUAL_HPP
