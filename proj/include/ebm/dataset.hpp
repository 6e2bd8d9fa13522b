#ifndef EBM_DATASET_HPP
#define EBM_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ebm/math.hpp"

namespace ebm {

enum class DataMode { raw, binarized, standardized };

std::string_view to_string(DataMode mode);

/// Per-feature statistics produced by standardize() and reused on test data.
struct Standardization {
  Vector mean;
  Vector stddev;  // already floored at kStdFloor
};

inline constexpr double kStdFloor = 1e-6;
inline constexpr double kDefaultBinarizeThreshold = 0.5;

/// In-memory sample matrix (one row per sample) with optional labels.
///
/// Immutable once built; the transforms below return new datasets.
/// Invariants checked on construction:
///   - rows * cols == number of features
///   - labels, when present, match the sample count
///   - raw mode values lie in [0, 1]; binarized mode values are 0 or 1
class Dataset {
 public:
  Dataset(Matrix samples, std::size_t rows, std::size_t cols, DataMode mode = DataMode::raw);

  /// Treats each sample as a 1 x num_features image.
  static Dataset from_matrix(Matrix samples, DataMode mode = DataMode::raw);

  const Matrix& samples() const { return samples_; }
  const std::optional<std::vector<int>>& labels() const { return labels_; }
  bool has_labels() const { return labels_.has_value(); }
  const std::optional<Standardization>& standardization() const { return standardization_; }

  std::size_t size() const { return static_cast<std::size_t>(samples_.rows()); }
  std::size_t num_features() const { return static_cast<std::size_t>(samples_.cols()); }
  std::size_t feature_rows() const { return rows_; }
  std::size_t feature_cols() const { return cols_; }
  DataMode mode() const { return mode_; }

  /// Zips labels by index. Throws InvalidArgument on a length mismatch.
  Dataset with_labels(std::vector<int> labels) const;

  /// First `n` samples (or all, if fewer).
  Dataset head(std::size_t n) const;

  /// Samples at `indices`, in that order.
  Dataset select(std::span<const std::size_t> indices) const;

 private:
  friend Dataset apply_standardization(const Dataset&, const Standardization&);

  Matrix samples_;
  std::size_t rows_;
  std::size_t cols_;
  DataMode mode_;
  std::optional<std::vector<int>> labels_;
  std::optional<Standardization> standardization_;
};

/// IDX3 image file: big-endian magic 2051, n, rows, cols, then n*rows*cols
/// unsigned bytes. Pixels are divided by 255.
Dataset load_idx_images(const std::filesystem::path& path);

/// IDX1 label file: big-endian magic 2049, n, then n unsigned bytes.
std::vector<int> load_idx_labels(const std::filesystem::path& path);

void write_idx_images(const std::filesystem::path& path, std::size_t count, std::size_t rows,
                      std::size_t cols, std::span<const std::uint8_t> pixels);
void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels);

/// value > threshold -> 1, else 0. Requires raw mode.
Dataset binarize(const Dataset& d, double threshold = kDefaultBinarizeThreshold);

struct StandardizedDataset {
  Dataset data;
  Standardization stats;
};

/// Per-feature (x - mean) / max(std, 1e-6) with population statistics.
StandardizedDataset standardize(const Dataset& d);

/// Applies previously computed statistics (e.g. training-set ones to a test set).
Dataset apply_standardization(const Dataset& d, const Standardization& stats);

struct Batch {
  Matrix samples;
  std::optional<std::vector<int>> labels;
};

/// Sample order for one pass. shuffle=true applies Fisher-Yates driven by rng
/// (for i = n-1 down to 1, swap i with uniform_index(i + 1)).
std::vector<std::size_t> epoch_order(std::size_t n, bool shuffle, Rng& rng);

/// Splits one pass over `d` into consecutive mini-batches; the last may be smaller.
std::vector<Batch> batches(const Dataset& d, std::size_t batch_size, bool shuffle, Rng& rng);

/// Rows of `samples` listed in `order`, in that order.
Matrix gather_rows(const Matrix& samples, std::span<const std::size_t> order);

}  // namespace ebm

#endif  // EBM_DATASET_HPP
