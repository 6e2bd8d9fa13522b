#include "ebm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ebm/errors.hpp"
#include "ebm/io.hpp"

namespace ebm {

namespace {

constexpr std::uint32_t kIdxImagesMagic = 2051;
constexpr std::uint32_t kIdxLabelsMagic = 2049;

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void append_be32(std::vector<std::uint8_t>& out, std::size_t value) {
  if (value > 0xFFFFFFFFu) {
    throw InvalidArgument("IDX dimension does not fit in 32 bits");
  }
  const auto v = static_cast<std::uint32_t>(value);
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::string describe(const std::filesystem::path& path) { return "'" + path.string() + "'"; }

}  // namespace

std::string_view to_string(DataMode mode) {
  switch (mode) {
    case DataMode::raw:
      return "raw";
    case DataMode::binarized:
      return "binarized";
    case DataMode::standardized:
      return "standardized";
  }
  return "unknown";
}

Dataset::Dataset(Matrix samples, std::size_t rows, std::size_t cols, DataMode mode)
    : samples_(std::move(samples)), rows_(rows), cols_(cols), mode_(mode) {
  if (rows_ * cols_ != static_cast<std::size_t>(samples_.cols())) {
    throw InvalidArgument("Dataset: feature shape " + std::to_string(rows_) + "x" +
                          std::to_string(cols_) + " does not match " +
                          std::to_string(samples_.cols()) + " features");
  }
  switch (mode_) {
    case DataMode::raw:
      if (samples_.size() > 0 && (samples_.minCoeff() < 0.0 || samples_.maxCoeff() > 1.0)) {
        throw InvalidArgument("Dataset: raw samples must lie in [0, 1]");
      }
      break;
    case DataMode::binarized:
      if (!is_binary(samples_)) {
        throw InvalidArgument("Dataset: binarized samples must be 0 or 1");
      }
      break;
    case DataMode::standardized:
      if (!samples_.allFinite()) {
        throw InvalidArgument("Dataset: standardized samples must be finite");
      }
      break;
  }
}

Dataset Dataset::from_matrix(Matrix samples, DataMode mode) {
  const auto cols = static_cast<std::size_t>(samples.cols());
  return Dataset(std::move(samples), 1, cols, mode);
}

Dataset Dataset::with_labels(std::vector<int> labels) const {
  if (labels.size() != size()) {
    throw InvalidArgument("Dataset: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(size()) + " samples");
  }
  Dataset out = *this;
  out.labels_ = std::move(labels);
  return out;
}

Dataset Dataset::head(std::size_t n) const {
  n = std::min(n, size());
  Dataset out = *this;
  out.samples_ = samples_.topRows(static_cast<Eigen::Index>(n));
  if (labels_) {
    out.labels_ = std::vector<int>(labels_->begin(), labels_->begin() + static_cast<long>(n));
  }
  return out;
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
  Dataset out = *this;
  out.samples_ = gather_rows(samples_, indices);
  if (labels_) {
    std::vector<int> picked;
    picked.reserve(indices.size());
    for (std::size_t i : indices) picked.push_back((*labels_)[i]);
    out.labels_ = std::move(picked);
  }
  return out;
}

Dataset load_idx_images(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = io::read_file(path);
  if (bytes.size() < 16) {
    throw FormatError("IDX images " + describe(path) + ": truncated header");
  }
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxImagesMagic) {
    throw FormatError("IDX images " + describe(path) + ": bad magic " + std::to_string(magic));
  }
  const std::size_t count = read_be32(bytes, 4);
  const std::size_t rows = read_be32(bytes, 8);
  const std::size_t cols = read_be32(bytes, 12);
  const std::size_t features = rows * cols;
  if (bytes.size() - 16 < count * features) {
    throw FormatError("IDX images " + describe(path) + ": truncated payload");
  }

  Matrix samples(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(features));
  const std::uint8_t* pixel = bytes.data() + 16;
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t f = 0; f < features; ++f) {
      samples(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(f)) = *pixel++ / 255.0;
    }
  }
  return Dataset(std::move(samples), rows, cols, DataMode::raw);
}

std::vector<int> load_idx_labels(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = io::read_file(path);
  if (bytes.size() < 8) {
    throw FormatError("IDX labels " + describe(path) + ": truncated header");
  }
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxLabelsMagic) {
    throw FormatError("IDX labels " + describe(path) + ": bad magic " + std::to_string(magic));
  }
  const std::size_t count = read_be32(bytes, 4);
  if (bytes.size() - 8 < count) {
    throw FormatError("IDX labels " + describe(path) + ": truncated payload");
  }
  return {bytes.begin() + 8, bytes.begin() + 8 + static_cast<long>(count)};
}

void write_idx_images(const std::filesystem::path& path, std::size_t count, std::size_t rows,
                      std::size_t cols, std::span<const std::uint8_t> pixels) {
  if (pixels.size() != count * rows * cols) {
    throw InvalidArgument("write_idx_images: pixel count does not match dimensions");
  }
  std::vector<std::uint8_t> out;
  out.reserve(16 + pixels.size());
  append_be32(out, kIdxImagesMagic);
  append_be32(out, count);
  append_be32(out, rows);
  append_be32(out, cols);
  out.insert(out.end(), pixels.begin(), pixels.end());
  io::atomic_write(path, out);
}

void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  append_be32(out, kIdxLabelsMagic);
  append_be32(out, labels.size());
  out.insert(out.end(), labels.begin(), labels.end());
  io::atomic_write(path, out);
}

Dataset binarize(const Dataset& d, double threshold) {
  if (d.mode() != DataMode::raw) {
    throw InvalidState("binarize: dataset is " + std::string(to_string(d.mode())) +
                       ", expected raw");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument("binarize: threshold must lie in (0, 1)");
  }
  Matrix bits = (d.samples().array() > threshold).cast<double>().matrix();
  Dataset out(std::move(bits), d.feature_rows(), d.feature_cols(), DataMode::binarized);
  return d.labels() ? out.with_labels(*d.labels()) : out;
}

StandardizedDataset standardize(const Dataset& d) {
  if (d.mode() != DataMode::raw) {
    throw InvalidState("standardize: dataset is " + std::string(to_string(d.mode())) +
                       ", expected raw");
  }
  if (d.size() == 0) {
    throw InvalidArgument("standardize: empty dataset");
  }
  const Matrix& x = d.samples();
  Standardization stats;
  stats.mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - stats.mean.transpose();
  stats.stddev = (centered.array().square().colwise().sum() / static_cast<double>(x.rows()))
                     .sqrt()
                     .max(kStdFloor)
                     .transpose();
  return {apply_standardization(d, stats), stats};
}

Dataset apply_standardization(const Dataset& d, const Standardization& stats) {
  if (d.mode() != DataMode::raw) {
    throw InvalidState("apply_standardization: dataset is " + std::string(to_string(d.mode())) +
                       ", expected raw");
  }
  const auto m = static_cast<Eigen::Index>(d.num_features());
  if (stats.mean.size() != m || stats.stddev.size() != m) {
    throw InvalidArgument("apply_standardization: statistics do not match feature count");
  }
  if ((stats.stddev.array() < kStdFloor).any()) {
    throw InvalidArgument("apply_standardization: stddev below floor");
  }
  Matrix z = ((d.samples().rowwise() - stats.mean.transpose()).array().rowwise() /
              stats.stddev.transpose().array())
                 .matrix();
  Dataset out(std::move(z), d.feature_rows(), d.feature_cols(), DataMode::standardized);
  out.labels_ = d.labels();
  out.standardization_ = stats;
  return out;
}

std::vector<std::size_t> epoch_order(std::size_t n, bool shuffle, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (shuffle) {
    for (std::size_t i = n; i-- > 1;) {
      std::swap(order[i], order[rng.uniform_index(i + 1)]);
    }
  }
  return order;
}

Matrix gather_rows(const Matrix& samples, std::span<const std::size_t> order) {
  Matrix out(static_cast<Eigen::Index>(order.size()), samples.cols());
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (order[r] >= static_cast<std::size_t>(samples.rows())) {
      throw InvalidArgument("row index " + std::to_string(order[r]) + " out of range for " +
                            std::to_string(samples.rows()) + " rows");
    }
    out.row(static_cast<Eigen::Index>(r)) = samples.row(static_cast<Eigen::Index>(order[r]));
  }
  return out;
}

std::vector<Batch> batches(const Dataset& d, std::size_t batch_size, bool shuffle, Rng& rng) {
  if (batch_size == 0) {
    throw InvalidArgument("batches: batch_size must be >= 1");
  }
  const std::vector<std::size_t> order = epoch_order(d.size(), shuffle, rng);
  std::vector<Batch> out;
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t end = std::min(begin + batch_size, order.size());
    const std::span<const std::size_t> slice(order.data() + begin, end - begin);
    Batch batch{gather_rows(d.samples(), slice), std::nullopt};
    if (d.labels()) {
      std::vector<int> labels;
      labels.reserve(slice.size());
      for (std::size_t i : slice) labels.push_back((*d.labels())[i]);
      batch.labels = std::move(labels);
    }
    out.push_back(std::move(batch));
  }
  return out;
}

}  // namespace ebm
