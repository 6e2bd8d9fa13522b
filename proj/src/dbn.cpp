#include "ebm/dbn.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ebm/errors.hpp"

namespace ebm {

namespace {

// Numerically stable -log softmax(logits)[label] for one row.
double row_cross_entropy(const RowVector& logits, int label) {
  const double peak = logits.maxCoeff();
  const double log_sum = std::log((logits.array() - peak).exp().sum()) + peak;
  return log_sum - logits(label);
}

int argmax_lowest(const RowVector& row) {
  int best = 0;
  for (Eigen::Index k = 1; k < row.size(); ++k) {
    if (row(k) > row(best)) best = static_cast<int>(k);
  }
  return best;
}

}  // namespace

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index s = 0; s < logits.rows(); ++s) {
    const RowVector shifted = logits.row(s).array() - logits.row(s).maxCoeff();
    const RowVector e = shifted.array().exp();
    out.row(s) = e / e.sum();
  }
  return out;
}

Dbn::Dbn(std::span<const std::size_t> layer_sizes, const RbmConfig& shared)
    : rng_(derive_seed(shared.seed, kFineTuneStream)) {
  if (layer_sizes.size() < 2) {
    throw InvalidArgument("Dbn: need a visible size and at least one hidden size");
  }
  for (std::size_t size : layer_sizes) {
    if (size == 0) throw InvalidArgument("Dbn: layer sizes must be positive");
  }
  layers_.reserve(layer_sizes.size() - 1);
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    RbmConfig config = shared;
    config.n_visible = layer_sizes[i];
    config.n_hidden = layer_sizes[i + 1];
    config.seed = shared.seed + i;
    layers_.emplace_back(config);
  }
}

Dbn::Dbn(std::vector<Rbm> layers, std::optional<SoftmaxHead> head, TrainingHistory history, Rng rng)
    : layers_(std::move(layers)), head_(std::move(head)), history_(std::move(history)), rng_(rng) {
  if (layers_.empty()) {
    throw InvalidArgument("Dbn: at least one layer is required");
  }
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    if (layers_[i].n_hidden() != layers_[i + 1].n_visible()) {
      throw InvalidArgument("Dbn: layer " + std::to_string(i) + " has " +
                            std::to_string(layers_[i].n_hidden()) + " hidden units but layer " +
                            std::to_string(i + 1) + " expects " +
                            std::to_string(layers_[i + 1].n_visible()));
    }
  }
  if (head_) {
    if (head_->weights.rows() != static_cast<Eigen::Index>(layers_.back().n_hidden()) ||
        head_->weights.cols() != head_->bias.size() || head_->num_classes() < 2) {
      throw InvalidArgument("Dbn: softmax head shape does not match the top layer");
    }
  }
}

std::vector<std::size_t> Dbn::layer_sizes() const {
  std::vector<std::size_t> sizes{layers_.front().n_visible()};
  for (const Rbm& layer : layers_) sizes.push_back(layer.n_hidden());
  return sizes;
}

bool Dbn::pretrained() const {
  return std::all_of(layers_.begin(), layers_.end(), [](const Rbm& r) { return !r.history().empty(); });
}

FitResult Dbn::fit_layer(std::size_t index, const Dataset& data, std::size_t batch_size,
                         std::size_t epochs, const EpochCallback& on_epoch) {
  if (index >= layers_.size()) {
    throw InvalidArgument("fit_layer: no layer " + std::to_string(index));
  }
  if (index == 0) {
    return layers_[0].fit(data, batch_size, epochs, on_epoch);
  }
  if (data.num_features() != layers_.front().n_visible()) {
    throw InvalidArgument("fit_layer: dataset does not match the visible layer");
  }
  const Dataset upstream = Dataset::from_matrix(transform(data.samples(), 0, index), DataMode::raw);
  return layers_[index].fit(upstream, batch_size, epochs, on_epoch);
}

std::vector<FitResult> Dbn::fit_greedy(const Dataset& data, std::size_t batch_size,
                                       std::size_t epochs_per_layer, const EpochCallback& on_epoch) {
  std::vector<FitResult> results;
  results.reserve(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    results.push_back(fit_layer(i, data, batch_size, epochs_per_layer, on_epoch));
  }
  return results;
}

Matrix Dbn::transform(const Matrix& v, std::size_t first, std::size_t last) const {
  if (first > last || last > layers_.size()) {
    throw InvalidArgument("transform: invalid layer range");
  }
  Matrix p = v;
  for (std::size_t i = first; i < last; ++i) {
    p = layers_[i].prob_h_given_v(p);
  }
  return p;
}

Reconstruction Dbn::reconstruct(const Matrix& v) const {
  Matrix x = transform(v);
  for (std::size_t i = layers_.size(); i-- > 0;) {
    x = layers_[i].prob_v_given_h(x);
  }
  Reconstruction out;
  out.mse = mse(v, x);
  out.visible = std::move(x);
  return out;
}

void Dbn::attach_head(std::size_t num_classes, double learning_rate) {
  if (num_classes < 2) {
    throw InvalidArgument("attach_head: need at least 2 classes");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("attach_head: learning_rate must be finite and >= 0");
  }
  const auto top = static_cast<Eigen::Index>(layers_.back().n_hidden());
  const auto classes = static_cast<Eigen::Index>(num_classes);
  SoftmaxHead head;
  head.weights.resize(top, classes);
  for (Eigen::Index i = 0; i < top; ++i) {
    for (Eigen::Index k = 0; k < classes; ++k) {
      head.weights(i, k) = rng_.normal(0.0, 0.01);
    }
  }
  head.bias = Vector::Zero(classes);
  head.learning_rate = learning_rate;
  head_ = std::move(head);
}

void Dbn::check_head(const char* op) const {
  if (!head_) {
    throw InvalidState(std::string(op) + ": no softmax head attached");
  }
}

void Dbn::check_labels(std::span<const int> labels, Eigen::Index rows, const char* op) const {
  if (static_cast<Eigen::Index>(labels.size()) != rows) {
    throw InvalidArgument(std::string(op) + ": label count does not match sample count");
  }
  const int classes = static_cast<int>(head_->num_classes());
  for (int y : labels) {
    if (y < 0 || y >= classes) {
      throw InvalidArgument(std::string(op) + ": label " + std::to_string(y) + " outside [0, " +
                            std::to_string(classes) + ")");
    }
  }
}

double Dbn::cross_entropy(const Matrix& v, std::span<const int> labels) const {
  check_head("cross_entropy");
  check_labels(labels, v.rows(), "cross_entropy");
  const Matrix logits = (transform(v) * head_->weights).rowwise() + head_->bias.transpose();
  double total = 0.0;
  for (Eigen::Index s = 0; s < logits.rows(); ++s) {
    total += row_cross_entropy(logits.row(s), labels[static_cast<std::size_t>(s)]);
  }
  return total / static_cast<double>(logits.rows());
}

FineTuneGradients Dbn::fine_tune_gradients(const Matrix& v, std::span<const int> labels) const {
  check_head("fine_tune_gradients");
  check_labels(labels, v.rows(), "fine_tune_gradients");
  const std::size_t depth = layers_.size();

  std::vector<Matrix> acts;
  acts.reserve(depth + 1);
  acts.push_back(v);
  for (const Rbm& layer : layers_) acts.push_back(layer.prob_h_given_v(acts.back()));

  const Matrix logits = (acts.back() * head_->weights).rowwise() + head_->bias.transpose();
  Matrix delta = softmax_rows(logits);
  const double batch = static_cast<double>(v.rows());

  FineTuneGradients grads;
  for (Eigen::Index s = 0; s < logits.rows(); ++s) {
    const int y = labels[static_cast<std::size_t>(s)];
    grads.loss += row_cross_entropy(logits.row(s), y);
    delta(s, y) -= 1.0;
  }
  grads.loss /= batch;
  delta /= batch;

  grads.head_weights = acts.back().transpose() * delta;
  grads.head_bias = delta.colwise().sum().transpose();
  grads.layer_weights.resize(depth);
  grads.layer_hidden_bias.resize(depth);

  Matrix upstream = delta * head_->weights.transpose();
  for (std::size_t i = depth; i-- > 0;) {
    const Matrix& p = acts[i + 1];
    const Matrix dz = (upstream.array() * p.array() * (1.0 - p.array())).matrix() /
                      layers_[i].config().temperature;
    grads.layer_weights[i] = acts[i].transpose() * dz;
    grads.layer_hidden_bias[i] = dz.colwise().sum().transpose();
    if (i > 0) upstream = dz * layers_[i].weights().transpose();
  }
  return grads;
}

std::vector<FineTuneRecord> Dbn::fine_tune(const Dataset& data, const FineTuneOptions& options) {
  if (!data.has_labels()) {
    throw InvalidState("fine_tune: dataset has no labels");
  }
  if (!pretrained()) {
    throw InvalidState("fine_tune: run greedy pretraining first");
  }
  if (options.batch_size == 0 || options.epochs == 0) {
    throw InvalidArgument("fine_tune: batch_size and epochs must be >= 1");
  }
  if (data.num_features() != layers_.front().n_visible()) {
    throw InvalidArgument("fine_tune: dataset does not match the visible layer");
  }
  attach_head(options.num_classes, options.learning_rate);
  check_labels(*data.labels(), static_cast<Eigen::Index>(data.size()), "fine_tune");

  const double lr = options.learning_rate;
  const std::vector<int>& all_labels = *data.labels();
  std::vector<FineTuneRecord> records;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const std::vector<std::size_t> order = epoch_order(data.size(), true, rng_);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += options.batch_size) {
      const std::size_t end = std::min(begin + options.batch_size, order.size());
      const std::span<const std::size_t> slice(order.data() + begin, end - begin);
      const Matrix v = gather_rows(data.samples(), slice);
      std::vector<int> labels;
      labels.reserve(slice.size());
      for (std::size_t i : slice) labels.push_back(all_labels[i]);

      const Prediction before = predict(v);
      for (std::size_t s = 0; s < labels.size(); ++s) {
        if (before.labels[s] == labels[s]) ++correct;
      }
      const FineTuneGradients g = fine_tune_gradients(v, labels);
      loss_sum += g.loss * static_cast<double>(labels.size());

      for (std::size_t i = 0; i < layers_.size(); ++i) {
        layers_[i].set_weights(layers_[i].weights() - lr * g.layer_weights[i]);
        layers_[i].set_hidden_bias(layers_[i].hidden_bias() - lr * g.layer_hidden_bias[i]);
      }
      head_->weights -= lr * g.head_weights;
      head_->bias -= lr * g.head_bias;
    }
    const double n = static_cast<double>(data.size());
    records.push_back(history_.add_fine_tune_epoch(loss_sum / n, static_cast<double>(correct) / n));
  }
  return records;
}

Prediction Dbn::predict(const Matrix& v) const {
  check_head("predict");
  const Matrix logits = (transform(v) * head_->weights).rowwise() + head_->bias.transpose();
  Prediction out;
  out.probabilities = softmax_rows(logits);
  out.labels.reserve(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index s = 0; s < logits.rows(); ++s) {
    out.labels.push_back(argmax_lowest(out.probabilities.row(s)));
  }
  return out;
}

}  // namespace ebm
