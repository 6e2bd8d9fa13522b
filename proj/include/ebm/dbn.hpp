#ifndef EBM_DBN_HPP
#define EBM_DBN_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ebm/dataset.hpp"
#include "ebm/metrics.hpp"
#include "ebm/rbm.hpp"

namespace ebm {

struct SoftmaxHead {
  Matrix weights;  // top_hidden x num_classes
  Vector bias;     // num_classes
  double learning_rate = 0.1;

  std::size_t num_classes() const { return static_cast<std::size_t>(bias.size()); }
};

struct FineTuneOptions {
  std::size_t num_classes = 2;
  std::size_t batch_size = 128;
  std::size_t epochs = 1;
  double learning_rate = 0.1;
};

/// Gradients of the mean cross-entropy with respect to every trainable tensor.
struct FineTuneGradients {
  std::vector<Matrix> layer_weights;
  std::vector<Vector> layer_hidden_bias;
  Matrix head_weights;
  Vector head_bias;
  double loss = 0.0;
};

struct Prediction {
  std::vector<int> labels;
  Matrix probabilities;  // batch x classes, rows sum to 1
};

/// Stream id for the Rng that initializes the head and shuffles fine-tuning batches.
inline constexpr std::uint64_t kFineTuneStream = 2;

/// Stack of Bernoulli RBMs trained greedily, with an optional softmax head.
///
/// Layer i is built with seed config.seed + i. Upper layers are trained on
/// the mean-field hidden probabilities of the frozen layers below them.
class Dbn {
 public:
  /// `layer_sizes` = {visible, hidden_1, ..., hidden_L}. The n_visible and
  /// n_hidden fields of `shared` are ignored.
  Dbn(std::span<const std::size_t> layer_sizes, const RbmConfig& shared);
  /// Restores a saved stack. Adjacent layers must chain.
  Dbn(std::vector<Rbm> layers, std::optional<SoftmaxHead> head, TrainingHistory history, Rng rng);

  std::size_t num_layers() const { return layers_.size(); }
  const Rbm& layer(std::size_t i) const { return layers_.at(i); }
  Rbm& layer(std::size_t i) { return layers_.at(i); }
  const std::vector<Rbm>& layers() const { return layers_; }
  std::vector<std::size_t> layer_sizes() const;

  const std::optional<SoftmaxHead>& head() const { return head_; }
  std::optional<SoftmaxHead>& head() { return head_; }
  const TrainingHistory& history() const { return history_; }
  const Rng& rng() const { return rng_; }

  /// True once every layer has at least one training epoch recorded.
  bool pretrained() const;

  /// Trains layer `index` on data propagated through the layers below it.
  FitResult fit_layer(std::size_t index, const Dataset& data, std::size_t batch_size,
                      std::size_t epochs, const EpochCallback& on_epoch = {});

  std::vector<FitResult> fit_greedy(const Dataset& data, std::size_t batch_size,
                                    std::size_t epochs_per_layer,
                                    const EpochCallback& on_epoch = {});

  /// Mean-field up-pass through layers [first, last).
  Matrix transform(const Matrix& v, std::size_t first, std::size_t last) const;
  Matrix transform(const Matrix& v) const { return transform(v, 0, layers_.size()); }

  /// Up-pass to the top layer, then prob_v_given_h down through every layer.
  Reconstruction reconstruct(const Matrix& v) const;

  /// Creates a head with U ~ Normal(0, 0.01^2) and c = 0.
  void attach_head(std::size_t num_classes, double learning_rate);

  /// Plain SGD on the mean cross-entropy through the head and all layers.
  /// Requires pretrained() and labelled data; attaches a fresh head.
  std::vector<FineTuneRecord> fine_tune(const Dataset& data, const FineTuneOptions& options);

  /// Mean cross-entropy of the current head on (v, labels).
  double cross_entropy(const Matrix& v, std::span<const int> labels) const;
  FineTuneGradients fine_tune_gradients(const Matrix& v, std::span<const int> labels) const;

  Prediction predict(const Matrix& v) const;

 private:
  void check_head(const char* op) const;
  void check_labels(std::span<const int> labels, Eigen::Index rows, const char* op) const;

  std::vector<Rbm> layers_;
  std::optional<SoftmaxHead> head_;
  TrainingHistory history_;  // fine-tuning records
  Rng rng_;
};

/// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

}  // namespace ebm

#endif  // EBM_DBN_HPP
