#ifndef EBM_RBM_HPP
#define EBM_RBM_HPP

#include <cstddef>
#include <cstdint>
#include <functional>

#include "ebm/dataset.hpp"
#include "ebm/math.hpp"
#include "ebm/metrics.hpp"

namespace ebm {

struct RbmConfig {
  std::size_t n_visible = 0;
  std::size_t n_hidden = 0;
  std::size_t steps = 1;  // Gibbs steps per CD update
  double learning_rate = 0.1;
  double momentum = 0.0;
  double decay = 0.0;  // L2 penalty on the weights only
  double temperature = 1.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument when any field is out of range. A learning rate
  /// of exactly 0 is accepted and yields a frozen model.
  void validate() const;

  friend bool operator==(const RbmConfig&, const RbmConfig&) = default;
};

/// How the visible layer behaves inside the CD chain and in reconstructions.
enum class VisibleUnits {
  bernoulli,  // sigmoid probabilities, sampled to {0,1} between steps
  gaussian,   // unit-variance Gaussian, mean a + W h used directly
  sigmoid,    // sigmoid probabilities used as real values, never sampled
};

struct GibbsSample {
  Matrix hidden_probs;
  Matrix hidden;
  Matrix visible_probs;
  Matrix visible;
};

/// Batch-averaged CD statistics, before learning rate, momentum and decay.
struct CdGradient {
  Matrix weights;        // (v0^T ph0 - pvk^T phk) / batch
  Vector visible_bias;   // mean(v0 - pvk)
  Vector hidden_bias;    // mean(ph0 - phk)
  Matrix reconstruction;  // pvk, the chain's final visible probabilities
};

struct FitResult {
  double mse = 0.0;
  double pl = 0.0;
};

struct Reconstruction {
  double mse = 0.0;
  Matrix visible;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Knobs the variant models use to reuse the CD training loop.
struct CdOptions {
  VisibleUnits visible_units = VisibleUnits::bernoulli;
  /// Hidden-unit mask r applied to every hidden probability in the batch
  /// (ph <- ph * r). Null means no mask.
  const Vector* hidden_mask = nullptr;
};

struct FitOptions {
  VisibleUnits visible_units = VisibleUnits::bernoulli;
  /// Called once per mini-batch to produce a fresh hidden mask. Empty means no mask.
  std::function<Vector()> next_hidden_mask;
  /// Record pseudo-likelihood as NaN instead of estimating it.
  bool skip_pseudo_likelihood = false;
};

/// Bernoulli-Bernoulli restricted Boltzmann machine.
///
/// Energy E(v, h) = -a.v - b.h - v^T W h with W of shape n_visible x n_hidden.
/// The hidden conditional divides its pre-activation by the configured
/// temperature; the visible conditional and the energy do not.
///
/// Training uses CD-k with momentum. Positive statistics use ph0 = P(h|v0)
/// against the data. The chain samples h0 ~ ph0 and then, for steps 1..k-1,
/// v ~ P(v|h), h ~ P(h|v). The final step uses probabilities only:
/// pvk = P(v|h_{k-1}) and phk = P(h|pvk).
///
/// Not thread-safe for mutation: fit and gibbs_step consume the owned Rng.
class Rbm {
 public:
  /// W ~ Normal(0, 0.01^2) drawn from Rng(config.seed); zero biases and velocities.
  explicit Rbm(const RbmConfig& config);

  const RbmConfig& config() const { return config_; }
  std::size_t n_visible() const { return config_.n_visible; }
  std::size_t n_hidden() const { return config_.n_hidden; }

  const Matrix& weights() const { return weights_; }
  const Vector& visible_bias() const { return visible_bias_; }
  const Vector& hidden_bias() const { return hidden_bias_; }
  const Matrix& velocity_weights() const { return velocity_weights_; }
  const Vector& velocity_visible_bias() const { return velocity_visible_; }
  const Vector& velocity_hidden_bias() const { return velocity_hidden_; }

  /// Shape-checked setters; throw InvalidArgument on mismatch or non-finite values.
  void set_weights(Matrix w);
  void set_visible_bias(Vector a);
  void set_hidden_bias(Vector b);
  void set_velocities(Matrix w, Vector a, Vector b);
  /// Replaces the hyperparameters that do not affect shapes.
  void set_learning_rate(double learning_rate);

  const TrainingHistory& history() const { return history_; }
  TrainingHistory& history() { return history_; }
  const Rng& rng() const { return rng_; }
  Rng& rng() { return rng_; }

  /// Energy of one binary configuration.
  double energy(const Vector& v, const Vector& h) const;

  /// log Z by enumerating all 2^(m+n) configurations (log-sum-exp).
  /// Throws CapacityError when m + n > kMaxEnumerationUnits.
  double log_partition_bruteforce() const;
  /// exp(-E(v, h) - log Z).
  double joint_probability_bruteforce(const Vector& v, const Vector& h) const;

  /// Rows are samples. Entry (s, j) = sigmoid((v_s . W_j + b_j) / T).
  Matrix prob_h_given_v(const Matrix& v) const;
  /// Entry (s, i) = sigmoid(W_i . h_s + a_i).
  Matrix prob_v_given_h(const Matrix& h) const;
  /// Visible activation for the given unit type (the Bernoulli case is prob_v_given_h).
  Matrix visible_mean(const Matrix& h, VisibleUnits units) const;

  /// F(v) = -a.v - sum_j softplus(b_j + v . W_j), one entry per row.
  Vector free_energy(const Matrix& v) const;

  /// One sampled Gibbs sweep v -> h -> v'. Consumes rng.
  GibbsSample gibbs_step(const Matrix& v);

  /// CD-k statistics for a batch. Consumes rng, does not touch parameters.
  CdGradient contrastive_divergence(const Matrix& v0, const CdOptions& options = {});

  /// velocity <- momentum * velocity + lr * (grad - decay * W); param += velocity.
  /// Decay applies to W only.
  void apply_gradient(const CdGradient& grad);

  /// Shuffled mini-batch CD-k training. Appends one EpochRecord per epoch
  /// (batch-size-weighted means of the chain MSE and pseudo-likelihood) and
  /// returns the last one. Accepts raw or binarized data.
  FitResult fit(const Dataset& data, std::size_t batch_size, std::size_t epochs,
                const EpochCallback& on_epoch = {});
  FitResult fit(const Dataset& data, std::size_t batch_size, std::size_t epochs,
                const FitOptions& options, const EpochCallback& on_epoch = {});

  /// Mean-field pass v -> P(h|v) -> P(v|h); no randomness.
  Reconstruction reconstruct(const Dataset& data, std::size_t batch_size) const;
  Reconstruction reconstruct(const Matrix& v, VisibleUnits units = VisibleUnits::bernoulli) const;

  static constexpr std::size_t kMaxEnumerationUnits = 20;

 private:
  Matrix hidden_pre_activation(const Matrix& v) const;
  void check_visible_cols(const Matrix& v, const char* op) const;
  void check_finite_parameters() const;

  RbmConfig config_;
  Matrix weights_;
  Vector visible_bias_;
  Vector hidden_bias_;
  Matrix velocity_weights_;
  Vector velocity_visible_;
  Vector velocity_hidden_;
  TrainingHistory history_;
  Rng rng_;
};

}  // namespace ebm

#endif  // EBM_RBM_HPP
