#ifndef EBM_VARIANTS_HPP
#define EBM_VARIANTS_HPP

#include <cstdint>

#include "ebm/dataset.hpp"
#include "ebm/rbm.hpp"

namespace ebm {

/// Mask r with r_j = 0 with probability drop_rate, else 1. One uniform per entry.
Vector dropout_mask(std::size_t n, double drop_rate, Rng& rng);

/// Stream id used to derive the dropout mask Rng from the model seed.
inline constexpr std::uint64_t kDropoutMaskStream = 1;

/// RBM whose hidden units are dropped with probability drop_rate during
/// training. One mask is drawn per mini-batch from a dedicated Rng, so the
/// sampling stream of the underlying RBM is consumed exactly as in plain
/// training; with drop_rate 0 the trajectory matches Rbm::fit bit-for-bit.
///
/// After training, scale_for_inference() multiplies W by the retention
/// probability 1 - drop_rate, once.
class DropoutRbm {
 public:
  DropoutRbm(const RbmConfig& config, double drop_rate);
  /// Restores a saved model.
  DropoutRbm(Rbm base, double drop_rate, bool inference_scaled, Rng mask_rng);

  const Rbm& base() const { return base_; }
  Rbm& base() { return base_; }
  double drop_rate() const { return drop_rate_; }
  bool inference_scaled() const { return inference_scaled_; }
  const Rng& mask_rng() const { return mask_rng_; }

  /// P(h|v) with columns where r_j = 0 forced to 0.
  Matrix prob_h_given_v(const Matrix& v, const Vector& r) const;

  FitResult fit(const Dataset& data, std::size_t batch_size, std::size_t epochs,
                const EpochCallback& on_epoch = {});

  /// W <- (1 - drop_rate) W. Throws InvalidState if already applied.
  void scale_for_inference();

  Reconstruction reconstruct(const Dataset& data, std::size_t batch_size) const {
    return base_.reconstruct(data, batch_size);
  }

 private:
  Rbm base_;
  double drop_rate_;
  bool inference_scaled_ = false;
  Rng mask_rng_;
};

/// Gaussian-Bernoulli RBM with unit-variance visible units.
///
/// Expects standardized input and binds the standardization statistics of the
/// training set at fit time for reuse on test data. Visible reconstructions
/// are the Gaussian mean a + W h; no visible sampling takes place. The hidden
/// conditional is the Bernoulli one evaluated on real-valued v.
class GaussianRbm {
 public:
  explicit GaussianRbm(const RbmConfig& config);
  GaussianRbm(Rbm base, Standardization stats);

  const Rbm& base() const { return base_; }
  Rbm& base() { return base_; }
  const Vector& feature_mean() const { return stats_.mean; }
  const Vector& feature_std() const { return stats_.stddev; }
  const Standardization& statistics() const { return stats_; }

  Matrix prob_v_given_h(const Matrix& h) const;

  /// `data` must be standardized; its statistics are stored on the model.
  FitResult fit(const Dataset& data, std::size_t batch_size, std::size_t epochs,
                const EpochCallback& on_epoch = {});

  /// Standardizes raw data with the stored statistics.
  Dataset prepare(const Dataset& raw) const;

  Reconstruction reconstruct(const Dataset& standardized, std::size_t batch_size) const;

 private:
  Rbm base_;
  Standardization stats_;
};

/// RBM with real-valued sigmoid visible units in [0, 1]. Training matches
/// Rbm::fit except that visible probabilities are never sampled.
class SigmoidRbm {
 public:
  explicit SigmoidRbm(const RbmConfig& config) : base_(config) {}
  explicit SigmoidRbm(Rbm base) : base_(std::move(base)) {}

  const Rbm& base() const { return base_; }
  Rbm& base() { return base_; }

  Matrix prob_v_given_h(const Matrix& h) const { return base_.prob_v_given_h(h); }

  FitResult fit(const Dataset& data, std::size_t batch_size, std::size_t epochs,
                const EpochCallback& on_epoch = {});

  Reconstruction reconstruct(const Dataset& data, std::size_t batch_size) const {
    return base_.reconstruct(data, batch_size);
  }

 private:
  Rbm base_;
};

}  // namespace ebm

#endif  // EBM_VARIANTS_HPP
