#include "ebm/variants.hpp"

#include <string>
#include <utility>

#include "ebm/errors.hpp"

namespace ebm {

namespace {

void check_drop_rate(double drop_rate) {
  if (!(drop_rate >= 0.0 && drop_rate <= 1.0)) {
    throw InvalidArgument("drop_rate must lie in [0, 1]");
  }
}

}  // namespace

Vector dropout_mask(std::size_t n, double drop_rate, Rng& rng) {
  check_drop_rate(drop_rate);
  Vector r(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    r(j) = rng.uniform() < drop_rate ? 0.0 : 1.0;
  }
  return r;
}

DropoutRbm::DropoutRbm(const RbmConfig& config, double drop_rate)
    : base_(config), drop_rate_(drop_rate), mask_rng_(derive_seed(config.seed, kDropoutMaskStream)) {
  check_drop_rate(drop_rate_);
}

DropoutRbm::DropoutRbm(Rbm base, double drop_rate, bool inference_scaled, Rng mask_rng)
    : base_(std::move(base)),
      drop_rate_(drop_rate),
      inference_scaled_(inference_scaled),
      mask_rng_(mask_rng) {
  check_drop_rate(drop_rate_);
}

Matrix DropoutRbm::prob_h_given_v(const Matrix& v, const Vector& r) const {
  if (inference_scaled_) {
    throw InvalidState("prob_h_given_v: dropout model is already scaled for inference");
  }
  if (r.size() != static_cast<Eigen::Index>(base_.n_hidden())) {
    throw InvalidArgument("prob_h_given_v: mask has " + std::to_string(r.size()) +
                          " entries, expected " + std::to_string(base_.n_hidden()));
  }
  Matrix ph = base_.prob_h_given_v(v);
  ph.array().rowwise() *= r.transpose().array();
  return ph;
}

FitResult DropoutRbm::fit(const Dataset& data, std::size_t batch_size, std::size_t epochs,
                          const EpochCallback& on_epoch) {
  if (inference_scaled_) {
    throw InvalidState("fit: dropout model is already scaled for inference");
  }
  FitOptions options;
  options.next_hidden_mask = [this] { return dropout_mask(base_.n_hidden(), drop_rate_, mask_rng_); };
  return base_.fit(data, batch_size, epochs, options, on_epoch);
}

void DropoutRbm::scale_for_inference() {
  if (inference_scaled_) {
    throw InvalidState("scale_for_inference: weights were already scaled");
  }
  base_.set_weights((1.0 - drop_rate_) * base_.weights());
  inference_scaled_ = true;
}

GaussianRbm::GaussianRbm(const RbmConfig& config) : base_(config) {
  const auto m = static_cast<Eigen::Index>(config.n_visible);
  stats_.mean = Vector::Zero(m);
  stats_.stddev = Vector::Ones(m);
}

GaussianRbm::GaussianRbm(Rbm base, Standardization stats) : base_(std::move(base)), stats_(std::move(stats)) {
  const auto m = static_cast<Eigen::Index>(base_.n_visible());
  if (stats_.mean.size() != m || stats_.stddev.size() != m) {
    throw InvalidArgument("GaussianRbm: statistics do not match n_visible");
  }
  if ((stats_.stddev.array() < kStdFloor).any()) {
    throw InvalidArgument("GaussianRbm: feature_std entries must be >= 1e-6");
  }
}

Matrix GaussianRbm::prob_v_given_h(const Matrix& h) const {
  return base_.visible_mean(h, VisibleUnits::gaussian);
}

FitResult GaussianRbm::fit(const Dataset& data, std::size_t batch_size, std::size_t epochs,
                           const EpochCallback& on_epoch) {
  if (data.mode() != DataMode::standardized || !data.standardization()) {
    throw InvalidState("GaussianRbm::fit: data must be standardized");
  }
  const Standardization& stats = *data.standardization();
  if (stats.mean.size() != static_cast<Eigen::Index>(base_.n_visible())) {
    throw InvalidArgument("GaussianRbm::fit: feature count mismatch");
  }
  FitOptions options;
  options.visible_units = VisibleUnits::gaussian;
  const FitResult result = base_.fit(data, batch_size, epochs, options, on_epoch);
  stats_ = stats;
  return result;
}

Dataset GaussianRbm::prepare(const Dataset& raw) const { return apply_standardization(raw, stats_); }

Reconstruction GaussianRbm::reconstruct(const Dataset& standardized, std::size_t batch_size) const {
  if (batch_size == 0) {
    throw InvalidArgument("reconstruct: batch_size must be >= 1");
  }
  if (standardized.mode() != DataMode::standardized) {
    throw InvalidState("GaussianRbm::reconstruct: data must be standardized");
  }
  return base_.reconstruct(standardized.samples(), VisibleUnits::gaussian);
}

FitResult SigmoidRbm::fit(const Dataset& data, std::size_t batch_size, std::size_t epochs,
                          const EpochCallback& on_epoch) {
  FitOptions options;
  options.visible_units = VisibleUnits::sigmoid;
  return base_.fit(data, batch_size, epochs, options, on_epoch);
}

}  // namespace ebm
