#include "ebm/metrics.hpp"

#include <cmath>
#include <string>

#include "ebm/errors.hpp"
#include "ebm/rbm.hpp"

namespace ebm {

namespace {

double log_sigmoid(double x) { return -softplus(-x); }

void check_pl_input(const Rbm& rbm, const Matrix& v) {
  if (v.cols() != static_cast<Eigen::Index>(rbm.n_visible())) {
    throw InvalidArgument("pseudo_likelihood: input has " + std::to_string(v.cols()) +
                          " columns, expected " + std::to_string(rbm.n_visible()));
  }
  if (!is_binary(v)) {
    throw InvalidArgument("pseudo_likelihood: input must be binary");
  }
}

}  // namespace

const EpochRecord& TrainingHistory::add_epoch(double mse, double pl, std::int64_t wall_time_ms) {
  push(EpochRecord{epochs_.size() + 1, mse, pl, wall_time_ms});
  return epochs_.back();
}

const FineTuneRecord& TrainingHistory::add_fine_tune_epoch(double cross_entropy, double accuracy) {
  push(FineTuneRecord{fine_tune_.size() + 1, cross_entropy, accuracy});
  return fine_tune_.back();
}

void TrainingHistory::push(const EpochRecord& record) {
  if (record.epoch_index != epochs_.size() + 1) {
    throw InvalidArgument("TrainingHistory: epoch index " + std::to_string(record.epoch_index) +
                          " out of sequence");
  }
  if (!(record.mse >= 0.0)) {
    throw InvalidArgument("TrainingHistory: mse must be >= 0");
  }
  epochs_.push_back(record);
}

void TrainingHistory::push(const FineTuneRecord& record) {
  if (record.epoch_index != fine_tune_.size() + 1) {
    throw InvalidArgument("TrainingHistory: fine-tune epoch index " +
                          std::to_string(record.epoch_index) + " out of sequence");
  }
  if (!(record.accuracy >= 0.0 && record.accuracy <= 1.0)) {
    throw InvalidArgument("TrainingHistory: accuracy must lie in [0, 1]");
  }
  fine_tune_.push_back(record);
}

double mse(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw InvalidArgument("mse: shape mismatch");
  }
  if (x.size() == 0) {
    throw InvalidArgument("mse: empty input");
  }
  return (x - y).squaredNorm() / static_cast<double>(x.size());
}

double pseudo_likelihood(const Rbm& rbm, const Matrix& v, Rng& rng) {
  check_pl_input(rbm, v);
  if (v.rows() == 0) {
    throw InvalidArgument("pseudo_likelihood: empty batch");
  }
  Matrix flipped = v;
  for (Eigen::Index s = 0; s < v.rows(); ++s) {
    const auto i = static_cast<Eigen::Index>(rng.uniform_index(rbm.n_visible()));
    flipped(s, i) = 1.0 - flipped(s, i);
  }
  const Vector fe = rbm.free_energy(v);
  const Vector fe_flipped = rbm.free_energy(flipped);
  const double m = static_cast<double>(rbm.n_visible());
  double total = 0.0;
  for (Eigen::Index s = 0; s < v.rows(); ++s) {
    total += m * log_sigmoid(fe_flipped(s) - fe(s));
  }
  return total / static_cast<double>(v.rows());
}

double pseudo_likelihood_all_flips(const Rbm& rbm, const Matrix& v) {
  check_pl_input(rbm, v);
  if (v.rows() == 0) {
    throw InvalidArgument("pseudo_likelihood_all_flips: empty batch");
  }
  const Vector fe = rbm.free_energy(v);
  Vector per_row = Vector::Zero(v.rows());
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    Matrix flipped = v;
    flipped.col(i) = (1.0 - v.col(i).array()).matrix();
    const Vector fe_flipped = rbm.free_energy(flipped);
    for (Eigen::Index s = 0; s < v.rows(); ++s) {
      per_row(s) += log_sigmoid(fe_flipped(s) - fe(s));
    }
  }
  return per_row.mean();
}

}  // namespace ebm
