#ifndef EBM_METRICS_HPP
#define EBM_METRICS_HPP

#include <cstdint>
#include <vector>

#include "ebm/math.hpp"

namespace ebm {

class Rbm;

struct EpochRecord {
  std::size_t epoch_index = 0;
  double mse = 0.0;
  double pl = 0.0;  // NaN when pseudo-likelihood does not apply to the model
  std::int64_t wall_time_ms = 0;
};

struct FineTuneRecord {
  std::size_t epoch_index = 0;
  double cross_entropy = 0.0;
  double accuracy = 0.0;
};

/// Per-epoch training metrics carried by every model.
///
/// Epoch indices start at 1 and increase by one per appended record.
class TrainingHistory {
 public:
  const std::vector<EpochRecord>& epochs() const { return epochs_; }
  const std::vector<FineTuneRecord>& fine_tune_epochs() const { return fine_tune_; }
  bool empty() const { return epochs_.empty(); }

  /// Appends the next epoch; the index is assigned here.
  const EpochRecord& add_epoch(double mse, double pl, std::int64_t wall_time_ms);
  const FineTuneRecord& add_fine_tune_epoch(double cross_entropy, double accuracy);

  /// Appends a record verbatim, validating its index and ranges (used when loading).
  void push(const EpochRecord& record);
  void push(const FineTuneRecord& record);

 private:
  std::vector<EpochRecord> epochs_;
  std::vector<FineTuneRecord> fine_tune_;
};

/// Mean over all entries of (x - y)^2.
double mse(const Matrix& x, const Matrix& y);

/// Single-flip pseudo-likelihood estimate averaged over the batch.
///
/// For each row v one bit index i is drawn uniformly, v~ is v with bit i
/// flipped, and the row scores m * log sigmoid(F(v~) - F(v)), where F is the
/// model's free energy and log sigmoid(x) = -softplus(-x). Consumes one
/// uniform_index draw per row. Throws InvalidArgument for non-binary v.
double pseudo_likelihood(const Rbm& rbm, const Matrix& v, Rng& rng);

/// Deterministic variant that averages over every flip position:
/// per row, sum_i log sigmoid(F(v with bit i flipped) - F(v)).
double pseudo_likelihood_all_flips(const Rbm& rbm, const Matrix& v);

}  // namespace ebm

#endif  // EBM_METRICS_HPP
