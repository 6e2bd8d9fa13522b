#ifndef EBM_MATH_HPP
#define EBM_MATH_HPP

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace ebm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Seedable 64-bit generator used for every stochastic step in the library.
///
/// The recurrence is SplitMix64 (Steele, Lea & Flood 2014):
///
///     state += 0x9E3779B97F4A7C15
///     z = state
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     return z ^ (z >> 31)
///
/// Derived draws are defined on top of next_u64() so the stream can be
/// reproduced in any language:
///   - uniform():  (next_u64() >> 11) * 2^-53, in [0, 1)
///   - normal():   Box-Muller, sqrt(-2 ln(1 - u1)) * cos(2 pi u2), one value
///                 per call (two uniforms consumed, second variate discarded)
///   - uniform_index(n): rejection sampling on next_u64() to avoid modulo bias
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64();
  double uniform();
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  std::size_t uniform_index(std::size_t n);

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t state) { state_ = state; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::uint64_t state_;
};

/// Seed for an independent stream derived from `seed`. Used to give
/// auxiliary consumers (dropout masks, fine-tuning) their own Rng.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Logistic function 1 / (1 + exp(-x / temperature)).
///
/// Evaluated in the branch that never overflows and clamped into the open
/// interval (0, 1). Throws InvalidArgument for temperature <= 0.
double sigmoid(double x, double temperature = 1.0);

/// ln(1 + exp(x)) computed as max(x, 0) + log1p(exp(-|x|)).
double softplus(double x);

/// Elementwise sigmoid with a pre-validated temperature.
Matrix sigmoid(const Matrix& x, double temperature = 1.0);

/// Min-max scaling to [0, 1]. A constant input maps to all zeros.
Matrix scale_unitary(const Matrix& t);
Vector scale_unitary(const Vector& t);

/// Independent Bernoulli draws, one uniform per entry in column-major order.
Matrix bernoulli_sample(const Matrix& probs, Rng& rng);
Vector bernoulli_sample(const Vector& probs, Rng& rng);

/// Evaluates an Eigen expression first; column-vector expressions yield a Vector.
template <class Derived>
auto bernoulli_sample(const Eigen::MatrixBase<Derived>& probs, Rng& rng) {
  if constexpr (Derived::ColsAtCompileTime == 1) {
    return bernoulli_sample(Vector(probs), rng);
  } else {
    return bernoulli_sample(Matrix(probs), rng);
  }
}

/// True when every entry is exactly 0 or 1.
bool is_binary(const Matrix& m);

bool all_finite(const Matrix& m);

}  // namespace ebm

#endif  // EBM_MATH_HPP
