#include "ebm/math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ebm/errors.hpp"

namespace ebm {

namespace {

constexpr double kSigmoidLow = std::numeric_limits<double>::denorm_min();
constexpr double kSigmoidHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;

double logistic(double z) {
  double s;
  if (z >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    s = e / (1.0 + e);
  }
  return std::clamp(s, kSigmoidLow, kSigmoidHigh);
}

void check_temperature(double temperature) {
  if (!(temperature > 0.0)) {
    throw InvalidArgument("sigmoid: temperature must be > 0");
  }
}

template <typename Plain>
Plain scale_unitary_impl(const Plain& t) {
  if (t.size() == 0) {
    throw InvalidArgument("scale_unitary: empty input");
  }
  const double lo = t.minCoeff();
  const double hi = t.maxCoeff();
  if (hi == lo) {
    return Plain::Zero(t.rows(), t.cols());
  }
  return ((t.array() - lo) / (hi - lo)).matrix();
}

template <typename Plain>
Plain bernoulli_impl(const Plain& probs, Rng& rng) {
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = probs.data()[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument("bernoulli_sample: probability outside [0, 1]");
    }
  }
  Plain out(probs.rows(), probs.cols());
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    out.data()[i] = rng.uniform() < probs.data()[i] ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) {
    throw InvalidArgument("uniform_index: n must be positive");
  }
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  // Largest multiple of bound that fits; draws at or above it are rejected.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng mixer(seed ^ (stream * 0xD1B54A32D192ED03ULL));
  return mixer.next_u64();
}

double sigmoid(double x, double temperature) {
  check_temperature(temperature);
  return logistic(x / temperature);
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Matrix sigmoid(const Matrix& x, double temperature) {
  check_temperature(temperature);
  if (temperature == 1.0) {
    return x.unaryExpr([](double z) { return logistic(z); });
  }
  return x.unaryExpr([temperature](double z) { return logistic(z / temperature); });
}

Matrix scale_unitary(const Matrix& t) { return scale_unitary_impl(t); }
Vector scale_unitary(const Vector& t) { return scale_unitary_impl(t); }

Matrix bernoulli_sample(const Matrix& probs, Rng& rng) { return bernoulli_impl(probs, rng); }
Vector bernoulli_sample(const Vector& probs, Rng& rng) { return bernoulli_impl(probs, rng); }

bool is_binary(const Matrix& m) {
  return (m.array() == 0.0 || m.array() == 1.0).all();
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace ebm
