#include "ebm/rbm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "ebm/errors.hpp"

namespace ebm {

namespace {

void mask_columns(Matrix& m, const Vector* mask) {
  if (mask != nullptr) {
    m.array().rowwise() *= mask->transpose().array();
  }
}

void check_binary_vector(const Vector& x, Eigen::Index expected, const char* what) {
  if (x.size() != expected) {
    throw InvalidArgument(std::string("energy: ") + what + " has " + std::to_string(x.size()) +
                          " entries, expected " + std::to_string(expected));
  }
  if (!is_binary(x)) {
    throw InvalidArgument(std::string("energy: ") + what + " must be binary");
  }
}

Vector bits_of(std::uint64_t code, Eigen::Index width) {
  Vector out(width);
  for (Eigen::Index i = 0; i < width; ++i) {
    out(i) = static_cast<double>((code >> i) & 1u);
  }
  return out;
}

}  // namespace

void RbmConfig::validate() const {
  if (n_visible == 0 || n_hidden == 0) {
    throw InvalidArgument("RbmConfig: layer sizes must be positive");
  }
  if (steps == 0) {
    throw InvalidArgument("RbmConfig: steps must be >= 1");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("RbmConfig: learning_rate must be finite and >= 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw InvalidArgument("RbmConfig: momentum must lie in [0, 1)");
  }
  if (!(decay >= 0.0) || !std::isfinite(decay)) {
    throw InvalidArgument("RbmConfig: decay must be finite and >= 0");
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidArgument("RbmConfig: temperature must be finite and > 0");
  }
}

Rbm::Rbm(const RbmConfig& config) : config_(config), rng_(config.seed) {
  config_.validate();
  const auto m = static_cast<Eigen::Index>(config_.n_visible);
  const auto n = static_cast<Eigen::Index>(config_.n_hidden);
  weights_.resize(m, n);
  // Row-major draw order so the stream maps onto W independently of storage order.
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      weights_(i, j) = rng_.normal(0.0, 0.01);
    }
  }
  visible_bias_ = Vector::Zero(m);
  hidden_bias_ = Vector::Zero(n);
  velocity_weights_ = Matrix::Zero(m, n);
  velocity_visible_ = Vector::Zero(m);
  velocity_hidden_ = Vector::Zero(n);
}

void Rbm::set_weights(Matrix w) {
  if (w.rows() != weights_.rows() || w.cols() != weights_.cols()) {
    throw InvalidArgument("set_weights: shape mismatch");
  }
  if (!w.allFinite()) {
    throw InvalidArgument("set_weights: non-finite entry");
  }
  weights_ = std::move(w);
}

void Rbm::set_visible_bias(Vector a) {
  if (a.size() != visible_bias_.size() || !a.allFinite()) {
    throw InvalidArgument("set_visible_bias: shape mismatch or non-finite entry");
  }
  visible_bias_ = std::move(a);
}

void Rbm::set_hidden_bias(Vector b) {
  if (b.size() != hidden_bias_.size() || !b.allFinite()) {
    throw InvalidArgument("set_hidden_bias: shape mismatch or non-finite entry");
  }
  hidden_bias_ = std::move(b);
}

void Rbm::set_velocities(Matrix w, Vector a, Vector b) {
  if (w.rows() != weights_.rows() || w.cols() != weights_.cols() ||
      a.size() != visible_bias_.size() || b.size() != hidden_bias_.size()) {
    throw InvalidArgument("set_velocities: shape mismatch");
  }
  velocity_weights_ = std::move(w);
  velocity_visible_ = std::move(a);
  velocity_hidden_ = std::move(b);
}

void Rbm::set_learning_rate(double learning_rate) {
  RbmConfig next = config_;
  next.learning_rate = learning_rate;
  next.validate();
  config_ = next;
}

double Rbm::energy(const Vector& v, const Vector& h) const {
  check_binary_vector(v, weights_.rows(), "v");
  check_binary_vector(h, weights_.cols(), "h");
  return -visible_bias_.dot(v) - hidden_bias_.dot(h) - v.dot(weights_ * h);
}

double Rbm::log_partition_bruteforce() const {
  const std::size_t units = config_.n_visible + config_.n_hidden;
  if (units > kMaxEnumerationUnits) {
    throw CapacityError("log_partition_bruteforce: " + std::to_string(units) +
                        " units exceed the enumeration bound of " +
                        std::to_string(kMaxEnumerationUnits));
  }
  const auto m = weights_.rows();
  const auto n = weights_.cols();
  const std::uint64_t nv = std::uint64_t{1} << m;
  const std::uint64_t nh = std::uint64_t{1} << n;

  std::vector<double> neg_energy;
  neg_energy.reserve(nv * nh);
  std::vector<Vector> hidden_states;
  hidden_states.reserve(nh);
  for (std::uint64_t hc = 0; hc < nh; ++hc) hidden_states.push_back(bits_of(hc, n));

  for (std::uint64_t vc = 0; vc < nv; ++vc) {
    const Vector v = bits_of(vc, m);
    const double av = visible_bias_.dot(v);
    const RowVector vw = v.transpose() * weights_;
    for (const Vector& h : hidden_states) {
      neg_energy.push_back(av + hidden_bias_.dot(h) + vw.dot(h));
    }
  }
  const double peak = *std::max_element(neg_energy.begin(), neg_energy.end());
  double total = 0.0;
  for (double x : neg_energy) total += std::exp(x - peak);
  return peak + std::log(total);
}

double Rbm::joint_probability_bruteforce(const Vector& v, const Vector& h) const {
  const double log_z = log_partition_bruteforce();
  return std::exp(-energy(v, h) - log_z);
}

void Rbm::check_visible_cols(const Matrix& v, const char* op) const {
  if (v.cols() != weights_.rows()) {
    throw InvalidArgument(std::string(op) + ": input has " + std::to_string(v.cols()) +
                          " columns, expected " + std::to_string(weights_.rows()));
  }
}

Matrix Rbm::hidden_pre_activation(const Matrix& v) const {
  return (v * weights_).rowwise() + hidden_bias_.transpose();
}

Matrix Rbm::prob_h_given_v(const Matrix& v) const {
  check_visible_cols(v, "prob_h_given_v");
  return sigmoid(hidden_pre_activation(v), config_.temperature);
}

Matrix Rbm::prob_v_given_h(const Matrix& h) const {
  if (h.cols() != weights_.cols()) {
    throw InvalidArgument("prob_v_given_h: input has " + std::to_string(h.cols()) +
                          " columns, expected " + std::to_string(weights_.cols()));
  }
  return sigmoid(Matrix((h * weights_.transpose()).rowwise() + visible_bias_.transpose()));
}

Matrix Rbm::visible_mean(const Matrix& h, VisibleUnits units) const {
  if (units == VisibleUnits::gaussian) {
    if (h.cols() != weights_.cols()) {
      throw InvalidArgument("visible_mean: input has " + std::to_string(h.cols()) +
                            " columns, expected " + std::to_string(weights_.cols()));
    }
    return (h * weights_.transpose()).rowwise() + visible_bias_.transpose();
  }
  return prob_v_given_h(h);
}

Vector Rbm::free_energy(const Matrix& v) const {
  check_visible_cols(v, "free_energy");
  const Matrix pre = hidden_pre_activation(v);
  const Vector hidden_term = pre.unaryExpr([](double x) { return softplus(x); }).rowwise().sum();
  return -(v * visible_bias_) - hidden_term;
}

GibbsSample Rbm::gibbs_step(const Matrix& v) {
  GibbsSample out;
  out.hidden_probs = prob_h_given_v(v);
  out.hidden = bernoulli_sample(out.hidden_probs, rng_);
  out.visible_probs = prob_v_given_h(out.hidden);
  out.visible = bernoulli_sample(out.visible_probs, rng_);
  return out;
}

CdGradient Rbm::contrastive_divergence(const Matrix& v0, const CdOptions& options) {
  check_visible_cols(v0, "contrastive_divergence");
  if (v0.rows() == 0) {
    throw InvalidArgument("contrastive_divergence: empty batch");
  }
  if (options.hidden_mask != nullptr && options.hidden_mask->size() != weights_.cols()) {
    throw InvalidArgument("contrastive_divergence: hidden mask length mismatch");
  }

  Matrix ph0 = prob_h_given_v(v0);
  mask_columns(ph0, options.hidden_mask);
  Matrix h = bernoulli_sample(ph0, rng_);

  Matrix pv;
  Matrix phk;
  for (std::size_t step = 1; step <= config_.steps; ++step) {
    pv = visible_mean(h, options.visible_units);
    if (step < config_.steps) {
      const Matrix v = options.visible_units == VisibleUnits::bernoulli ? bernoulli_sample(pv, rng_) : pv;
      Matrix ph = prob_h_given_v(v);
      mask_columns(ph, options.hidden_mask);
      h = bernoulli_sample(ph, rng_);
    } else {
      phk = prob_h_given_v(pv);
      mask_columns(phk, options.hidden_mask);
    }
  }

  const double batch = static_cast<double>(v0.rows());
  CdGradient grad;
  grad.weights = (v0.transpose() * ph0 - pv.transpose() * phk) / batch;
  grad.visible_bias = (v0 - pv).colwise().sum().transpose() / batch;
  grad.hidden_bias = (ph0 - phk).colwise().sum().transpose() / batch;
  grad.reconstruction = std::move(pv);
  return grad;
}

void Rbm::apply_gradient(const CdGradient& grad) {
  const double lr = config_.learning_rate;
  const double mom = config_.momentum;
  velocity_weights_ = mom * velocity_weights_ + lr * (grad.weights - config_.decay * weights_);
  velocity_visible_ = mom * velocity_visible_ + lr * grad.visible_bias;
  velocity_hidden_ = mom * velocity_hidden_ + lr * grad.hidden_bias;
  weights_ += velocity_weights_;
  visible_bias_ += velocity_visible_;
  hidden_bias_ += velocity_hidden_;
}

void Rbm::check_finite_parameters() const {
  if (!weights_.allFinite() || !visible_bias_.allFinite() || !hidden_bias_.allFinite()) {
    throw NumericError("fit: parameters diverged to a non-finite value");
  }
}

FitResult Rbm::fit(const Dataset& data, std::size_t batch_size, std::size_t epochs,
                   const EpochCallback& on_epoch) {
  return fit(data, batch_size, epochs, FitOptions{}, on_epoch);
}

FitResult Rbm::fit(const Dataset& data, std::size_t batch_size, std::size_t epochs,
                   const FitOptions& options, const EpochCallback& on_epoch) {
  if (batch_size == 0 || epochs == 0) {
    throw InvalidArgument("fit: batch_size and epochs must be >= 1");
  }
  const bool gaussian = options.visible_units == VisibleUnits::gaussian;
  if (gaussian != (data.mode() == DataMode::standardized)) {
    throw InvalidState("fit: " + std::string(to_string(data.mode())) +
                       " data is incompatible with this model's visible units");
  }
  if (data.num_features() != config_.n_visible) {
    throw InvalidArgument("fit: dataset has " + std::to_string(data.num_features()) +
                          " features, model expects " + std::to_string(config_.n_visible));
  }
  if (data.size() == 0) {
    throw InvalidArgument("fit: empty dataset");
  }

  const bool estimate_pl = !gaussian && !options.skip_pseudo_likelihood;
  const bool needs_shadow = data.mode() == DataMode::raw;

  FitResult last;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<std::size_t> order = epoch_order(data.size(), true, rng_);

    double mse_sum = 0.0;
    double pl_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
      const std::size_t end = std::min(begin + batch_size, order.size());
      const Matrix v0 =
          gather_rows(data.samples(), std::span<const std::size_t>(order.data() + begin, end - begin));
      const double rows = static_cast<double>(v0.rows());

      Vector mask;
      CdOptions cd{options.visible_units, nullptr};
      if (options.next_hidden_mask) {
        mask = options.next_hidden_mask();
        cd.hidden_mask = &mask;
      }
      const CdGradient grad = contrastive_divergence(v0, cd);
      apply_gradient(grad);

      mse_sum += rows * mse(v0, grad.reconstruction);
      if (estimate_pl) {
        const Matrix bits =
            needs_shadow ? Matrix((v0.array() > kDefaultBinarizeThreshold).cast<double>()) : v0;
        pl_sum += rows * pseudo_likelihood(*this, bits, rng_);
      }
    }
    check_finite_parameters();

    const double n = static_cast<double>(data.size());
    last.mse = mse_sum / n;
    last.pl = estimate_pl ? pl_sum / n : std::numeric_limits<double>::quiet_NaN();
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    const EpochRecord& record = history_.add_epoch(last.mse, last.pl, elapsed.count());
    if (on_epoch) on_epoch(record);
  }
  return last;
}

Reconstruction Rbm::reconstruct(const Matrix& v, VisibleUnits units) const {
  check_visible_cols(v, "reconstruct");
  Reconstruction out;
  out.visible = visible_mean(prob_h_given_v(v), units);
  out.mse = mse(v, out.visible);
  return out;
}

Reconstruction Rbm::reconstruct(const Dataset& data, std::size_t batch_size) const {
  if (batch_size == 0) {
    throw InvalidArgument("reconstruct: batch_size must be >= 1");
  }
  if (data.mode() == DataMode::standardized) {
    throw InvalidState("reconstruct: standardized data is incompatible with Bernoulli visible units");
  }
  check_visible_cols(data.samples(), "reconstruct");
  Reconstruction out;
  out.visible.resize(data.samples().rows(), data.samples().cols());
  const auto total = data.samples().rows();
  for (Eigen::Index begin = 0; begin < total; begin += static_cast<Eigen::Index>(batch_size)) {
    const Eigen::Index rows = std::min<Eigen::Index>(static_cast<Eigen::Index>(batch_size), total - begin);
    out.visible.middleRows(begin, rows) = prob_v_given_h(prob_h_given_v(data.samples().middleRows(begin, rows)));
  }
  out.mse = total > 0 ? mse(data.samples(), out.visible) : 0.0;
  return out;
}

}  // namespace ebm
