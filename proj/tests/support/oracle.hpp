#ifndef EBM_TEST_ORACLE_HPP
#define EBM_TEST_ORACLE_HPP

// Enumeration oracle for small Bernoulli RBMs. Written from the energy
// definition with plain loops; shares nothing with the library except the
// Eigen container types.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Params {
  MatrixXd W;  // m x n
  VectorXd a;  // m
  VectorXd b;  // n

  int m() const { return static_cast<int>(W.rows()); }
  int n() const { return static_cast<int>(W.cols()); }
};

// Bit i of `code` is unit i.
inline VectorXd decode(std::uint32_t code, int width) {
  VectorXd x(width);
  for (int i = 0; i < width; ++i) x(i) = (code >> i) & 1u ? 1.0 : 0.0;
  return x;
}

inline std::uint32_t encode(const VectorXd& x) {
  std::uint32_t code = 0;
  for (int i = 0; i < x.size(); ++i) {
    if (x(i) > 0.5) code |= 1u << i;
  }
  return code;
}

inline double energy(const Params& p, const VectorXd& v, const VectorXd& h) {
  double e = 0.0;
  for (int i = 0; i < p.m(); ++i) e -= p.a(i) * v(i);
  for (int j = 0; j < p.n(); ++j) e -= p.b(j) * h(j);
  for (int i = 0; i < p.m(); ++i) {
    for (int j = 0; j < p.n(); ++j) e -= v(i) * h(j) * p.W(i, j);
  }
  return e;
}

// All 2^m x 2^n values of -E, indexed [v_code][h_code].
inline std::vector<std::vector<double>> neg_energies(const Params& p) {
  const std::uint32_t nv = 1u << p.m();
  const std::uint32_t nh = 1u << p.n();
  std::vector<std::vector<double>> out(nv, std::vector<double>(nh));
  for (std::uint32_t vc = 0; vc < nv; ++vc) {
    const VectorXd v = decode(vc, p.m());
    for (std::uint32_t hc = 0; hc < nh; ++hc) out[vc][hc] = -energy(p, v, decode(hc, p.n()));
  }
  return out;
}

inline double log_sum_exp(const std::vector<double>& xs) {
  const double hi = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

inline double log_z(const Params& p) {
  std::vector<double> all;
  for (const auto& row : neg_energies(p)) all.insert(all.end(), row.begin(), row.end());
  return log_sum_exp(all);
}

// P(v, h) for every configuration, [v_code][h_code].
inline std::vector<std::vector<double>> joint_table(const Params& p) {
  auto table = neg_energies(p);
  const double lz = log_z(p);
  for (auto& row : table) {
    for (double& x : row) x = std::exp(x - lz);
  }
  return table;
}

inline std::vector<double> visible_marginal(const Params& p) {
  const auto table = joint_table(p);
  std::vector<double> out(table.size(), 0.0);
  for (std::size_t vc = 0; vc < table.size(); ++vc) {
    for (double x : table[vc]) out[vc] += x;
  }
  return out;
}

// P(h_j = 1 | v) as sum_{h: h_j=1} P(v,h) / sum_h P(v,h).
inline VectorXd hidden_conditional(const Params& p, const VectorXd& v) {
  const std::uint32_t nh = 1u << p.n();
  VectorXd on = VectorXd::Zero(p.n());
  double total = 0.0;
  for (std::uint32_t hc = 0; hc < nh; ++hc) {
    const VectorXd h = decode(hc, p.n());
    const double w = std::exp(-energy(p, v, h));
    total += w;
    on += w * h;
  }
  return on / total;
}

inline VectorXd visible_conditional(const Params& p, const VectorXd& h) {
  const std::uint32_t nv = 1u << p.m();
  VectorXd on = VectorXd::Zero(p.m());
  double total = 0.0;
  for (std::uint32_t vc = 0; vc < nv; ++vc) {
    const VectorXd v = decode(vc, p.m());
    const double w = std::exp(-energy(p, v, h));
    total += w;
    on += w * v;
  }
  return on / total;
}

// sum_i log P(v_i | v_{-i}) from the visible marginal.
inline double log_pseudo_likelihood(const Params& p, const VectorXd& v) {
  const auto marginal = visible_marginal(p);
  const std::uint32_t code = encode(v);
  double s = 0.0;
  for (int i = 0; i < p.m(); ++i) {
    const double keep = marginal[code];
    const double flip = marginal[code ^ (1u << i)];
    s += std::log(keep / (keep + flip));
  }
  return s;
}

// d/dW of the mean log-likelihood of `data` (rows are binary samples):
// E_data[v P(h|v)^T] - E_model[v h^T].
inline MatrixXd log_likelihood_weight_gradient(const Params& p, const MatrixXd& data) {
  MatrixXd positive = MatrixXd::Zero(p.m(), p.n());
  for (int s = 0; s < data.rows(); ++s) {
    const VectorXd v = data.row(s).transpose();
    positive += v * hidden_conditional(p, v).transpose();
  }
  positive /= static_cast<double>(data.rows());

  const auto table = joint_table(p);
  MatrixXd negative = MatrixXd::Zero(p.m(), p.n());
  for (std::uint32_t vc = 0; vc < table.size(); ++vc) {
    const VectorXd v = decode(vc, p.m());
    for (std::uint32_t hc = 0; hc < table[vc].size(); ++hc) {
      negative += table[vc][hc] * v * decode(hc, p.n()).transpose();
    }
  }
  return positive - negative;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

inline double cosine(const MatrixXd& x, const MatrixXd& y) {
  return (x.array() * y.array()).sum() / (x.norm() * y.norm());
}

}  // namespace oracle

#endif  // EBM_TEST_ORACLE_HPP
