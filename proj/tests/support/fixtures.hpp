#ifndef EBM_TEST_FIXTURES_HPP
#define EBM_TEST_FIXTURES_HPP

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "ebm/rbm.hpp"
#include "oracle.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return EBM_TEST_DATA_DIR; }
inline std::filesystem::path train_images() { return data_dir() / "mnist-train-images.idx3-ubyte"; }
inline std::filesystem::path train_labels() { return data_dir() / "mnist-train-labels.idx1-ubyte"; }
inline std::filesystem::path test_images() { return data_dir() / "mnist-test-images.idx3-ubyte"; }
inline std::filesystem::path test_labels() { return data_dir() / "mnist-test-labels.idx1-ubyte"; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ebm-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Parameters drawn from std::mt19937_64, independent of the library's Rng.
inline oracle::Params random_params(int m, int n, double scale, std::mt19937_64& gen) {
  std::normal_distribution<double> dist(0.0, scale);
  oracle::Params p{Eigen::MatrixXd(m, n), Eigen::VectorXd(m), Eigen::VectorXd(n)};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) p.W(i, j) = dist(gen);
  }
  for (int i = 0; i < m; ++i) p.a(i) = dist(gen);
  for (int j = 0; j < n; ++j) p.b(j) = dist(gen);
  return p;
}

inline ebm::Rbm make_rbm(const oracle::Params& p, std::uint64_t seed = 0, double temperature = 1.0) {
  ebm::RbmConfig config;
  config.n_visible = static_cast<std::size_t>(p.m());
  config.n_hidden = static_cast<std::size_t>(p.n());
  config.temperature = temperature;
  config.seed = seed;
  ebm::Rbm rbm(config);
  rbm.set_weights(p.W);
  rbm.set_visible_bias(p.a);
  rbm.set_hidden_bias(p.b);
  return rbm;
}

/// FNV-1a over the raw bytes of a tensor.
inline std::uint64_t hash_bytes(const void* data, std::size_t size, std::uint64_t h = 1469598103934665603ull) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t hash_parameters(const ebm::Rbm& rbm) {
  std::uint64_t h = hash_bytes(rbm.weights().data(), sizeof(double) * rbm.weights().size());
  h = hash_bytes(rbm.visible_bias().data(), sizeof(double) * rbm.visible_bias().size(), h);
  return hash_bytes(rbm.hidden_bias().data(), sizeof(double) * rbm.hidden_bias().size(), h);
}

inline bool bit_equal(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  return x.rows() == y.rows() && x.cols() == y.cols() &&
         std::memcmp(x.data(), y.data(), sizeof(double) * x.size()) == 0;
}

}  // namespace fixtures

#endif  // EBM_TEST_FIXTURES_HPP
