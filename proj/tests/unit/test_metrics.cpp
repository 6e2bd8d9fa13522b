#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ebm/dataset.hpp"
#include "ebm/errors.hpp"
#include "ebm/metrics.hpp"
#include "ebm/rbm.hpp"
#include "fixtures.hpp"

using namespace ebm;

TEST(Mse, Examples) {
  const Matrix x{{0.0, 1.0}};
  EXPECT_EQ(mse(x, x), 0.0);
  EXPECT_DOUBLE_EQ(mse(Matrix{{0.0, 1.0, 1.0, 0.0}}, Matrix::Constant(1, 4, 0.5)), 0.25);
  EXPECT_DOUBLE_EQ(mse(x, Matrix{{1.0, 1.0}}), 0.5);
  EXPECT_THROW(mse(x, Matrix::Zero(2, 1)), InvalidArgument);
  EXPECT_THROW(mse(Matrix(0, 0), Matrix(0, 0)), InvalidArgument);
}

TEST(Mse, Symmetric) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Matrix a(6, 5);
  Matrix b(6, 5);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a(i) = u(gen);
    b(i) = u(gen);
  }
  EXPECT_EQ(mse(a, b), mse(b, a));
  EXPECT_GT(mse(a, b), 0.0);
}

TEST(PseudoLikelihood, ZeroModel) {
  RbmConfig c;
  c.n_visible = 7;
  c.n_hidden = 3;
  Rbm rbm(c);
  rbm.set_weights(Matrix::Zero(7, 3));
  Rng rng(2);
  Matrix v = Matrix::Zero(4, 7);
  v(1, 2) = 1.0;
  EXPECT_DOUBLE_EQ(pseudo_likelihood(rbm, v, rng), -7.0 * std::log(2.0));
  EXPECT_DOUBLE_EQ(pseudo_likelihood_all_flips(rbm, v), -7.0 * std::log(2.0));
}

TEST(PseudoLikelihood, NegativeAndRngDriven) {
  std::mt19937_64 gen(3);
  const oracle::Params p = fixtures::random_params(8, 5, 1.0, gen);
  const Rbm rbm = fixtures::make_rbm(p);
  Matrix v(20, 8);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = (gen() & 1u) ? 1.0 : 0.0;
  Rng x(4);
  Rng y(4);
  const double a = pseudo_likelihood(rbm, v, x);
  EXPECT_LT(a, 0.0);
  EXPECT_EQ(a, pseudo_likelihood(rbm, v, y));
  EXPECT_FALSE(x == Rng(4));
}

TEST(PseudoLikelihood, RejectsNonBinary) {
  RbmConfig c;
  c.n_visible = 2;
  c.n_hidden = 2;
  const Rbm rbm(c);
  Rng rng(0);
  EXPECT_THROW(pseudo_likelihood(rbm, Matrix{{0.5, 1.0}}, rng), InvalidArgument);
  EXPECT_THROW(pseudo_likelihood_all_flips(rbm, Matrix{{0.5, 1.0}}), InvalidArgument);
}

TEST(PseudoLikelihood, AllFlipsMatchesOracle) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const oracle::Params p = fixtures::random_params(3, 3, 1.5, gen);
    const Rbm rbm = fixtures::make_rbm(p);
    Matrix v(8, 3);
    double expected = 0.0;
    for (int code = 0; code < 8; ++code) {
      v.row(code) = oracle::decode(code, 3).transpose();
      expected += oracle::log_pseudo_likelihood(p, v.row(code).transpose()) / 8.0;
    }
    ASSERT_NEAR(pseudo_likelihood_all_flips(rbm, v), expected, 1e-9);
  }
}

TEST(PseudoLikelihood, SingleFlipIsUnbiased) {
  std::mt19937_64 gen(6);
  const oracle::Params p = fixtures::random_params(4, 3, 1.0, gen);
  const Rbm rbm = fixtures::make_rbm(p);
  const Matrix v = Matrix::Ones(20000, 4);
  Rng rng(7);
  EXPECT_NEAR(pseudo_likelihood(rbm, v, rng), pseudo_likelihood_all_flips(rbm, v), 0.05);
}

TEST(TrainingHistory, IndicesAndValidation) {
  TrainingHistory h;
  EXPECT_TRUE(h.empty());
  EXPECT_EQ(h.add_epoch(0.2, -10.0, 5).epoch_index, 1u);
  EXPECT_EQ(h.add_epoch(0.1, std::nan(""), 4).epoch_index, 2u);
  EXPECT_EQ(h.epochs().size(), 2u);
  EXPECT_THROW(h.add_epoch(-0.1, -1.0, 0), InvalidArgument);
  EXPECT_THROW(h.push(EpochRecord{2, 0.1, -1.0, 0}), InvalidArgument);
  EXPECT_NO_THROW(h.push(EpochRecord{3, 0.1, -1.0, 0}));

  EXPECT_EQ(h.add_fine_tune_epoch(0.5, 0.75).epoch_index, 1u);
  EXPECT_THROW(h.add_fine_tune_epoch(0.5, 1.5), InvalidArgument);
  EXPECT_THROW(h.push(FineTuneRecord{5, 0.5, 0.5}), InvalidArgument);
}

TEST(TrainingHistory, PlRisesDuringTraining) {
  RbmConfig c;
  c.n_visible = 784;
  c.n_hidden = 64;
  c.seed = 3;
  Rbm rbm(c);
  rbm.fit(binarize(load_idx_images(fixtures::train_images())), 128, 5);
  const auto& e = rbm.history().epochs();
  EXPECT_GT(e.back().pl, e.front().pl);
}
