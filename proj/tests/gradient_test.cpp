#include <gtest/gtest.h>

#include "gradient_oracle.hpp"

namespace potion {
namespace {

TEST(GradientOracle, ReferenceLossAgreesWithLibraryLoss) {
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto pt = test::random_grad_point(rng, 7, 3, 4);
    EXPECT_NEAR(test::reference_loss(pt.batch, pt.weights, 0.01),
                loss_and_grad(pt.batch, pt.weights, 0.01).loss, 1e-12);
  }
}

TEST(GradientCheck, HiddenLayerModel) {
  Rng rng(12345);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto pt = test::random_grad_point(rng, 7, 3, 1 + rng.below(5));
    const double l2 = i % 2 ? 1e-2 : 0.0;
    const auto res = test::check_gradients(pt.batch, pt.weights, l2);
    EXPECT_EQ(res.entries, 3u * 7 + 3 + 11u * 3 + 11);
    worst = std::max(worst, res.max_rel_error);
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(GradientCheck, SoftmaxRegression) {
  Rng rng(54321);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto pt = test::random_grad_point(rng, 5, 0, 3);
    worst = std::max(worst, test::check_gradients(pt.batch, pt.weights, 1e-3).max_rel_error);
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(GradientCheck, DeadUnitsGetZeroGradient) {
  Weights w = Weights::zeros(2, 2);
  w.b1 = {-5.0, 1.0};
  w.w1.data = {0.1, 0.1, 0.2, -0.3};
  w.w2.data.assign(w.w2.data.size(), 0.3);
  const std::vector<Example> batch{{{0.5, 0.5}, 4}};
  const LossGrad lg = loss_and_grad(batch, w, 0.0);
  EXPECT_EQ(lg.grads.b1[0], 0.0);
  EXPECT_EQ(lg.grads.w1(0, 0), 0.0);
  EXPECT_EQ(lg.grads.w1(0, 1), 0.0);
  for (std::size_t c = 0; c < kNumCategories; ++c) EXPECT_EQ(lg.grads.w2(c, 0), 0.0);
}

}  // namespace
}  // namespace potion
