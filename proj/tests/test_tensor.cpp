#include <cmath>

#include <gtest/gtest.h>

#include "pivotmt/error.hpp"
#include "pivotmt/graph.hpp"
#include "pivotmt/ops.hpp"
#include "support.hpp"

using namespace pivotmt;
using testing_support::random_tensor;

namespace {

class F64 : public ::testing::Test {
 protected:
  PrecisionScope scope{Precision::f64};
};

}  // namespace

TEST(Tensor, ShapesAndAccess) {
  Tensor t = Tensor::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_EQ(t(1, 2), 6.0);
  EXPECT_EQ(t.row(1)[0], 4.0);
  EXPECT_EQ(Tensor::scalar(2.5).item(), 2.5);
  EXPECT_THROW(t.item(), ContractError);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
}

TEST(Tensor, FiniteCheck) {
  Tensor t = Tensor::matrix(1, 2);
  EXPECT_TRUE(t.all_finite());
  t[1] = std::nan("");
  EXPECT_FALSE(t.all_finite());
}

TEST(Precision, F32RoundsOpOutputs) {
  PrecisionScope s(Precision::f32);
  Graph g;
  Var a = g.constant(Tensor::scalar(1.0));
  Var b = scale(a, 1.0 / 3.0);
  EXPECT_EQ(b.item(), static_cast<double>(static_cast<float>(1.0 / 3.0)));
}

TEST_F(F64, MatmulExample) {
  Graph g;
  Var a = g.constant(Tensor::from_rows({{3, 4}}));
  Var b = g.constant(Tensor::from_rows({{1}, {1}}));
  Var c = matmul(a, b);
  ASSERT_EQ(c.shape(), (Shape{1, 1}));
  EXPECT_EQ(c.item(), 7.0);
}

TEST_F(F64, MatmulShapeMismatch) {
  Graph g;
  Var a = g.constant(Tensor::matrix(2, 3));
  Var b = g.constant(Tensor::matrix(2, 3));
  EXPECT_THROW(matmul(a, b), DimensionError);
  EXPECT_THROW(add(a, g.constant(Tensor::matrix(3, 2))), DimensionError);
}

TEST_F(F64, TanhSigmoidAtZero) {
  Graph g;
  Var z = g.constant(Tensor::scalar(0.0));
  EXPECT_EQ(tanh(z).item(), 0.0);
  EXPECT_EQ(sigmoid(z).item(), 0.5);
}

TEST_F(F64, SoftmaxCrossEntropyUniform) {
  Graph g;
  Var logits = g.constant(Tensor::matrix(1, 8, 0.7));
  for (std::size_t target = 0; target < 8; ++target) {
    const std::vector<std::size_t> t{target};
    const std::vector<double> w{1.0};
    EXPECT_NEAR(softmax_cross_entropy(logits, t, w).item(), std::log(8.0), 1e-12);
  }
  EXPECT_NEAR(std::log(8.0), 2.07944, 1e-5);
}

TEST_F(F64, SoftmaxCrossEntropyWeights) {
  Graph g;
  Var logits = g.constant(Tensor::from_rows({{0, 0}, {5, -5}}));
  const std::vector<std::size_t> t{0, 1};
  const std::vector<double> w{1.0, 0.0};
  EXPECT_NEAR(softmax_cross_entropy(logits, t, w).item(), std::log(2.0), 1e-12);
}

TEST_F(F64, NormalizeExamples) {
  Graph g;
  Var v = l2_normalize_rows(g.constant(Tensor::from_rows({{3, 4}})));
  EXPECT_NEAR(v.value()[0], 0.6, 1e-15);
  EXPECT_NEAR(v.value()[1], 0.8, 1e-15);

  Var u = l2_normalize_rows(g.constant(Tensor::from_rows({{0.6, 0.8}, {1, 0}})));
  EXPECT_NEAR(u.value()(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(u.value()(0, 1), 0.8, 1e-15);
  EXPECT_EQ(u.value()(1, 0), 1.0);
  EXPECT_EQ(u.value()(1, 1), 0.0);

  EXPECT_THROW(l2_normalize_rows(g.constant(Tensor::from_rows({{0, 0}}))), DegenerateVectorError);
}

TEST_F(F64, NormalizeUnitRowsProperty) {
  Rng rng(7);
  Graph g;
  for (int trial = 0; trial < 50; ++trial) {
    Var v = l2_normalize_rows(g.constant(random_tensor(3, 1 + trial % 9, rng, 10.0)));
    for (std::size_t r = 0; r < 3; ++r) EXPECT_NEAR(l2_norm(v.value().row(r)), 1.0, 1e-12);
  }
}

TEST_F(F64, BackwardSquare) {
  ParameterStore store;
  Parameter& x = store.add("x", Tensor::scalar(3.0));
  Graph g;
  Var xv = g.parameter(x);
  g.backward(mul(xv, xv));
  EXPECT_EQ(x.grad.item(), 6.0);
}

TEST_F(F64, BackwardConstantLossGivesZeroGradients) {
  ParameterStore store;
  Parameter& x = store.add("x", Tensor::matrix(2, 2, 1.0));
  x.grad = Tensor::matrix(2, 2, 5.0);
  Graph g;
  g.parameter(x);
  Var c = g.constant(Tensor::scalar(4.0));
  g.backward(sum(c));
  for (double v : x.grad.data()) EXPECT_EQ(v, 0.0);
}

TEST_F(F64, BackwardResetsBetweenCalls) {
  ParameterStore store;
  Parameter& x = store.add("x", Tensor::scalar(2.0));
  Graph g;
  Var xv = g.parameter(x);
  Var loss = mul(xv, xv);
  g.backward(loss);
  g.backward(loss);
  EXPECT_EQ(x.grad.item(), 4.0);
}

TEST_F(F64, SharedParameterAccumulates) {
  ParameterStore store;
  Parameter& x = store.add("x", Tensor::scalar(2.0));
  Graph g;
  Var a = g.parameter(x);
  Var b = g.parameter(x);
  EXPECT_EQ(a.id, b.id);
  g.backward(add(scale(a, 3.0), mul(b, b)));
  EXPECT_EQ(x.grad.item(), 3.0 + 4.0);
}

TEST_F(F64, BackwardNeedsScalar) {
  Graph g;
  Var v = g.variable(Tensor::matrix(2, 2));
  EXPECT_THROW(g.backward(v), Error);
}

TEST_F(F64, GatherRowsGradientScatters) {
  ParameterStore store;
  Parameter& table = store.add("t", Tensor::from_rows({{1, 2}, {3, 4}, {5, 6}}));
  Graph g;
  const std::vector<std::size_t> ids{2, 0, 2};
  Var rows = gather_rows(g.parameter(table), ids);
  EXPECT_EQ(rows.value()(0, 1), 6.0);
  EXPECT_EQ(rows.value()(1, 0), 1.0);
  g.backward(sum(rows));
  EXPECT_EQ(table.grad(2, 0), 2.0);
  EXPECT_EQ(table.grad(0, 1), 1.0);
  EXPECT_EQ(table.grad(1, 0), 0.0);
}

TEST_F(F64, ConcatAndSlice) {
  Graph g;
  Var a = g.constant(Tensor::from_rows({{1, 2}}));
  Var b = g.constant(Tensor::from_rows({{3}}));
  Var c = concat_cols(a, b);
  EXPECT_EQ(c.value(), Tensor::from_rows({{1, 2, 3}}));
  EXPECT_EQ(slice_cols(c, 1, 3).value(), Tensor::from_rows({{2, 3}}));
  EXPECT_THROW(slice_cols(c, 2, 4), DimensionError);
}

TEST_F(F64, HingeAndRowDot) {
  Graph g;
  Var x = g.constant(Tensor::from_rows({{-1, 0, 2}}));
  EXPECT_EQ(hinge(x).value(), Tensor::from_rows({{0, 0, 2}}));
  Var a = g.constant(Tensor::from_rows({{1, 2}, {3, 4}}));
  EXPECT_EQ(row_dot(a, a).value(), Tensor::from_rows({{5}, {25}}));
  EXPECT_EQ(mean(a).item(), 2.5);
  EXPECT_EQ(add_row(a, g.constant(Tensor::from_rows({{1, -1}}))).value(), Tensor::from_rows({{2, 1}, {4, 3}}));
}
