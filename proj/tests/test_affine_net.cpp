#include "exactnn/affine_net.hpp"
#include "exactnn/model_io.hpp"
#include "exactnn/zoo.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace exactnn;
using M = Matrix<Rational>;
using R = Rational;

Vector<R> random_point(std::mt19937_64& rng, const Box& box) {
  Vector<R> x(static_cast<Index>(box.size()));
  for (std::size_t i = 0; i < box.size(); ++i) {
    const long steps = 16;
    const long k = static_cast<long>(rng() % (steps + 1));
    x(static_cast<Index>(i)) = box[i].lo + box[i].width() * R(k, steps);
  }
  return x;
}

TEST(AffineNet, LoweringMatchesRun) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const Network<R> cnn = zoo::random_toy_cnn(rng);
    const AffineNet lowered = lower_network(cnn);
    EXPECT_EQ(lowered.input_size(), 81);
    EXPECT_EQ(lowered.output_size(), 2);
    for (int s = 0; s < 5; ++s) {
      Vector<R> x(81);
      for (Index i = 0; i < 81; ++i) x(i) = R(static_cast<long>(rng() % 2));
      EXPECT_EQ(evaluate(lowered, x), run(cnn, x));
    }
    const Network<Integer> q = quantize(cnn, {3});
    const AffineNet lq = lower_network(q);
    Vector<Integer> xi(81);
    for (Index i = 0; i < 81; ++i) xi(i) = Integer(static_cast<long>(rng() % 2));
    EXPECT_EQ(evaluate(lq, Vector<R>(xi.cast<R>())), Vector<R>(run(q, xi).cast<R>()));
  }
  for (int t = 0; t < 20; ++t) {
    const Network<R> fnn = zoo::random_fnn(rng, 3, {4, 4, 2});
    const AffineNet lowered = lower_network(fnn);
    EXPECT_EQ(lowered.relu_count(), 8u);
    for (int s = 0; s < 10; ++s) {
      const Vector<R> x = random_point(rng, Box({{-2, 2}, {-2, 2}, {-2, 2}}));
      const auto expected = oracle::fc_run(fnn, {x(0), x(1), x(2)});
      const Vector<R> got = evaluate(lowered, x);
      EXPECT_EQ(got(0), expected[0]);
      EXPECT_EQ(got(1), expected[1]);
    }
  }
}

TEST(AffineNet, IntervalExamples) {
  const Network<R> id(Shape::vector(1), {FullyConnected<R>{M::from_rows({{0, 1}}), Activation::Relu}});
  const Box out = interval_propagate(id, Box({{-1, 1}}));
  EXPECT_EQ(out[0], (Interval{0, 1}));

  std::mt19937_64 rng(2);
  const Network<R> fnn = zoo::random_fnn(rng, 3, {5, 2});
  const Vector<R> x = random_point(rng, Box({{-1, 1}, {-1, 1}, {-1, 1}}));
  const Box point = interval_propagate(fnn, Box::point(x));
  const Vector<R> y = run(fnn, x);
  for (Index o = 0; o < y.size(); ++o) {
    EXPECT_TRUE(point[static_cast<std::size_t>(o)].degenerate());
    EXPECT_EQ(point[static_cast<std::size_t>(o)].lo, y(o));
  }
}

TEST(AffineNet, IntervalBoundsContainSampledOutputs) {
  std::mt19937_64 rng(3);
  std::size_t samples = 0;
  for (int t = 0; t < 20; ++t) {
    const Network<R> net = zoo::random_fnn(rng, 3, {4, 3, 2});
    const Box box({{-1, R(1, 2)}, {0, 2}, {R(-3, 2), 1}});
    const Box out = interval_propagate(net, box);
    for (int s = 0; s < 250; ++s, ++samples) {
      const Vector<R> y = run(net, random_point(rng, box));
      for (Index o = 0; o < y.size(); ++o) EXPECT_TRUE(out[static_cast<std::size_t>(o)].contains(y(o)));
    }
  }
  for (int t = 0; t < 5; ++t) {
    const Network<R> cnn = zoo::random_toy_cnn(rng);
    std::vector<Interval> b(81, Interval{0, 1});
    const Box out = interval_propagate(cnn, Box(b));
    for (int s = 0; s < 1000; ++s, ++samples) {
      Vector<R> x(81);
      for (Index i = 0; i < 81; ++i) x(i) = R(static_cast<long>(rng() % 3), 2);
      const Vector<R> y = run(cnn, x);
      for (Index o = 0; o < y.size(); ++o) EXPECT_TRUE(out[static_cast<std::size_t>(o)].contains(y(o)));
    }
  }
  EXPECT_EQ(samples, 10000u);
}

TEST(AffineNet, PhaseConstrainedBounds) {
  // h = relu(x - 1/2), out = h, x in [0, 1].
  const Network<R> net(Shape::vector(1), {FullyConnected<R>{M::from_rows({{R(-1, 2), 1}}), Activation::Relu},
                                          FullyConnected<R>{M::from_rows({{0, 1}}), Activation::Linear}});
  const AffineNet a = lower_network(net);
  ASSERT_EQ(a.relu_count(), 1u);
  const Box box({{0, 1}});
  PhaseAssignment inactive{Phase::Inactive};
  auto r = propagate_bounds(a, box, &inactive);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.output[0], (Interval{0, 0}));
  PhaseAssignment active{Phase::Active};
  r = propagate_bounds(a, box, &active);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.output[0], (Interval{0, R(1, 2)}));

  const Box high({{R(3, 4), 1}});
  EXPECT_FALSE(propagate_bounds(a, high, &inactive).feasible);
  const Box low({{0, R(1, 4)}});
  EXPECT_FALSE(propagate_bounds(a, low, &active).feasible);
}

}  // namespace
