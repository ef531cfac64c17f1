#include "exactnn/model_io.hpp"
#include "exactnn/dataset.hpp"
#include "exactnn/verifier.hpp"
#include "exactnn/zoo.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

namespace {

using namespace exactnn;
using M = Matrix<Rational>;
using R = Rational;

Vector<R> zeros(Index n) { return Vector<R>::Constant(n, R(0)); }

Vector<R> random_point(std::mt19937_64& rng, const Box& box, long steps = 16) {
  Vector<R> x(static_cast<Index>(box.size()));
  for (std::size_t i = 0; i < box.size(); ++i) {
    x(static_cast<Index>(i)) = box[i].lo + box[i].width() * R(static_cast<long>(rng() % (steps + 1)), steps);
  }
  return x;
}

// |x| on [-1, 1] as relu(x) + relu(-x); intervals alone give [0, 2].
Network<R> abs_net() {
  return Network<R>(Shape::vector(1), {FullyConnected<R>{M::from_rows({{0, 1}, {0, -1}}), Activation::Relu},
                                       FullyConnected<R>{M::from_rows({{0, 1, 1}}), Activation::Linear}});
}

ReachSpec single_output_spec(Box box, Comparator c, R threshold) {
  ReachSpec s;
  s.name = "t";
  s.input_box = std::move(box);
  s.output = LinearPredicate{{R(1)}, c, threshold};
  return s;
}

// Random small FNN reach instance; the threshold is drawn near a sampled
// output so that both verdicts occur.
ReachSpec random_reach_spec(std::mt19937_64& rng, const Network<R>& net) {
  std::vector<Interval> b;
  for (Index i = 0; i < net.input_shape().size(); ++i) {
    const long lo = static_cast<long>(rng() % 5) - 3;
    b.push_back({R(lo, 2), R(lo + 1 + static_cast<long>(rng() % 3), 2)});
  }
  ReachSpec s;
  s.input_box = Box(b);
  for (Index o = 0; o < net.output_size(); ++o) s.output.coefficients.push_back(R(static_cast<long>(rng() % 5) - 2));
  if (std::all_of(s.output.coefficients.begin(), s.output.coefficients.end(), [](const R& c) { return c == 0; })) {
    s.output.coefficients[0] = 1;
  }
  s.output.comparator = static_cast<Comparator>(rng() % 4);
  const Vector<R> y = run(net, random_point(rng, s.input_box));
  s.output.threshold = s.output.lhs(y) + R(static_cast<long>(rng() % 9) - 4, 2);
  return s;
}

Network<R> small_fnn(std::mt19937_64& rng) {
  static const std::vector<std::vector<Index>> shapes{{3, 1}, {2, 2, 2}, {4, 2, 1}, {3, 3, 2}, {6, 1}, {2, 3, 1}};
  const auto& w = shapes[rng() % shapes.size()];
  return zoo::random_fnn(rng, 1 + static_cast<Index>(rng() % 3), w);
}

TEST(Ball, Counts) {
  EXPECT_EQ(enumerate_ball(zeros(81), 0).size(), 1u);
  EXPECT_EQ(enumerate_ball(zeros(81), 1).size(), 82u);
  EXPECT_EQ(enumerate_ball(zeros(4), 2).size(), 11u);
  EXPECT_EQ(enumerate_ball(zeros(4), 9).size(), 16u);
}

TEST(Ball, OrderAndUniqueness) {
  Vector<R> c(5);
  c << 1, 0, 1, 1, 0;
  const auto ball = enumerate_ball(c, 2);
  ASSERT_EQ(ball.size(), 16u);
  EXPECT_EQ(ball[0], c);
  std::set<std::vector<int>> seen;
  for (std::size_t k = 0; k < ball.size(); ++k) {
    std::vector<int> bits;
    for (Index i = 0; i < 5; ++i) bits.push_back(ball[k](i) == 1);
    seen.insert(bits);
    EXPECT_LE(norm_dist(ball[k], c, Norm::L0), 2);
    if (k >= 1 && k <= 5) {
      EXPECT_EQ(norm_dist(ball[k], c, Norm::L0), 1);
      EXPECT_NE(ball[k](static_cast<Index>(k - 1)), c(static_cast<Index>(k - 1)));
    }
  }
  EXPECT_EQ(seen.size(), 16u);
  Vector<R> bad(2);
  bad << R(1, 2), 0;
  EXPECT_THROW(enumerate_ball(bad, 1), std::invalid_argument);
}

TEST(Reach, AllZeroNetProvedWithoutSplits) {
  const Network<R> net(Shape::vector(2), {FullyConnected<R>{M::zeros(3, 3), Activation::Relu},
                                          FullyConnected<R>{M::zeros(1, 4), Activation::Linear}});
  const Verdict v = verify_reach_bab(net, single_output_spec(Box({{-5, 5}, {-5, 5}}), Comparator::Le, 1500));
  EXPECT_EQ(v.status, Status::Proved);
  EXPECT_EQ(v.stats.splits, 0u);
  EXPECT_FALSE(v.witness);
}

TEST(Reach, IdentityNetRefuted) {
  const Network<R> net(Shape::vector(1), {FullyConnected<R>{M::from_rows({{0, 1}}), Activation::Linear}});
  const Verdict v = verify_reach_bab(net, single_output_spec(Box({{0, 2000}}), Comparator::Le, 1500));
  ASSERT_EQ(v.status, Status::Refuted);
  ASSERT_TRUE(v.witness);
  EXPECT_GT((*v.witness)(0), 1500);
  EXPECT_LE((*v.witness)(0), 2000);
}

TEST(Reach, SplitsWhenIntervalsAreLoose) {
  const Network<R> net = abs_net();
  const Verdict proved = verify_reach_bab(net, single_output_spec(Box({{-1, 1}}), Comparator::Le, 1));
  EXPECT_EQ(proved.status, Status::Proved);
  EXPECT_GE(proved.stats.splits, 1u);
  const Verdict refuted = verify_reach_bab(net, single_output_spec(Box({{-1, 1}}), Comparator::Lt, 1));
  ASSERT_EQ(refuted.status, Status::Refuted);
  EXPECT_EQ(abs_value(R((*refuted.witness)(0))), 1);

  SearchOptions shallow;
  shallow.max_depth = 0;
  EXPECT_EQ(verify_reach_bab(net, single_output_spec(Box({{-1, 1}}), Comparator::Le, 1), shallow).status,
            Status::Timeout);
  SearchOptions expired;
  expired.timeout_ms = 0;
  EXPECT_EQ(verify_reach_bab(net, single_output_spec(Box({{-1, 1}}), Comparator::Le, 1), expired).status,
            Status::Timeout);
}

TEST(Reach, RejectsMismatchedSpecs) {
  const Network<R> net = abs_net();
  ReachSpec s = single_output_spec(Box({{-1, 1}, {0, 1}}), Comparator::Le, 1);
  EXPECT_THROW(verify_reach_bab(net, s), DimensionError);
  s = single_output_spec(Box({{-1, 1}}), Comparator::Le, 1);
  s.output.coefficients = {1, 1};
  EXPECT_THROW(verify_reach_bab(net, s), DimensionError);
}

TEST(Reach, AgreesWithPhasePatternOracle) {
  std::mt19937_64 rng(11);
  int proved = 0, refuted = 0;
  for (int t = 0; t < 60; ++t) {
    const Network<R> net = small_fnn(rng);
    const ReachSpec spec = random_reach_spec(rng, net);
    const bool holds = oracle::reach_holds_by_patterns(net, spec);
    const Verdict v = verify_reach_bab(net, spec);
    ASSERT_NE(v.status, Status::Timeout);
    EXPECT_EQ(v.status == Status::Proved, holds) << "instance " << t;
    if (v.status == Status::Refuted) {
      ASSERT_TRUE(v.witness);
      EXPECT_TRUE(spec.input_box.contains(*v.witness));
      EXPECT_FALSE(spec.output.holds(run(net, *v.witness)));
      ++refuted;
    } else {
      ++proved;
    }
  }
  EXPECT_GT(proved, 5);
  EXPECT_GT(refuted, 5);
}

TEST(Reach, ProvedVerdictsSurviveAMillionSamples) {
  std::mt19937_64 rng(12);
  std::vector<std::pair<Network<R>, ReachSpec>> proved;
  while (proved.size() < 10) {
    const Network<R> net = small_fnn(rng);
    const ReachSpec spec = random_reach_spec(rng, net);
    if (verify_reach_bab(net, spec).status == Status::Proved) proved.emplace_back(net, spec);
  }
  std::size_t samples = 0;
  for (const auto& [net, spec] : proved) {
    for (int s = 0; s < 100000; ++s, ++samples) {
      const Vector<R> x = random_point(rng, spec.input_box, 64);
      const auto y = oracle::fc_run(net, std::vector<R>(x.data(), x.data() + x.size()));
      Vector<R> yv(static_cast<Index>(y.size()));
      for (std::size_t i = 0; i < y.size(); ++i) yv(static_cast<Index>(i)) = y[i];
      ASSERT_TRUE(spec.output.holds(yv));
    }
  }
  EXPECT_EQ(samples, 1000000u);
}

TEST(Reach, DeterministicAndWorkerIndependent) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    const Network<R> net = zoo::random_fnn(rng, 3, {5, 5, 2});
    const ReachSpec spec = random_reach_spec(rng, net);
    const Verdict a = verify_reach_bab(net, spec);
    const Verdict b = verify_reach_bab(net, spec);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.witness, b.witness);
    SearchStats sa = a.stats, sb = b.stats;
    sa.elapsed_ms = sb.elapsed_ms = 0;
    EXPECT_EQ(sa, sb);
    EXPECT_EQ(verdict_to_json(a, true).dump(), verdict_to_json(b, true).dump());
    SearchOptions parallel;
    parallel.workers = 3;
    const Verdict p = verify_reach_bab(net, spec, parallel);
    EXPECT_EQ(p.status, a.status);
    if (p.witness) EXPECT_FALSE(spec.output.holds(run(net, *p.witness)));
  }
}

TEST(Reach, IntegerNetworks) {
  const Network<Integer> net(Shape::vector(1),
                             {FullyConnected<Integer>{Matrix<Integer>::from_rows({{0, 2}}), Activation::Linear}});
  const Verdict v = verify_reach_bab(net, single_output_spec(Box({{0, 10}}), Comparator::Le, 3));
  ASSERT_EQ(v.status, Status::Refuted);
  EXPECT_GT(2 * (*v.witness)(0), 3);
}

TEST(Reach, Phi1OnHandBuiltNets) {
  const ReachSpec phi1 = acas_phi1();
  const Verdict clamped = verify_reach_bab(zoo::acas_clamped_net(), phi1);
  EXPECT_EQ(clamped.status, Status::Proved);
  const Verdict identity = verify_reach_bab(zoo::acas_identity_net(), phi1);
  ASSERT_EQ(identity.status, Status::Refuted);
  EXPECT_GT((*identity.witness)(0), 1500);
}

TEST(Robustness, ConstantNetworkIsStable) {
  const Network<R> net(Shape::vector(4), {FullyConnected<R>{M::from_rows({{1, 0, 0, 0, 0}, {2, 0, 0, 0, 0}}),
                                                            Activation::Linear}});
  RobustnessSpec sr;
  sr.variant = RobustnessVariant::SR;
  sr.epsilon = 2;
  sr.delta = 0;
  sr.constraint = InputConstraint::Binary;
  EXPECT_EQ(verify_robustness_brute(net, zeros(4), sr).status, Status::Proved);
  EXPECT_EQ(verify_robustness_bab(net, zeros(4), sr).status, Status::Proved);
  RobustnessSpec linf = sr;
  linf.norm = Norm::Linf;
  linf.constraint = InputConstraint::None;
  linf.epsilon = R(1, 2);
  EXPECT_EQ(verify_robustness_bab(net, zeros(4), linf).status, Status::Proved);
  linf.epsilon = 0;
  EXPECT_EQ(verify_robustness_bab(net, zeros(4), linf).status, Status::Proved);
}

TEST(Robustness, MisclassifiedCenterIsItsOwnWitness) {
  const Network<R> net(Shape::vector(2), {FullyConnected<R>{M::from_rows({{1, 0, 0}, {0, 0, 0}}), Activation::Linear}});
  RobustnessSpec cr;
  cr.variant = RobustnessVariant::CR;
  cr.epsilon = 1;
  cr.target_class = 1;
  cr.constraint = InputConstraint::Binary;
  for (const Verdict& v : {verify_robustness_brute(net, zeros(2), cr), verify_robustness_bab(net, zeros(2), cr)}) {
    ASSERT_EQ(v.status, Status::Refuted);
    EXPECT_EQ(*v.witness, zeros(2));
  }
}

TEST(Robustness, UnsupportedQueries) {
  const Network<R> net = abs_net();
  RobustnessSpec s;
  s.variant = RobustnessVariant::SR;
  s.epsilon = 1;
  s.norm = Norm::Linf;
  s.constraint = InputConstraint::Binary;
  EXPECT_THROW(verify_robustness_bab(net, zeros(1), s), UnsupportedQuery);
  EXPECT_THROW(verify_robustness_brute(net, zeros(1), s), UnsupportedQuery);
  s.norm = Norm::L0;
  s.constraint = InputConstraint::None;
  EXPECT_THROW(verify_robustness_bab(net, zeros(1), s), UnsupportedQuery);
}

TEST(Robustness, LinfMatchesDenseSampling) {
  // y = |x| on [-e, e] around 0; SR with delta d holds iff e <= d.
  const Network<R> net = abs_net();
  RobustnessSpec s;
  s.variant = RobustnessVariant::SR;
  s.norm = Norm::Linf;
  s.epsilon = R(1, 2);
  s.delta = R(1, 2);
  EXPECT_EQ(verify_robustness_bab(net, zeros(1), s).status, Status::Proved);
  s.delta = R(1, 3);
  const Verdict v = verify_robustness_bab(net, zeros(1), s);
  ASSERT_EQ(v.status, Status::Refuted);
  EXPECT_GT(abs_value(R((*v.witness)(0))), R(1, 3));
  EXPECT_FALSE(eval_robustness(net, zeros(1), s, *v.witness));

  s.domain = Interval{0, R(1, 4)};
  EXPECT_EQ(verify_robustness_bab(net, zeros(1), s).status, Status::Proved) << "domain clips the box";
}

TEST(Robustness, LinfLipschitz) {
  // y = 3x: LR with L holds iff L >= 3.
  const Network<R> net(Shape::vector(1), {FullyConnected<R>{M::from_rows({{0, 3}}), Activation::Linear}});
  RobustnessSpec s;
  s.variant = RobustnessVariant::LR;
  s.norm = Norm::Linf;
  s.epsilon = 1;
  s.lipschitz = 3;
  EXPECT_EQ(verify_robustness_bab(net, zeros(1), s).status, Status::Proved);
  s.lipschitz = R(29, 10);
  const Verdict v = verify_robustness_bab(net, zeros(1), s);
  ASSERT_EQ(v.status, Status::Refuted);
  EXPECT_FALSE(eval_robustness(net, zeros(1), s, *v.witness));
}

TEST(Robustness, BruteAndBabAgreeOnRandomToyNets) {
  std::mt19937_64 rng(14);
  const auto images = dataset::generate(1, 4).images;
  std::size_t refuted = 0;
  for (int t = 0; t < 3; ++t) {
    const Network<Integer> net = quantize(zoo::random_toy_cnn(rng), {3});
    for (const auto& img : images) {
      const Vector<R> x = img.as_input();
      for (auto variant : {RobustnessVariant::CR, RobustnessVariant::SR, RobustnessVariant::LR, RobustnessVariant::ACR}) {
        RobustnessSpec s;
        s.variant = variant;
        s.epsilon = 1;
        s.delta = 1;
        s.lipschitz = 2;
        s.eta = 1;
        s.constraint = InputConstraint::Binary;
        s.target_class = argmax(run(net, from_rational_vector<Integer>(x)));
        const Verdict brute = verify_robustness_brute(net, x, s);
        const Verdict bab = verify_robustness_bab(net, x, s);
        ASSERT_EQ(brute.status, bab.status) << variant_name(variant);
        if (bab.status == Status::Refuted) {
          ++refuted;
          EXPECT_FALSE(eval_robustness(net, x, s, *bab.witness));
          EXPECT_FALSE(eval_robustness(net, x, s, *brute.witness));
        }
      }
    }
  }
  EXPECT_GT(refuted, 0u);
}

TEST(Robustness, VerdictJson) {
  Verdict v;
  v.status = Status::Refuted;
  Vector<R> w(2);
  w << R(1, 2), 3;
  v.witness = w;
  v.stats.nodes_explored = 4;
  v.stats.elapsed_ms = 17;
  const Json j = verdict_to_json(v, true);
  EXPECT_EQ(j["status"], "refuted");
  EXPECT_EQ(j["witness"][0], "0.5");
  EXPECT_EQ(j["stats"]["nodes_explored"], 4);
  EXPECT_EQ(j["stats"]["elapsed_ms"], 0);
  EXPECT_TRUE(j["stats"].contains("splits"));
  EXPECT_TRUE(j["stats"].contains("max_depth"));
  EXPECT_EQ(verdict_to_json(v)["stats"]["elapsed_ms"], 17);
}

}  // namespace
