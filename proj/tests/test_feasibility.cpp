#include "exactnn/feasibility.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace exactnn;
using R = Rational;

std::vector<oracle::Ineq> to_oracle(const FeasibilityProblem& p) {
  const std::size_t n = p.bounds.size();
  std::vector<oracle::Ineq> rows;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<R> e(n, R(0));
    e[i] = 1;
    oracle::add_row(rows, e, 0, Comparator::Ge, p.bounds[i].lo);
    oracle::add_row(rows, e, 0, Comparator::Le, p.bounds[i].hi);
  }
  for (const auto& c : p.constraints) {
    std::vector<R> a(n, R(0));
    for (const auto& [j, v] : c.terms) a[static_cast<std::size_t>(j)] += v;
    oracle::add_row(rows, a, 0, c.comparator, c.rhs);
  }
  return rows;
}

void expect_witness(const FeasibilityProblem& p, const FeasibilityResult& r) {
  ASSERT_EQ(r.point.size(), static_cast<Index>(p.bounds.size()));
  for (std::size_t i = 0; i < p.bounds.size(); ++i) EXPECT_TRUE(p.bounds[i].contains(r.point(static_cast<Index>(i))));
  for (const auto& c : p.constraints) EXPECT_TRUE(c.holds(r.point));
}

TEST(Feasibility, SimpleCases) {
  FeasibilityProblem p{{{0, 1}, {0, 1}}, {}};
  p.constraints.push_back({{{0, 1}, {1, 1}}, Comparator::Ge, R(3, 2)});
  auto r = check_feasibility(p);
  ASSERT_TRUE(r.feasible);
  expect_witness(p, r);

  p.constraints.push_back({{{0, 1}, {1, 1}}, Comparator::Gt, 2});
  EXPECT_FALSE(check_feasibility(p).feasible);
}

TEST(Feasibility, StrictInequalityOnTheBoundary) {
  // x in [0,1], x > 1 is empty; x >= 1 is the single point 1.
  FeasibilityProblem strict{{{0, 1}}, {{{{0, 1}}, Comparator::Gt, 1}}};
  EXPECT_FALSE(check_feasibility(strict).feasible);
  FeasibilityProblem closed{{{0, 1}}, {{{{0, 1}}, Comparator::Ge, 1}}};
  auto r = check_feasibility(closed);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.point(0), 1);
  // x < y, y < x + 1/1000 has a thin but open gap.
  FeasibilityProblem thin{{{0, 1}, {0, 1}},
                          {{{{0, 1}, {1, -1}}, Comparator::Lt, 0}, {{{1, 1}, {0, -1}}, Comparator::Lt, R(1, 1000)}}};
  r = check_feasibility(thin);
  ASSERT_TRUE(r.feasible);
  expect_witness(thin, r);
}

TEST(Feasibility, ConstantConstraints) {
  FeasibilityProblem p{{{0, 1}}, {{{}, Comparator::Le, -1}}};
  EXPECT_FALSE(check_feasibility(p).feasible);
  p.constraints = {{{}, Comparator::Lt, 0}};
  EXPECT_FALSE(check_feasibility(p).feasible);
  p.constraints = {{{}, Comparator::Le, 0}};
  EXPECT_TRUE(check_feasibility(p).feasible);
}

TEST(Feasibility, DegenerateBounds) {
  FeasibilityProblem p{{{R(1, 3), R(1, 3)}, {-2, 5}}, {{{{0, 3}, {1, 1}}, Comparator::Ge, R(9, 2)}}};
  auto r = check_feasibility(p);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.point(0), R(1, 3));
  expect_witness(p, r);
}

TEST(Feasibility, AgreesWithFourierMotzkin) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> coeff(-4, 4), bnd(-3, 3), cmp(0, 3), nvars(1, 4), ncons(1, 6);
  int feasible = 0, infeasible = 0;
  for (int t = 0; t < 400; ++t) {
    FeasibilityProblem p;
    const long n = nvars(rng);
    for (long i = 0; i < n; ++i) {
      long a = bnd(rng), b = bnd(rng);
      if (a > b) std::swap(a, b);
      p.bounds.push_back({R(a), R(b)});
    }
    const long k = ncons(rng);
    for (long c = 0; c < k; ++c) {
      LinearConstraint lc;
      for (long i = 0; i < n; ++i) {
        const long v = coeff(rng);
        if (v != 0) lc.terms.push_back({i, R(v, 1 + static_cast<long>(rng() % 2))});
      }
      lc.comparator = static_cast<Comparator>(cmp(rng));
      lc.rhs = R(coeff(rng), 1 + static_cast<long>(rng() % 3));
      p.constraints.push_back(std::move(lc));
    }
    const bool expected = oracle::fm_feasible(to_oracle(p), static_cast<std::size_t>(n));
    const auto r = check_feasibility(p);
    ASSERT_EQ(r.feasible, expected) << "instance " << t;
    if (r.feasible) {
      expect_witness(p, r);
      ++feasible;
    } else {
      ++infeasible;
    }
  }
  EXPECT_GT(feasible, 50);
  EXPECT_GT(infeasible, 50);
}

}  // namespace
