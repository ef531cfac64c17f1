#include "exactnn/matrix.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace exactnn;
using M = Matrix<Rational>;

M random_matrix(std::mt19937_64& rng, Index rows, Index cols, double zero_fraction = 0.5) {
  return M::from_rows(oracle::random_grid(rng, static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), 5, 3,
                                          zero_fraction));
}

TEST(Scalar, ParsesDecimalLiteralsExactly) {
  EXPECT_EQ(parse_rational("0.05374"), Rational(2687, 50000));
  EXPECT_EQ(parse_rational("-0.05374"), Rational(-2687, 50000));
  EXPECT_EQ(parse_rational("12"), Rational(12));
  EXPECT_EQ(parse_rational("3/4"), Rational(3, 4));
  EXPECT_EQ(parse_rational("-6/8"), Rational(-3, 4));
  EXPECT_EQ(parse_rational("1.5e-3"), Rational(3, 2000));
  EXPECT_EQ(parse_rational("2.5E2"), Rational(250));
  EXPECT_EQ(parse_rational("+.5"), Rational(1, 2));
}

TEST(Scalar, ParsesSeventeenDigitExponentLiterals) {
  // 17 significant digits as a double-to-text exporter writes them.
  EXPECT_EQ(parse_rational("5.3740000000000001e-02"), Rational(53740000000000001LL, 1000000000000000000LL));
  EXPECT_EQ(parse_rational("-1.0000000000000000e+00"), Rational(-1));
}

TEST(Scalar, RejectsMalformedLiterals) {
  for (const char* bad : {"", "abc", "1.2.3", "1/0", "1e", "--1", "0x10", "1 2", "nan", "inf"}) {
    EXPECT_THROW(parse_rational(bad), ParseError) << bad;
  }
}

TEST(Scalar, IntegerParsing) {
  EXPECT_EQ(parse_integer("-42"), Integer(-42));
  EXPECT_EQ(parse_integer("4.0"), Integer(4));
  EXPECT_THROW(parse_integer("4.5"), ParseError);
}

TEST(Scalar, DecimalStringRoundTrip) {
  EXPECT_EQ(to_decimal_string(Rational(2687, 50000)), "0.05374");
  EXPECT_EQ(to_decimal_string(Rational(-1, 2)), "-0.5");
  EXPECT_EQ(to_decimal_string(Rational(7)), "7");
  EXPECT_EQ(to_decimal_string(Rational(1, 3)), "1/3");
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> num(-100000, 100000), den(1, 1000);
  for (int i = 0; i < 500; ++i) {
    const Rational r(Rational(num(rng)) / Rational(den(rng)));
    EXPECT_EQ(parse_rational(to_decimal_string(r)), r);
  }
}

TEST(Scalar, RoundHalfAwayFromZero) {
  EXPECT_EQ(round_half_away_from_zero(Rational(1, 2)), Integer(1));
  EXPECT_EQ(round_half_away_from_zero(Rational(-1, 2)), Integer(-1));
  EXPECT_EQ(round_half_away_from_zero(Rational(5, 2)), Integer(3));
  EXPECT_EQ(round_half_away_from_zero(Rational(7, 3)), Integer(2));
  EXPECT_EQ(round_half_away_from_zero(Rational(-7, 3)), Integer(-2));
  EXPECT_EQ(round_half_away_from_zero(Rational(0)), Integer(0));
}

TEST(Matrix, DotProduct) {
  EXPECT_EQ(dot_product(std::vector<Rational>{0, 0, 0}, std::vector<Rational>{5, 7, 9}), 0);
  EXPECT_EQ(dot_product(std::vector<Rational>{1, 2}, std::vector<Rational>{3, 4}), 11);
  try {
    dot_product(std::vector<Rational>{1, 2}, std::vector<Rational>{3, 4, 5});
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_EQ(e.operation(), "dot_product");
    EXPECT_EQ(e.actual_cols(), 3);
  }
}

TEST(Matrix, DotProductIsBilinear) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    auto a = oracle::random_grid(rng, 1, 7)[0];
    auto b = oracle::random_grid(rng, 1, 7)[0];
    const Rational alpha = oracle::random_grid(rng, 1, 1, 9, 7)[0][0];
    std::vector<Rational> scaled = a;
    for (auto& v : scaled) v *= alpha;
    EXPECT_EQ(dot_product(scaled, b), alpha * dot_product(a, b));
  }
}

TEST(Matrix, SubMatrix) {
  const M m = M::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  EXPECT_EQ(sub_matrix(m, {0, 0}, {3, 3}), m);
  EXPECT_EQ(sub_matrix(m, {1, 1}, {2, 2}), M::from_rows({{5, 6}, {8, 9}}));
  EXPECT_THROW(sub_matrix(M::from_rows({{1, 2}, {3, 4}}), {1, 1}, {2, 2}), DimensionError);
}

TEST(Matrix, Map2) {
  const M a = M::from_rows({{1, 2}, {3, 4}});
  const M ones = M::from_rows({{1, 1}, {1, 1}});
  EXPECT_EQ(map2([](const Rational& x, const Rational& y) { return x * y; }, a, ones), a);
  EXPECT_EQ(map2([](const Rational& x, const Rational& y) { return x + y; }, M::from_rows({{1, 2}}),
                 M::from_rows({{3, 4}})),
            M::from_rows({{4, 6}}));
  EXPECT_THROW(map2([](const Rational& x, const Rational& y) { return x + y; }, M::zeros(2, 2), M::zeros(2, 3)),
               DimensionError);
}

TEST(Matrix, Conversion) {
  const M sparse = convert(M::zeros(2, 2), Representation::SparseMap);
  EXPECT_EQ(sparse.representation(), Representation::SparseMap);
  EXPECT_TRUE(sparse.sparse().empty());
  EXPECT_EQ(sparse.rows(), 2);
  EXPECT_EQ(sparse.cols(), 2);

  const M one(1, 2, {{{0, 1}, Rational(5)}});
  const M dense = convert(one, Representation::Dense);
  EXPECT_TRUE(dense.is_dense());
  EXPECT_EQ(dense.at(0, 0), 0);
  EXPECT_EQ(dense.at(0, 1), 5);

  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const M m = random_matrix(rng, 8, 8);
    const M back = convert(convert(m, Representation::SparseMap), Representation::Dense);
    EXPECT_TRUE(back.is_dense());
    EXPECT_EQ(back.dense(), m.dense());
  }
}

TEST(Matrix, OutOfBoundsReads) {
  const M dense = M::from_rows({{1, 2}});
  EXPECT_THROW(dense.at(1, 0), DimensionError);
  const M sparse = convert(dense, Representation::SparseMap);
  EXPECT_EQ(sparse.at(5, 5), 0);
  EXPECT_THROW(M(1, 1, {{{1, 0}, Rational(1)}}), DimensionError);
}

TEST(Matrix, RepresentationEquivalence) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<Index> dim(1, 16);
  for (int t = 0; t < 100; ++t) {
    const Index r = dim(rng), c = dim(rng);
    const M a = random_matrix(rng, r, c);
    const M b = random_matrix(rng, r, c);
    const M as = convert(a, Representation::SparseMap);
    const M bs = convert(b, Representation::SparseMap);
    auto add = [](const Rational& x, const Rational& y) { return x + y; };
    EXPECT_EQ(map2(add, a, b), map2(add, as, bs));
    EXPECT_EQ(frobenius_dot(a, b), frobenius_dot(as, bs));
    EXPECT_EQ(max_element(a), max_element(as));
    EXPECT_EQ(a.nonzeros(), as.nonzeros());
    std::uniform_int_distribution<Index> ri(0, r - 1), ci(0, c - 1);
    const Index oi = ri(rng), oj = ci(rng);
    std::uniform_int_distribution<Index> hr(1, r - oi), wc(1, c - oj);
    const std::pair<Index, Index> size{hr(rng), wc(rng)};
    EXPECT_EQ(sub_matrix(a, {oi, oj}, size), sub_matrix(as, {oi, oj}, size));
    // Sparse windows past the bounds read the default 0; dense ones are an error.
    const M past = sub_matrix(as, {oi, oj}, {r + 1, 1});
    for (Index i = 0; i <= r; ++i) EXPECT_EQ(past.at(i, 0), oi + i < r ? a.at(oi + i, oj) : Rational(0));
    EXPECT_THROW(sub_matrix(a, {oi, oj}, {r + 1, 1}), DimensionError);
    const M mismatched = M::zeros(r + 1, c);
    EXPECT_THROW(map2(add, as, mismatched), DimensionError);
  }
}

TEST(Matrix, ExactArithmeticIdentities) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 200; ++t) {
    const auto v = oracle::random_grid(rng, 1, 3, 1000, 997)[0];
    EXPECT_EQ((v[0] + v[1]) + v[2], v[0] + (v[1] + v[2]));
    EXPECT_EQ(v[0] * (v[1] + v[2]), v[0] * v[1] + v[0] * v[2]);
  }
}

}  // namespace
