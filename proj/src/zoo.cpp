#include "exactnn/zoo.hpp"

namespace exactnn::zoo {

namespace {

Rational draw(std::mt19937_64& rng, long max_num, long max_den) {
  std::uniform_int_distribution<long> num(-max_num, max_num);
  std::uniform_int_distribution<long> den(1, max_den);
  const long p = num(rng);
  return Rational(p) / Rational(den(rng));
}

Matrix<Rational> random_matrix(std::mt19937_64& rng, Index rows, Index cols, long max_num, long max_den) {
  Matrix<Rational>::DenseStorage m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = draw(rng, max_num, max_den);
  }
  return Matrix<Rational>(std::move(m));
}

}  // namespace

Network<Rational> toy_cnn(std::vector<std::vector<Matrix<Rational>>> filters, Matrix<Rational> fc_weights,
                          std::vector<Rational> conv_biases) {
  std::vector<Layer<Rational>> layers;
  layers.push_back(Convolution<Rational>{std::move(filters), std::move(conv_biases), Activation::Relu});
  layers.push_back(MaxPool{2, 2});
  layers.push_back(Flatten{});
  layers.push_back(FullyConnected<Rational>{std::move(fc_weights), Activation::Linear});
  return Network<Rational>(Shape::grid(9, 9, 1), std::move(layers));
}

Network<Rational> diagonal_toy_cnn() {
  auto m = [](std::vector<std::vector<Rational>> rows) { return Matrix<Rational>::from_rows(rows); };
  std::vector<std::vector<Matrix<Rational>>> filters{{m({{1, 0}, {0, 1}})}, {m({{0, 1}, {1, 0}})}};
  // Pooled channel 0 (falling diagonals) in rows 2..3 near the left edge and
  // channel 1 (rising diagonals) near the right edge vote happy.
  std::vector<std::vector<Rational>> fc(2, std::vector<Rational>(33, Rational(0)));
  for (Index ch = 0; ch < 2; ++ch) {
    for (Index r = 0; r < 4; ++r) {
      for (Index c = 0; c < 4; ++c) {
        const std::size_t col = static_cast<std::size_t>(1 + (ch * 4 + r) * 4 + c);
        const bool left_half = c < 2;
        if (r >= 2) {
          const bool smile_side = (ch == 0) == left_half;
          fc[0][col] = smile_side ? Rational(1) : Rational(-1);
          fc[1][col] = smile_side ? Rational(-1) : Rational(1);
        }
      }
    }
  }
  fc[1][0] = Rational(1, 2);
  return toy_cnn(std::move(filters), Matrix<Rational>::from_rows(fc));
}

Network<Rational> random_toy_cnn(std::mt19937_64& rng) {
  std::vector<std::vector<Matrix<Rational>>> filters;
  std::vector<Rational> biases;
  for (int f = 0; f < 2; ++f) {
    filters.push_back({random_matrix(rng, 2, 2, 4, 2)});
    biases.push_back(draw(rng, 2, 2));
  }
  return toy_cnn(std::move(filters), random_matrix(rng, 2, 33, 4, 4), std::move(biases));
}

Network<Rational> random_fnn(std::mt19937_64& rng, Index inputs, std::vector<Index> widths, long max_num,
                             long max_den) {
  std::vector<Layer<Rational>> layers;
  Index in = inputs;
  for (std::size_t l = 0; l < widths.size(); ++l) {
    const Activation act = l + 1 == widths.size() ? Activation::Linear : Activation::Relu;
    layers.push_back(FullyConnected<Rational>{random_matrix(rng, widths[l], in + 1, max_num, max_den), act});
    in = widths[l];
  }
  return Network<Rational>(Shape::vector(inputs), std::move(layers));
}

Network<Rational> acas_clamped_net() {
  using R = Rational;
  auto row = [](std::vector<R> r) { return r; };
  // h1 = relu(dist)
  Matrix<R> l1 = Matrix<R>::from_rows({row({R(0), R(1), R(0), R(0), R(0), R(0)})});
  // h2 = relu(1000 - h1)
  Matrix<R> l2 = Matrix<R>::from_rows({row({R(1000), R(-1)})});
  // out0 = 1000 - h2, others 0
  Matrix<R> l3 = Matrix<R>::from_rows(
      {row({R(1000), R(-1)}), row({R(0), R(0)}), row({R(0), R(0)}), row({R(0), R(0)}), row({R(0), R(0)})});
  std::vector<Layer<R>> layers{FullyConnected<R>{l1, Activation::Relu}, FullyConnected<R>{l2, Activation::Relu},
                               FullyConnected<R>{l3, Activation::Linear}};
  return Network<R>(Shape::vector(5), std::move(layers));
}

Network<Rational> acas_identity_net() {
  using R = Rational;
  std::vector<std::vector<R>> rows(5, std::vector<R>(6, R(0)));
  rows[0][1] = 1;
  std::vector<Layer<R>> layers{FullyConnected<R>{Matrix<R>::from_rows(rows), Activation::Linear}};
  return Network<R>(Shape::vector(5), std::move(layers));
}

}  // namespace exactnn::zoo
