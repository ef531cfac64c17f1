#ifndef EXACTNN_ZOO_HPP
#define EXACTNN_ZOO_HPP

#include "exactnn/layers.hpp"

#include <random>

namespace exactnn::zoo {

/// 9x9x1 -> conv(2 filters 2x2, relu) -> 8x8x2 -> maxpool 2x2 -> 4x4x2
/// -> flatten 32 -> fc(2, linear).
Network<Rational> toy_cnn(std::vector<std::vector<Matrix<Rational>>> filters, Matrix<Rational> fc_weights,
                          std::vector<Rational> conv_biases = {});

/// The toy architecture with the diagonal filters [[1,0],[0,1]] and
/// [[0,1],[1,0]] and an fc layer scoring happy (output 0) against sad.
Network<Rational> diagonal_toy_cnn();

/// Toy architecture with random small rational weights.
Network<Rational> random_toy_cnn(std::mt19937_64& rng);

/// Random fully connected ReLU network with a linear last layer.
Network<Rational> random_fnn(std::mt19937_64& rng, Index inputs, std::vector<Index> widths,
                             long max_num = 4, long max_den = 2);

/// 5 inputs -> h1 = relu(dist), h2 = relu(1000 - h1), out0 = 1000 - h2,
/// outputs 1..4 zero. out0 = min(dist, 1000) for dist >= 0.
Network<Rational> acas_clamped_net();

/// 5 inputs -> out0 = dist, outputs 1..4 zero; single linear layer.
Network<Rational> acas_identity_net();

}  // namespace exactnn::zoo

#endif
