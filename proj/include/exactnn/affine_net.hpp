#ifndef EXACTNN_AFFINE_NET_HPP
#define EXACTNN_AFFINE_NET_HPP

#include "exactnn/box.hpp"
#include "exactnn/layers.hpp"

#include <cstdint>
#include <vector>

namespace exactnn {

/// One neuron: activation(bias + Σ weight·previous[source]).
struct AffineNeuron {
  Rational bias{0};
  std::vector<std::pair<Index, Rational>> terms;
  Activation activation = Activation::Linear;
  /// Position among all ReLU neurons of the network, or -1 for linear ones.
  std::int64_t relu_id = -1;
};

/// A network of affine layers with per-neuron ReLU or identity activation,
/// over flat inputs. Convolutions are lowered to sparse rows; a k-element
/// max-pool window becomes a tournament of ceil(log2 k) layers using
/// max(x, y) = x + relu(y - x).
class AffineNet {
 public:
  AffineNet(Index input_size, std::vector<std::vector<AffineNeuron>> layers);

  Index input_size() const noexcept { return input_size_; }
  Index output_size() const;
  const std::vector<std::vector<AffineNeuron>>& layers() const noexcept { return layers_; }
  std::size_t relu_count() const noexcept { return relu_count_; }

 private:
  Index input_size_;
  std::vector<std::vector<AffineNeuron>> layers_;
  std::size_t relu_count_ = 0;
};

template <ExactScalar S>
AffineNet lower_network(const Network<S>& net);

extern template AffineNet lower_network(const Network<Rational>&);
extern template AffineNet lower_network(const Network<Integer>&);

/// Concrete forward pass of the lowered network.
Vector<Rational> evaluate(const AffineNet& net, const Vector<Rational>& input);

enum class Phase : std::uint8_t { Unknown, Active, Inactive };

/// Indexed by AffineNeuron::relu_id.
using PhaseAssignment = std::vector<Phase>;

/// Per-layer pre-activation intervals plus the output box.
struct BoundsResult {
  /// False when a fixed phase contradicts its neuron's bounds.
  bool feasible = true;
  std::vector<std::vector<Interval>> pre;
  std::vector<Interval> output;
};

/// Interval arithmetic through the layers. A neuron fixed Active has its
/// pre-activation clamped below at 0, one fixed Inactive outputs 0, and an
/// unfixed ReLU maps [lo, hi] to [max(lo, 0), max(hi, 0)].
BoundsResult propagate_bounds(const AffineNet& net, const Box& input,
                              const PhaseAssignment* phases = nullptr);

/// Sound output box: run(x) lies inside it for every x in the input box.
Box interval_propagate(const AffineNet& net, const Box& input);

template <ExactScalar S>
Box interval_propagate(const Network<S>& net, const Box& input) {
  return interval_propagate(lower_network(net), input);
}

/// An affine function of a chosen subset of the network inputs.
struct LinearForm {
  Vector<Rational> coefficients;
  Rational constant{0};
};

}  // namespace exactnn

#endif
