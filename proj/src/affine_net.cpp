#include "exactnn/affine_net.hpp"

#include <stdexcept>

namespace exactnn {

AffineNet::AffineNet(Index input_size, std::vector<std::vector<AffineNeuron>> layers)
    : input_size_(input_size), layers_(std::move(layers)) {
  Index width = input_size_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    for (auto& neuron : layers_[l]) {
      for (const auto& [src, w] : neuron.terms) {
        if (src < 0 || src >= width) {
          throw ShapeError(l, "affine term reads neuron " + std::to_string(src) + " of " +
                                  std::to_string(width));
        }
      }
      neuron.relu_id = neuron.activation == Activation::Relu ? static_cast<std::int64_t>(relu_count_++) : -1;
    }
    width = static_cast<Index>(layers_[l].size());
  }
}

Index AffineNet::output_size() const {
  return layers_.empty() ? input_size_ : static_cast<Index>(layers_.back().size());
}

namespace {

template <ExactScalar S>
std::vector<AffineNeuron> fc_neurons(const FullyConnected<S>& fc) {
  std::vector<AffineNeuron> out(static_cast<std::size_t>(fc.weights.rows()));
  for (auto& n : out) n.activation = fc.activation;
  fc.weights.for_each_nonzero([&](Index i, Index j, const S& v) {
    auto& n = out[static_cast<std::size_t>(i)];
    if (j == 0) {
      n.bias = to_rational(v);
    } else {
      n.terms.emplace_back(j - 1, to_rational(v));
    }
  });
  return out;
}

/// Each window starts as the list of positions holding its candidates; every
/// round pairs neighbours (a, b) into the neurons a and relu(b - a), whose
/// sum is max(a, b) and becomes one candidate of the next round.
std::vector<std::vector<AffineNeuron>> pool_layers(const MaxPool& pool, const Shape& in) {
  const Index out_rows = in.rows / pool.rows;
  const Index out_cols = in.cols / pool.cols;
  // A candidate is a linear combination of the previous layer's neurons.
  using Combination = std::vector<Index>;
  std::vector<std::vector<Combination>> windows;
  for (Index ch = 0; ch < in.channels; ++ch) {
    for (Index r = 0; r < out_rows; ++r) {
      for (Index c = 0; c < out_cols; ++c) {
        std::vector<Combination> cand;
        for (Index i = 0; i < pool.rows; ++i) {
          for (Index j = 0; j < pool.cols; ++j) {
            cand.push_back({(ch * in.rows + r * pool.rows + i) * in.cols + c * pool.cols + j});
          }
        }
        windows.push_back(std::move(cand));
      }
    }
  }

  auto emit = [](const Combination& comb, Rational sign, AffineNeuron& n) {
    for (Index src : comb) n.terms.emplace_back(src, sign);
  };

  std::vector<std::vector<AffineNeuron>> layers;
  bool done = false;
  while (!done) {
    done = true;
    for (const auto& w : windows) done = done && w.size() == 1;
    std::vector<AffineNeuron> layer;
    std::vector<std::vector<Combination>> next(windows.size());
    for (std::size_t k = 0; k < windows.size(); ++k) {
      const auto& cand = windows[k];
      if (done) {
        AffineNeuron n;
        emit(cand[0], Rational(1), n);
        layer.push_back(std::move(n));
        continue;
      }
      for (std::size_t p = 0; p < cand.size(); p += 2) {
        const Index base = static_cast<Index>(layer.size());
        AffineNeuron keep;
        emit(cand[p], Rational(1), keep);
        layer.push_back(std::move(keep));
        if (p + 1 < cand.size()) {
          AffineNeuron gain;
          gain.activation = Activation::Relu;
          emit(cand[p + 1], Rational(1), gain);
          emit(cand[p], Rational(-1), gain);
          layer.push_back(std::move(gain));
          next[k].push_back({base, base + 1});
        } else {
          next[k].push_back({base});
        }
      }
    }
    layers.push_back(std::move(layer));
    windows = std::move(next);
  }
  return layers;
}

}  // namespace

template <ExactScalar S>
AffineNet lower_network(const Network<S>& net) {
  std::vector<std::vector<AffineNeuron>> layers;
  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    const Shape& in = net.shapes()[k];
    std::visit(
        [&](const auto& l) {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, FullyConnected<S>>) {
            layers.push_back(fc_neurons(l));
          } else if constexpr (std::is_same_v<L, Convolution<S>>) {
            layers.push_back(fc_neurons(lower_convolution(l, in)));
          } else if constexpr (std::is_same_v<L, MaxPool>) {
            for (auto& layer : pool_layers(l, in)) layers.push_back(std::move(layer));
          }
        },
        net.layers()[k]);
  }
  return AffineNet(net.input_shape().size(), std::move(layers));
}

template AffineNet lower_network(const Network<Rational>&);
template AffineNet lower_network(const Network<Integer>&);

Vector<Rational> evaluate(const AffineNet& net, const Vector<Rational>& input) {
  if (input.size() != net.input_size()) {
    throw DimensionError("evaluate", std::to_string(net.input_size()) + " inputs", input.size(), 1);
  }
  std::vector<Rational> prev(input.data(), input.data() + input.size());
  for (const auto& layer : net.layers()) {
    std::vector<Rational> cur;
    cur.reserve(layer.size());
    for (const auto& n : layer) {
      Rational v = n.bias;
      for (const auto& [src, w] : n.terms) v += w * prev[static_cast<std::size_t>(src)];
      cur.push_back(activate(n.activation, v));
    }
    prev = std::move(cur);
  }
  Vector<Rational> out(static_cast<Index>(prev.size()));
  for (std::size_t i = 0; i < prev.size(); ++i) out(static_cast<Index>(i)) = std::move(prev[i]);
  return out;
}

BoundsResult propagate_bounds(const AffineNet& net, const Box& input, const PhaseAssignment* phases) {
  if (static_cast<Index>(input.size()) != net.input_size()) {
    throw DimensionError("interval_propagate", std::to_string(net.input_size()) + " box dimensions",
                         static_cast<Index>(input.size()), 1);
  }
  if (phases && phases->size() != net.relu_count()) {
    throw std::invalid_argument("phase assignment covers " + std::to_string(phases->size()) +
                                " of " + std::to_string(net.relu_count()) + " ReLU neurons");
  }
  BoundsResult result;
  std::vector<Interval> prev = input.bounds();
  result.pre.reserve(net.layers().size());
  for (const auto& layer : net.layers()) {
    std::vector<Interval> pre;
    std::vector<Interval> post;
    pre.reserve(layer.size());
    post.reserve(layer.size());
    for (const auto& n : layer) {
      Interval iv{n.bias, n.bias};
      for (const auto& [src, w] : n.terms) {
        const Interval& x = prev[static_cast<std::size_t>(src)];
        if (x.lo == x.hi) {
          const Rational p = w * x.lo;
          iv.lo += p;
          iv.hi += p;
        } else if (w > 0) {
          iv.lo += w * x.lo;
          iv.hi += w * x.hi;
        } else {
          iv.lo += w * x.hi;
          iv.hi += w * x.lo;
        }
      }
      Interval out = iv;
      if (n.activation == Activation::Relu) {
        const Phase ph = phases ? (*phases)[static_cast<std::size_t>(n.relu_id)] : Phase::Unknown;
        if (ph == Phase::Inactive) {
          if (iv.lo > 0) result.feasible = false;
          out = {Rational(0), Rational(0)};
        } else {
          if (ph == Phase::Active && iv.hi < 0) result.feasible = false;
          if (out.lo < 0) out.lo = 0;
          if (out.hi < 0) out.hi = 0;
        }
      }
      pre.push_back(std::move(iv));
      post.push_back(std::move(out));
    }
    result.pre.push_back(std::move(pre));
    prev = std::move(post);
  }
  result.output = std::move(prev);
  return result;
}

Box interval_propagate(const AffineNet& net, const Box& input) {
  return Box(propagate_bounds(net, input).output);
}

}  // namespace exactnn
