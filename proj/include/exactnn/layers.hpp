#ifndef EXACTNN_LAYERS_HPP
#define EXACTNN_LAYERS_HPP

#include "exactnn/matrix.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace exactnn {

enum class Activation { Relu, Linear };

template <ExactScalar S>
S relu(const S& x) {
  return x < 0 ? S(0) : x;
}

template <ExactScalar S>
S activate(Activation a, const S& x) {
  return a == Activation::Relu ? relu(x) : x;
}

/// Either a flat vector of `rows` values, or a rows x cols x channels grid.
struct Shape {
  Index rows = 0;
  Index cols = 0;
  Index channels = 0;
  bool flat = false;

  static Shape vector(Index n) { return Shape{n, 1, 1, true}; }
  static Shape grid(Index rows, Index cols, Index channels) {
    return Shape{rows, cols, channels, false};
  }

  Index size() const { return flat ? rows : rows * cols * channels; }
  std::string to_string() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Stack of equally shaped channel matrices, or a flat vector.
template <ExactScalar S>
class Tensor {
 public:
  explicit Tensor(Vector<S> values) : data_(std::move(values)) {}
  explicit Tensor(std::vector<Matrix<S>> channels);

  bool is_flat() const noexcept { return std::holds_alternative<Vector<S>>(data_); }
  const Vector<S>& values() const { return std::get<Vector<S>>(data_); }
  const std::vector<Matrix<S>>& channels() const { return std::get<std::vector<Matrix<S>>>(data_); }
  Shape shape() const;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    if (!(a.shape() == b.shape())) return false;
    if (a.is_flat()) return a.values() == b.values();
    return a.channels() == b.channels();
  }

 private:
  std::variant<Vector<S>, std::vector<Matrix<S>>> data_;
};

/// Each weight row is [bias, w_1, ..., w_d].
template <ExactScalar S>
struct FullyConnected {
  Matrix<S> weights;
  Activation activation = Activation::Relu;

  friend bool operator==(const FullyConnected&, const FullyConnected&) = default;

  Index input_size() const { return weights.cols() - 1; }
  Index output_size() const { return weights.rows(); }
};

/// filters[f][c] is the kernel applied to input channel c for output feature
/// map f. Biases are one per filter; an empty list means all zero.
template <ExactScalar S>
struct Convolution {
  std::vector<std::vector<Matrix<S>>> filters;
  std::vector<S> biases;
  Activation activation = Activation::Relu;

  S bias(std::size_t f) const { return biases.empty() ? S(0) : biases[f]; }

  friend bool operator==(const Convolution& a, const Convolution& b) {
    if (a.filters != b.filters || a.activation != b.activation) return false;
    for (std::size_t f = 0; f < a.filters.size(); ++f) {
      if (a.bias(f) != b.bias(f)) return false;
    }
    return true;
  }
};

/// Non-overlapping windows, stride equal to the window size.
struct MaxPool {
  Index rows = 1;
  Index cols = 1;

  friend bool operator==(const MaxPool&, const MaxPool&) = default;
};

struct Flatten {
  friend bool operator==(const Flatten&, const Flatten&) = default;
};

template <ExactScalar S>
using Layer = std::variant<FullyConnected<S>, Convolution<S>, MaxPool, Flatten>;

/// Shape inference failure while building a Network.
class ShapeError : public std::runtime_error {
 public:
  ShapeError(std::size_t layer_index, const std::string& message)
      : std::runtime_error("layer " + std::to_string(layer_index) + ": " + message),
        layer_index_(layer_index) {}
  std::size_t layer_index() const noexcept { return layer_index_; }

 private:
  std::size_t layer_index_;
};

/// Infers the output shape of one layer, throwing ShapeError on mismatch.
template <ExactScalar S>
Shape infer_shape(const Layer<S>& layer, const Shape& input, std::size_t layer_index);

/// An ordered list of layers whose shapes are checked at construction.
template <ExactScalar S>
class Network {
 public:
  Network() = default;
  Network(Shape input_shape, std::vector<Layer<S>> layers);

  const Shape& input_shape() const noexcept { return input_shape_; }
  const std::vector<Layer<S>>& layers() const noexcept { return layers_; }
  /// shapes()[k] is the input shape of layer k; the last entry is the output.
  const std::vector<Shape>& shapes() const noexcept { return shapes_; }
  Shape output_shape() const { return shapes_.back(); }
  Index output_size() const { return shapes_.back().size(); }

  friend bool operator==(const Network& a, const Network& b) {
    return a.input_shape_ == b.input_shape_ && a.layers_ == b.layers_;
  }

 private:
  Shape input_shape_ = Shape::vector(0);
  std::vector<Layer<S>> layers_;
  std::vector<Shape> shapes_{Shape::vector(0)};
};

template <ExactScalar S>
Vector<S> fc_forward(const FullyConnected<S>& layer, const Vector<S>& input);

/// Valid (unpadded, stride 1) cross-correlation of one channel with one kernel.
template <ExactScalar S>
Matrix<S> convolve(const Matrix<S>& input, const Matrix<S>& filter);

template <ExactScalar S>
Tensor<S> conv_forward(const Convolution<S>& layer, const Tensor<S>& input);

template <ExactScalar S>
Matrix<S> max_pool(const Matrix<S>& input, const MaxPool& pool);

template <ExactScalar S>
Tensor<S> maxpool_forward(const MaxPool& pool, const Tensor<S>& input);

/// Channel-major, then row-major within each channel.
template <ExactScalar S>
Vector<S> flatten(const Tensor<S>& input);

template <ExactScalar S>
Tensor<S> unflatten(const Vector<S>& values, const Shape& shape);

template <ExactScalar S>
Tensor<S> apply_layer(const Layer<S>& layer, const Tensor<S>& input);

/// Applies the first `count` layers.
template <ExactScalar S>
Tensor<S> run_prefix(const Network<S>& net, const Tensor<S>& input, std::size_t count);

/// Full forward pass; the output is flattened.
template <ExactScalar S>
Vector<S> run(const Network<S>& net, const Tensor<S>& input);

/// Forward pass on values laid out like flatten() of the declared input shape.
template <ExactScalar S>
Vector<S> run(const Network<S>& net, const Vector<S>& flat_input) {
  return run(net, unflatten(flat_input, net.input_shape()));
}

/// Index of the maximum, lowest index on ties.
template <ExactScalar S>
std::size_t argmax(const Vector<S>& v);

/// The same convolution written as a fully connected layer over the
/// flattened input, with SparseMap weights.
template <ExactScalar S>
FullyConnected<S> lower_convolution(const Convolution<S>& layer, const Shape& input);

/// Reinterprets an integer network as a rational one (values unchanged).
Network<Rational> to_rational(const Network<Integer>& net);
inline const Network<Rational>& to_rational(const Network<Rational>& net) { return net; }

Matrix<Rational> to_rational(const Matrix<Integer>& m);

#define EXACTNN_LAYERS_EXTERN(S)                                                        \
  extern template class Tensor<S>;                                                      \
  extern template class Network<S>;                                                     \
  extern template Shape infer_shape(const Layer<S>&, const Shape&, std::size_t);        \
  extern template Vector<S> fc_forward(const FullyConnected<S>&, const Vector<S>&);     \
  extern template Matrix<S> convolve(const Matrix<S>&, const Matrix<S>&);               \
  extern template Tensor<S> conv_forward(const Convolution<S>&, const Tensor<S>&);      \
  extern template Matrix<S> max_pool(const Matrix<S>&, const MaxPool&);                 \
  extern template Tensor<S> maxpool_forward(const MaxPool&, const Tensor<S>&);          \
  extern template Vector<S> flatten(const Tensor<S>&);                                  \
  extern template Tensor<S> unflatten(const Vector<S>&, const Shape&);                  \
  extern template Tensor<S> apply_layer(const Layer<S>&, const Tensor<S>&);             \
  extern template Tensor<S> run_prefix(const Network<S>&, const Tensor<S>&, std::size_t); \
  extern template Vector<S> run(const Network<S>&, const Tensor<S>&);                   \
  extern template std::size_t argmax(const Vector<S>&);                                 \
  extern template FullyConnected<S> lower_convolution(const Convolution<S>&, const Shape&);

EXACTNN_LAYERS_EXTERN(Rational)
EXACTNN_LAYERS_EXTERN(Integer)

#undef EXACTNN_LAYERS_EXTERN

}  // namespace exactnn

#endif
