#include "exactnn/layers.hpp"

#include <algorithm>

namespace exactnn {

std::string Shape::to_string() const {
  if (flat) return "[" + std::to_string(rows) + "]";
  return "[" + std::to_string(rows) + "," + std::to_string(cols) + "," +
         std::to_string(channels) + "]";
}

template <ExactScalar S>
Tensor<S>::Tensor(std::vector<Matrix<S>> channels) : data_(std::move(channels)) {
  const auto& ch = std::get<std::vector<Matrix<S>>>(data_);
  for (const auto& m : ch) {
    if (m.rows() != ch.front().rows() || m.cols() != ch.front().cols()) {
      throw DimensionError("Tensor",
                           "channels of shape " + std::to_string(ch.front().rows()) + "x" +
                               std::to_string(ch.front().cols()),
                           m.rows(), m.cols());
    }
  }
}

template <ExactScalar S>
Shape Tensor<S>::shape() const {
  if (is_flat()) return Shape::vector(values().size());
  const auto& ch = channels();
  if (ch.empty()) return Shape::grid(0, 0, 0);
  return Shape::grid(ch.front().rows(), ch.front().cols(), static_cast<Index>(ch.size()));
}

template <ExactScalar S>
Shape infer_shape(const Layer<S>& layer, const Shape& input, std::size_t index) {
  return std::visit(
      [&](const auto& l) -> Shape {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, FullyConnected<S>>) {
          if (!input.flat) throw ShapeError(index, "fc expects a flat input, got " + input.to_string());
          if (l.weights.cols() < 1) throw ShapeError(index, "fc weight rows need a bias slot");
          if (l.input_size() != input.rows) {
            throw ShapeError(index, "fc rows have length " + std::to_string(l.weights.cols()) +
                                        " but input has " + std::to_string(input.rows) +
                                        " values (+1 bias)");
          }
          return Shape::vector(l.output_size());
        } else if constexpr (std::is_same_v<L, Convolution<S>>) {
          if (input.flat) throw ShapeError(index, "conv expects a grid input");
          if (l.filters.empty()) throw ShapeError(index, "conv needs at least one filter");
          if (!l.biases.empty() && l.biases.size() != l.filters.size()) {
            throw ShapeError(index, "conv has " + std::to_string(l.biases.size()) +
                                        " biases for " + std::to_string(l.filters.size()) +
                                        " filters");
          }
          const auto& first = l.filters.front();
          if (first.empty()) throw ShapeError(index, "conv filter has no channels");
          const Index kr = first.front().rows();
          const Index kc = first.front().cols();
          for (const auto& filter : l.filters) {
            if (static_cast<Index>(filter.size()) != input.channels) {
              throw ShapeError(index, "conv filter has " + std::to_string(filter.size()) +
                                          " channels, input has " +
                                          std::to_string(input.channels));
            }
            for (const auto& k : filter) {
              if (k.rows() != kr || k.cols() != kc) {
                throw ShapeError(index, "conv filters differ in size");
              }
            }
          }
          if (kr < 1 || kc < 1 || kr > input.rows || kc > input.cols) {
            throw ShapeError(index, "filter's size is greater than input's");
          }
          return Shape::grid(input.rows - kr + 1, input.cols - kc + 1,
                             static_cast<Index>(l.filters.size()));
        } else if constexpr (std::is_same_v<L, MaxPool>) {
          if (input.flat) throw ShapeError(index, "maxpool expects a grid input");
          if (l.rows < 1 || l.cols < 1) throw ShapeError(index, "pool size must be positive");
          if (input.rows % l.rows != 0 || input.cols % l.cols != 0) {
            throw ShapeError(index, "input " + input.to_string() + " not divisible by pool " +
                                        std::to_string(l.rows) + "x" + std::to_string(l.cols));
          }
          return Shape::grid(input.rows / l.rows, input.cols / l.cols, input.channels);
        } else {
          return Shape::vector(input.size());
        }
      },
      layer);
}

template <ExactScalar S>
Network<S>::Network(Shape input_shape, std::vector<Layer<S>> layers)
    : input_shape_(input_shape), layers_(std::move(layers)), shapes_{input_shape} {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    shapes_.push_back(infer_shape(layers_[k], shapes_.back(), k));
  }
}

template <ExactScalar S>
Vector<S> fc_forward(const FullyConnected<S>& layer, const Vector<S>& input) {
  const auto& w = layer.weights;
  if (w.cols() != input.size() + 1) {
    throw DimensionError("fc_forward", "weight rows of length " + std::to_string(input.size() + 1),
                         w.rows(), w.cols());
  }
  Vector<S> out(w.rows());
  if (w.is_dense()) {
    const auto& d = w.dense();
    out = d.col(0);
    for (Index i = 0; i < d.rows(); ++i) {
      for (Index j = 0; j < input.size(); ++j) out(i) += d(i, j + 1) * input(j);
    }
  } else {
    out.setZero();
    for (const auto& [key, value] : w.sparse()) {
      out(key.first) += key.second == 0 ? value : value * input(key.second - 1);
    }
  }
  for (Index i = 0; i < out.size(); ++i) out(i) = activate(layer.activation, out(i));
  return out;
}

template <ExactScalar S>
Matrix<S> convolve(const Matrix<S>& input, const Matrix<S>& filter) {
  const Index kr = filter.rows();
  const Index kc = filter.cols();
  if (kr > input.rows() || kc > input.cols() || kr < 1 || kc < 1) {
    throw DimensionError("convolve", "filter's size is greater than input's (filter " +
                                         std::to_string(kr) + "x" + std::to_string(kc) + ")",
                         input.rows(), input.cols());
  }
  const Index out_rows = input.rows() - kr + 1;
  const Index out_cols = input.cols() - kc + 1;
  typename Matrix<S>::DenseStorage out(out_rows, out_cols);
  if (input.is_dense() && filter.is_dense()) {
    const auto& j = input.dense();
    const auto& k = filter.dense();
    for (Index r = 0; r < out_rows; ++r) {
      for (Index c = 0; c < out_cols; ++c) out(r, c) = j.block(r, c, kr, kc).cwiseProduct(k).sum();
    }
  } else {
    for (Index r = 0; r < out_rows; ++r) {
      for (Index c = 0; c < out_cols; ++c) {
        out(r, c) = frobenius_dot(filter, sub_matrix(input, {r, c}, {kr, kc}));
      }
    }
  }
  Matrix<S> result(std::move(out));
  return input.is_dense() ? result : convert(result, Representation::SparseMap);
}

template <ExactScalar S>
Tensor<S> conv_forward(const Convolution<S>& layer, const Tensor<S>& input) {
  if (input.is_flat()) throw DimensionError("conv_forward", "grid input", input.shape().rows, 1);
  const auto& channels = input.channels();
  std::vector<Matrix<S>> maps;
  maps.reserve(layer.filters.size());
  for (std::size_t f = 0; f < layer.filters.size(); ++f) {
    const auto& filter = layer.filters[f];
    if (filter.size() != channels.size()) {
      throw DimensionError("conv_forward", std::to_string(filter.size()) + " input channels",
                           static_cast<Index>(channels.size()), 1);
    }
    Matrix<S> acc = convolve(channels.front(), filter.front());
    for (std::size_t c = 1; c < channels.size(); ++c) {
      acc = map2([](const S& a, const S& b) { return S(a + b); }, acc,
                 convolve(channels[c], filter[c]));
    }
    const S bias = layer.bias(f);
    const Activation act = layer.activation;
    maps.push_back(map([&](const S& v) { return activate(act, S(v + bias)); }, acc));
  }
  return Tensor<S>(std::move(maps));
}

template <ExactScalar S>
Matrix<S> max_pool(const Matrix<S>& input, const MaxPool& pool) {
  if (pool.rows < 1 || pool.cols < 1 || input.rows() % pool.rows != 0 ||
      input.cols() % pool.cols != 0) {
    throw DimensionError("max_pool",
                         "dimensions divisible by pool " + std::to_string(pool.rows) + "x" +
                             std::to_string(pool.cols),
                         input.rows(), input.cols());
  }
  const Index out_rows = input.rows() / pool.rows;
  const Index out_cols = input.cols() / pool.cols;
  typename Matrix<S>::DenseStorage out(out_rows, out_cols);
  for (Index r = 0; r < out_rows; ++r) {
    for (Index c = 0; c < out_cols; ++c) {
      S best = input.at(r * pool.rows, c * pool.cols);
      for (Index i = 0; i < pool.rows; ++i) {
        for (Index j = 0; j < pool.cols; ++j) {
          const S v = input.at(r * pool.rows + i, c * pool.cols + j);
          if (v > best) best = v;
        }
      }
      out(r, c) = best;
    }
  }
  Matrix<S> result(std::move(out));
  return input.is_dense() ? result : convert(result, Representation::SparseMap);
}

template <ExactScalar S>
Tensor<S> maxpool_forward(const MaxPool& pool, const Tensor<S>& input) {
  if (input.is_flat()) throw DimensionError("maxpool_forward", "grid input", input.shape().rows, 1);
  std::vector<Matrix<S>> out;
  out.reserve(input.channels().size());
  for (const auto& ch : input.channels()) out.push_back(max_pool(ch, pool));
  return Tensor<S>(std::move(out));
}

template <ExactScalar S>
Vector<S> flatten(const Tensor<S>& input) {
  if (input.is_flat()) return input.values();
  const Shape shape = input.shape();
  Vector<S> out(shape.size());
  Index k = 0;
  for (const auto& ch : input.channels()) {
    for (Index i = 0; i < ch.rows(); ++i) {
      for (Index j = 0; j < ch.cols(); ++j) out(k++) = ch.at(i, j);
    }
  }
  return out;
}

template <ExactScalar S>
Tensor<S> unflatten(const Vector<S>& values, const Shape& shape) {
  if (values.size() != shape.size()) {
    throw DimensionError("unflatten", std::to_string(shape.size()) + " values for shape " +
                                          shape.to_string(),
                         values.size(), 1);
  }
  if (shape.flat) return Tensor<S>(values);
  std::vector<Matrix<S>> channels;
  Index k = 0;
  for (Index c = 0; c < shape.channels; ++c) {
    typename Matrix<S>::DenseStorage m(shape.rows, shape.cols);
    for (Index i = 0; i < shape.rows; ++i) {
      for (Index j = 0; j < shape.cols; ++j) m(i, j) = values(k++);
    }
    channels.emplace_back(std::move(m));
  }
  return Tensor<S>(std::move(channels));
}

template <ExactScalar S>
Tensor<S> apply_layer(const Layer<S>& layer, const Tensor<S>& input) {
  return std::visit(
      [&](const auto& l) -> Tensor<S> {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, FullyConnected<S>>) {
          if (!input.is_flat()) {
            throw DimensionError("fc_forward", "flat input", input.shape().rows,
                                 input.shape().cols);
          }
          return Tensor<S>(fc_forward(l, input.values()));
        } else if constexpr (std::is_same_v<L, Convolution<S>>) {
          return conv_forward(l, input);
        } else if constexpr (std::is_same_v<L, MaxPool>) {
          return maxpool_forward(l, input);
        } else {
          return Tensor<S>(flatten(input));
        }
      },
      layer);
}

template <ExactScalar S>
Tensor<S> run_prefix(const Network<S>& net, const Tensor<S>& input, std::size_t count) {
  if (!(input.shape() == net.input_shape())) {
    throw DimensionError("run", "input of shape " + net.input_shape().to_string(),
                         input.shape().rows, input.shape().flat ? 1 : input.shape().cols);
  }
  Tensor<S> current = input;
  const std::size_t n = std::min(count, net.layers().size());
  for (std::size_t k = 0; k < n; ++k) current = apply_layer(net.layers()[k], current);
  return current;
}

template <ExactScalar S>
Vector<S> run(const Network<S>& net, const Tensor<S>& input) {
  return flatten(run_prefix(net, input, net.layers().size()));
}

template <ExactScalar S>
std::size_t argmax(const Vector<S>& v) {
  if (v.size() == 0) throw DimensionError("argmax", "nonempty vector", 0, 0);
  std::size_t best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(static_cast<Index>(best))) best = static_cast<std::size_t>(i);
  }
  return best;
}

template <ExactScalar S>
FullyConnected<S> lower_convolution(const Convolution<S>& layer, const Shape& input) {
  const Shape out = infer_shape<S>(Layer<S>(layer), input, 0);
  typename Matrix<S>::SparseStorage entries;
  for (Index f = 0; f < out.channels; ++f) {
    for (Index r = 0; r < out.rows; ++r) {
      for (Index c = 0; c < out.cols; ++c) {
        const Index row = (f * out.rows + r) * out.cols + c;
        entries[{row, 0}] = layer.bias(static_cast<std::size_t>(f));
        for (Index ch = 0; ch < input.channels; ++ch) {
          const auto& kernel = layer.filters[static_cast<std::size_t>(f)][static_cast<std::size_t>(ch)];
          kernel.for_each_nonzero([&](Index i, Index j, const S& w) {
            const Index col = (ch * input.rows + r + i) * input.cols + c + j;
            entries[{row, col + 1}] = w;
          });
        }
      }
    }
  }
  return FullyConnected<S>{Matrix<S>(out.size(), input.size() + 1, std::move(entries)),
                           layer.activation};
}

Matrix<Rational> to_rational(const Matrix<Integer>& m) {
  if (m.is_dense()) return Matrix<Rational>(m.dense().template cast<Rational>());
  Matrix<Rational>::SparseStorage entries;
  for (const auto& [key, value] : m.sparse()) entries.emplace(key, Rational(value));
  return Matrix<Rational>(m.rows(), m.cols(), std::move(entries));
}

Network<Rational> to_rational(const Network<Integer>& net) {
  std::vector<Layer<Rational>> layers;
  for (const auto& layer : net.layers()) {
    layers.push_back(std::visit(
        [](const auto& l) -> Layer<Rational> {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, FullyConnected<Integer>>) {
            return FullyConnected<Rational>{to_rational(l.weights), l.activation};
          } else if constexpr (std::is_same_v<L, Convolution<Integer>>) {
            Convolution<Rational> c;
            c.activation = l.activation;
            for (const auto& filter : l.filters) {
              auto& out = c.filters.emplace_back();
              for (const auto& k : filter) out.push_back(to_rational(k));
            }
            for (const auto& b : l.biases) c.biases.emplace_back(b);
            return c;
          } else {
            return l;
          }
        },
        layer));
  }
  return Network<Rational>(net.input_shape(), std::move(layers));
}

#define EXACTNN_LAYERS_INSTANTIATE(S)                                                \
  template class Tensor<S>;                                                          \
  template class Network<S>;                                                         \
  template Shape infer_shape(const Layer<S>&, const Shape&, std::size_t);            \
  template Vector<S> fc_forward(const FullyConnected<S>&, const Vector<S>&);         \
  template Matrix<S> convolve(const Matrix<S>&, const Matrix<S>&);                   \
  template Tensor<S> conv_forward(const Convolution<S>&, const Tensor<S>&);          \
  template Matrix<S> max_pool(const Matrix<S>&, const MaxPool&);                     \
  template Tensor<S> maxpool_forward(const MaxPool&, const Tensor<S>&);              \
  template Vector<S> flatten(const Tensor<S>&);                                      \
  template Tensor<S> unflatten(const Vector<S>&, const Shape&);                      \
  template Tensor<S> apply_layer(const Layer<S>&, const Tensor<S>&);                 \
  template Tensor<S> run_prefix(const Network<S>&, const Tensor<S>&, std::size_t);   \
  template Vector<S> run(const Network<S>&, const Tensor<S>&);                       \
  template std::size_t argmax(const Vector<S>&);                                     \
  template FullyConnected<S> lower_convolution(const Convolution<S>&, const Shape&);

EXACTNN_LAYERS_INSTANTIATE(Rational)
EXACTNN_LAYERS_INSTANTIATE(Integer)

}  // namespace exactnn
