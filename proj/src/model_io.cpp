#include "exactnn/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace exactnn {

namespace {

[[noreturn]] void format_error(const std::string& where, const std::string& what) {
  throw ModelFormatError(where + ": " + what);
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) format_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) format_error(where, std::string("missing field \"") + key + "\"");
  return *it;
}

template <ExactScalar S>
S scalar_field(const Json& value, const std::string& where) {
  if (!value.is_string()) format_error(where, "numeric literals must be strings");
  try {
    return parse_scalar<S>(value.get<std::string>());
  } catch (const ParseError& e) {
    format_error(where, e.what());
  }
}

template <ExactScalar S>
Matrix<S> matrix_field(const Json& value, const std::string& where, Representation rep) {
  if (!value.is_array()) format_error(where, "expected a list of rows");
  std::vector<std::vector<S>> rows;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const std::string row_where = where + "[" + std::to_string(i) + "]";
    const Json& row = value[i];
    if (!row.is_array()) format_error(row_where, "expected a row list");
    if (!rows.empty() && row.size() != rows.front().size()) {
      format_error(row_where, "row has length " + std::to_string(row.size()) + ", expected " +
                                  std::to_string(rows.front().size()));
    }
    auto& out = rows.emplace_back();
    for (std::size_t j = 0; j < row.size(); ++j) {
      out.push_back(scalar_field<S>(row[j], row_where + "[" + std::to_string(j) + "]"));
    }
  }
  return Matrix<S>::from_rows(rows, rep);
}

Activation activation_field(const Json& layer, const std::string& where) {
  const std::string name = require(layer, "activation", where).get<std::string>();
  if (name == "relu") return Activation::Relu;
  if (name == "linear") return Activation::Linear;
  format_error(where + ".activation", "unsupported activation \"" + name + "\"");
}

Shape shape_field(const Json& value, const std::string& where) {
  if (!value.is_array() || (value.size() != 1 && value.size() != 3)) {
    format_error(where, "expected [length] or [rows, cols, channels]");
  }
  std::vector<Index> dims;
  for (const auto& d : value) {
    if (!d.is_number_integer() || d.get<long long>() < 1) format_error(where, "dimensions must be positive integers");
    dims.push_back(d.get<Index>());
  }
  return dims.size() == 1 ? Shape::vector(dims[0]) : Shape::grid(dims[0], dims[1], dims[2]);
}

template <ExactScalar S>
Layer<S> layer_from_json(const Json& layer, const std::string& where) {
  const std::string type = require(layer, "type", where).get<std::string>();
  if (type == "fc") {
    const Json& w = require(layer, "weights", where);
    Matrix<S> weights = matrix_field<S>(w, where + ".weights", Representation::Dense);
    // Mostly-zero weight matrices (pruned networks) are kept as SparseMap.
    if (weights.rows() * weights.cols() > 0 &&
        2 * static_cast<Index>(weights.nonzeros()) <= weights.rows() * weights.cols()) {
      weights = convert(weights, Representation::SparseMap);
    }
    return FullyConnected<S>{std::move(weights), activation_field(layer, where)};
  }
  if (type == "conv") {
    Convolution<S> conv;
    conv.activation = activation_field(layer, where);
    const Json& filters = require(layer, "filters", where);
    if (!filters.is_array()) format_error(where + ".filters", "expected a list of filters");
    for (std::size_t f = 0; f < filters.size(); ++f) {
      const std::string fw = where + ".filters[" + std::to_string(f) + "]";
      if (!filters[f].is_array()) format_error(fw, "expected a list of per-channel kernels");
      auto& out = conv.filters.emplace_back();
      for (std::size_t c = 0; c < filters[f].size(); ++c) {
        out.push_back(matrix_field<S>(filters[f][c], fw + "[" + std::to_string(c) + "]",
                                      Representation::Dense));
      }
    }
    if (auto it = layer.find("biases"); it != layer.end()) {
      if (!it->is_array()) format_error(where + ".biases", "expected a list");
      for (std::size_t f = 0; f < it->size(); ++f) {
        conv.biases.push_back(
            scalar_field<S>((*it)[f], where + ".biases[" + std::to_string(f) + "]"));
      }
    }
    return conv;
  }
  if (type == "maxpool") {
    const Json& size = require(layer, "size", where);
    if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() ||
        !size[1].is_number_integer()) {
      format_error(where + ".size", "expected [rows, cols]");
    }
    return MaxPool{size[0].get<Index>(), size[1].get<Index>()};
  }
  if (type == "flatten") return Flatten{};
  format_error(where + ".type", "unknown layer type \"" + type + "\"");
}

template <ExactScalar S>
Network<S> network_from_json(const Json& doc) {
  const Shape input = shape_field(require(doc, "input_shape", "model"), "model.input_shape");
  const Json& layers = require(doc, "layers", "model");
  if (!layers.is_array()) format_error("model.layers", "expected a list");
  std::vector<Layer<S>> out;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    out.push_back(layer_from_json<S>(layers[k], "layers[" + std::to_string(k) + "]"));
  }
  return Network<S>(input, std::move(out));
}

template <ExactScalar S>
Json matrix_to_json(const Matrix<S>& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(to_decimal_string(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* activation_name(Activation a) { return a == Activation::Relu ? "relu" : "linear"; }

template <ExactScalar S>
Json layers_to_json(const Network<S>& net) {
  Json layers = Json::array();
  for (const auto& layer : net.layers()) {
    Json record;
    std::visit(
        [&](const auto& l) {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, FullyConnected<S>>) {
            record["type"] = "fc";
            record["activation"] = activation_name(l.activation);
            record["weights"] = matrix_to_json(l.weights);
          } else if constexpr (std::is_same_v<L, Convolution<S>>) {
            record["type"] = "conv";
            record["activation"] = activation_name(l.activation);
            Json filters = Json::array();
            for (const auto& filter : l.filters) {
              Json channels = Json::array();
              for (const auto& k : filter) channels.push_back(matrix_to_json(k));
              filters.push_back(std::move(channels));
            }
            record["filters"] = std::move(filters);
            const bool has_bias = std::any_of(l.biases.begin(), l.biases.end(),
                                              [](const S& b) { return b != 0; });
            if (has_bias) {
              Json biases = Json::array();
              for (const auto& b : l.biases) biases.push_back(to_decimal_string(b));
              record["biases"] = std::move(biases);
            }
          } else if constexpr (std::is_same_v<L, MaxPool>) {
            record["type"] = "maxpool";
            record["size"] = Json::array({l.rows, l.cols});
          } else {
            record["type"] = "flatten";
          }
        },
        layer);
    layers.push_back(std::move(record));
  }
  return layers;
}

Json shape_to_json(const Shape& s) {
  if (s.flat) return Json::array({s.rows});
  return Json::array({s.rows, s.cols, s.channels});
}

Rational pow2(long exponent) {
  Rational r = 1;
  const Rational base = exponent >= 0 ? Rational(2) : Rational(1, 2);
  for (long i = 0; i < std::labs(exponent); ++i) r *= base;
  return r;
}

Vector<Rational> parse_pgm(std::istream& in, const std::string& where) {
  std::string magic;
  in >> magic;
  if (magic != "P2") format_error(where, "only plain PGM (P2) is supported");
  std::vector<long long> header;
  std::string token;
  while (header.size() < 3 && in >> token) {
    if (token.front() == '#') {
      std::getline(in, token);
      continue;
    }
    header.push_back(std::stoll(token));
  }
  if (header.size() < 3) format_error(where, "truncated PGM header");
  const long long count = header[0] * header[1];
  Vector<Rational> values(count);
  for (long long i = 0; i < count; ++i) {
    long long v = 0;
    if (!(in >> v)) format_error(where, "truncated PGM pixel data");
    if (v < 0 || v > header[2]) format_error(where, "pixel value out of range");
    values(i) = Rational(v);
  }
  return values;
}

}  // namespace

Network<Rational> Model::as_rational() const {
  return is_int() ? to_rational(integer()) : rational();
}

Model model_from_json(const Json& doc) {
  const Json& version = require(doc, "format_version", "model");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    format_error("model.format_version", "unsupported version " + version.dump());
  }
  const std::string dtype = require(doc, "dtype", "model").get<std::string>();
  std::optional<int> scale_bits;
  if (auto it = doc.find("quantization"); it != doc.end()) {
    scale_bits = require(*it, "scale_bits", "model.quantization").get<int>();
  }
  if (dtype == "rational") return Model{network_from_json<Rational>(doc), scale_bits};
  if (dtype == "int") return Model{network_from_json<Integer>(doc), scale_bits};
  format_error("model.dtype", "expected \"rational\" or \"int\", got \"" + dtype + "\"");
}

Json model_to_json(const Model& model) {
  Json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["dtype"] = model.is_int() ? "int" : "rational";
  std::visit(
      [&](const auto& net) {
        doc["input_shape"] = shape_to_json(net.input_shape());
        if (model.scale_bits) doc["quantization"] = Json{{"scale_bits", *model.scale_bits}};
        doc["layers"] = layers_to_json(net);
      },
      model.network);
  return doc;
}

std::string dump_canonical(const Json& doc) { return doc.dump(2) + "\n"; }

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError("cannot open model file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ModelFormatError(path.string() + ": " + e.what());
  } catch (const Json::type_error& e) {
    throw ModelFormatError(path.string() + ": " + e.what());
  }
  try {
    return model_from_json(doc);
  } catch (const Json::exception& e) {
    throw ModelFormatError(path.string() + ": " + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ModelFormatError("cannot write model file " + path.string());
  out << dump_canonical(model_to_json(model));
}

Vector<Rational> load_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError("cannot open input file " + path.string());
  if (path.extension() == ".pgm") return parse_pgm(in, path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ModelFormatError(path.string() + ": " + e.what());
  }
  const Json& values = doc.is_array() ? doc : require(doc, "values", path.string());
  if (!values.is_array()) format_error(path.string() + ".values", "expected a list");
  Vector<Rational> out(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    out(static_cast<Index>(i)) =
        scalar_field<Rational>(values[i], "values[" + std::to_string(i) + "]");
  }
  return out;
}

Rational output_scale(int scale_bits, int depth) {
  return pow2(static_cast<long>(scale_bits) * depth);
}

Network<Integer> quantize(const Network<Rational>& net, const QuantizationParams& params) {
  if (params.scale_bits < 1) throw std::invalid_argument("scale_bits must be >= 1");
  const Rational weight_scale = pow2(params.scale_bits);
  auto q = [](const Rational& v, const Rational& scale) {
    return round_half_away_from_zero(v * scale);
  };
  std::vector<Layer<Integer>> layers;
  int depth = 0;
  for (const auto& layer : net.layers()) {
    layers.push_back(std::visit(
        [&](const auto& l) -> Layer<Integer> {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, FullyConnected<Rational>>) {
            ++depth;
            const Rational bias_scale = output_scale(params.scale_bits, depth);
            Matrix<Integer>::SparseStorage entries;
            l.weights.for_each_nonzero([&](Index i, Index j, const Rational& w) {
              entries.emplace(Matrix<Integer>::Key{i, j}, q(w, j == 0 ? bias_scale : weight_scale));
            });
            Matrix<Integer> w(l.weights.rows(), l.weights.cols(), std::move(entries));
            return FullyConnected<Integer>{convert(w, l.weights.representation()), l.activation};
          } else if constexpr (std::is_same_v<L, Convolution<Rational>>) {
            ++depth;
            const Rational bias_scale = output_scale(params.scale_bits, depth);
            Convolution<Integer> c;
            c.activation = l.activation;
            for (const auto& filter : l.filters) {
              auto& out = c.filters.emplace_back();
              for (const auto& k : filter) {
                typename Matrix<Integer>::DenseStorage d(k.rows(), k.cols());
                for (Index i = 0; i < k.rows(); ++i) {
                  for (Index j = 0; j < k.cols(); ++j) d(i, j) = q(k.at(i, j), weight_scale);
                }
                out.push_back(convert(Matrix<Integer>(std::move(d)), k.representation()));
              }
            }
            for (const auto& b : l.biases) c.biases.push_back(q(b, bias_scale));
            return c;
          } else {
            return l;
          }
        },
        layer));
  }
  return Network<Integer>(net.input_shape(), std::move(layers));
}

std::vector<Rational> quantization_error_bound(const Network<Rational>& net,
                                               const QuantizationParams& params,
                                               const Box& input_box) {
  if (static_cast<Index>(input_box.size()) != net.input_shape().size()) {
    throw DimensionError("quantization_error_bound",
                         std::to_string(net.input_shape().size()) + " input intervals",
                         static_cast<Index>(input_box.size()), 1);
  }
  const Rational weight_err = pow2(-params.scale_bits - 1);
  std::vector<Interval> bounds = input_box.bounds();
  std::vector<Rational> radius(bounds.size(), Rational(0));
  int depth = 0;

  auto affine = [&](const FullyConnected<Rational>& fc) {
    ++depth;
    const Rational bias_err = pow2(-static_cast<long>(params.scale_bits) * depth - 1);
    Rational magnitude_sum = 0;  // sum_j (max|y_j| + r_j)
    for (std::size_t j = 0; j < bounds.size(); ++j) {
      magnitude_sum += std::max(abs_value(bounds[j].lo), abs_value(bounds[j].hi)) + radius[j];
    }
    const auto rows = static_cast<std::size_t>(fc.weights.rows());
    std::vector<Interval> next(rows);
    std::vector<Rational> next_radius(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      next[i] = {Rational(0), Rational(0)};
      next_radius[i] = 0;
    }
    fc.weights.for_each_nonzero([&](Index i, Index j, const Rational& w) {
      auto& out = next[static_cast<std::size_t>(i)];
      if (j == 0) {
        out.lo += w;
        out.hi += w;
        return;
      }
      const auto& in = bounds[static_cast<std::size_t>(j - 1)];
      if (w > 0) {
        out.lo += w * in.lo;
        out.hi += w * in.hi;
      } else {
        out.lo += w * in.hi;
        out.hi += w * in.lo;
      }
      next_radius[static_cast<std::size_t>(i)] += abs_value(w) * radius[static_cast<std::size_t>(j - 1)];
    });
    for (std::size_t i = 0; i < rows; ++i) {
      next_radius[i] += weight_err * magnitude_sum + bias_err;
      if (fc.activation == Activation::Relu) {
        next[i].lo = relu(next[i].lo);
        next[i].hi = relu(next[i].hi);
      }
    }
    bounds = std::move(next);
    radius = std::move(next_radius);
  };

  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    const auto& layer = net.layers()[k];
    const Shape in_shape = net.shapes()[k];
    if (const auto* fc = std::get_if<FullyConnected<Rational>>(&layer)) {
      affine(*fc);
    } else if (const auto* conv = std::get_if<Convolution<Rational>>(&layer)) {
      affine(lower_convolution(*conv, in_shape));
    } else if (const auto* pool = std::get_if<MaxPool>(&layer)) {
      const Shape out = net.shapes()[k + 1];
      std::vector<Interval> next;
      std::vector<Rational> next_radius;
      for (Index ch = 0; ch < out.channels; ++ch) {
        for (Index r = 0; r < out.rows; ++r) {
          for (Index c = 0; c < out.cols; ++c) {
            bool first = true;
            Interval best;
            Rational best_radius;
            for (Index i = 0; i < pool->rows; ++i) {
              for (Index j = 0; j < pool->cols; ++j) {
                const auto idx = static_cast<std::size_t>(
                    (ch * in_shape.rows + r * pool->rows + i) * in_shape.cols + c * pool->cols + j);
                if (first) {
                  best = bounds[idx];
                  best_radius = radius[idx];
                  first = false;
                } else {
                  best.lo = std::max(best.lo, bounds[idx].lo);
                  best.hi = std::max(best.hi, bounds[idx].hi);
                  best_radius = std::max(best_radius, radius[idx]);
                }
              }
            }
            next.push_back(best);
            next_radius.push_back(best_radius);
          }
        }
      }
      bounds = std::move(next);
      radius = std::move(next_radius);
    }
  }
  return radius;
}

template <ExactScalar S>
std::pair<std::size_t, std::size_t> fc_weight_counts(const Network<S>& net) {
  std::size_t total = 0;
  std::size_t nonzero = 0;
  for (const auto& layer : net.layers()) {
    if (const auto* fc = std::get_if<FullyConnected<S>>(&layer)) {
      total += static_cast<std::size_t>(fc->weights.rows() * (fc->weights.cols() - 1));
      fc->weights.for_each_nonzero([&](Index, Index j, const S&) {
        if (j != 0) ++nonzero;
      });
    }
  }
  return {total, nonzero};
}

template <ExactScalar S>
Network<S> prune(const Network<S>& net, const PruneParams& params) {
  if (params.target_density <= 0 || params.target_density > 1) {
    throw std::invalid_argument("target density must lie in (0, 1]");
  }
  struct Entry {
    std::size_t layer;
    Index row;
    Index col;
    S magnitude;
  };
  std::vector<Entry> entries;
  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    if (const auto* fc = std::get_if<FullyConnected<S>>(&net.layers()[k])) {
      fc->weights.for_each_nonzero([&](Index i, Index j, const S& w) {
        if (j != 0) entries.push_back({k, i, j, abs_value(w)});
      });
    }
  }
  const auto [total, nonzero] = fc_weight_counts(net);
  // floor(density · total), computed exactly
  const Rational budget = params.target_density * Rational(static_cast<unsigned long>(total));
  const auto keep = static_cast<std::size_t>(
      (boost::multiprecision::numerator(budget) / boost::multiprecision::denominator(budget))
          .template convert_to<unsigned long>());
  if (keep >= nonzero) return net;

  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.magnitude > b.magnitude; });
  std::vector<std::map<std::pair<Index, Index>, bool>> dropped(net.layers().size());
  for (std::size_t e = keep; e < entries.size(); ++e) {
    dropped[entries[e].layer][{entries[e].row, entries[e].col}] = true;
  }

  std::vector<Layer<S>> layers;
  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    const auto* fc = std::get_if<FullyConnected<S>>(&net.layers()[k]);
    if (fc == nullptr) {
      layers.push_back(net.layers()[k]);
      continue;
    }
    typename Matrix<S>::SparseStorage kept;
    fc->weights.for_each_nonzero([&](Index i, Index j, const S& w) {
      if (!dropped[k].contains({i, j})) kept.emplace(typename Matrix<S>::Key{i, j}, w);
    });
    layers.push_back(FullyConnected<S>{
        Matrix<S>(fc->weights.rows(), fc->weights.cols(), std::move(kept)), fc->activation});
  }
  return Network<S>(net.input_shape(), std::move(layers));
}

template Network<Rational> prune(const Network<Rational>&, const PruneParams&);
template Network<Integer> prune(const Network<Integer>&, const PruneParams&);
template std::pair<std::size_t, std::size_t> fc_weight_counts(const Network<Rational>&);
template std::pair<std::size_t, std::size_t> fc_weight_counts(const Network<Integer>&);

}  // namespace exactnn
