#ifndef EXACTNN_MODEL_IO_HPP
#define EXACTNN_MODEL_IO_HPP

#include "exactnn/box.hpp"
#include "exactnn/layers.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace exactnn {

using Json = nlohmann::ordered_json;

inline constexpr int kModelFormatVersion = 1;

/// A network of either scalar kind, as stored in a model file. Quantized
/// networks remember their scale so outputs can be mapped back.
struct Model {
  std::variant<Network<Rational>, Network<Integer>> network;
  std::optional<int> scale_bits;

  bool is_int() const { return std::holds_alternative<Network<Integer>>(network); }
  const Network<Rational>& rational() const { return std::get<Network<Rational>>(network); }
  const Network<Integer>& integer() const { return std::get<Network<Integer>>(network); }
  /// The network with integer values widened to rationals.
  Network<Rational> as_rational() const;
};

/// Thrown for malformed model or input files; the message names the field.
class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Model model_from_json(const Json& doc);
Json model_to_json(const Model& model);

template <ExactScalar S>
Json network_to_json(const Network<S>& net, std::optional<int> scale_bits = std::nullopt) {
  return model_to_json(Model{net, scale_bits});
}

Model load_model(const std::filesystem::path& path);
void save_model(const Model& model, const std::filesystem::path& path);

/// Canonical text of a model: stable key order, two-space indent, trailing newline.
std::string dump_canonical(const Json& doc);

/// Reads {"values": [...]} (or a bare array) of decimal strings, or a P2 PGM.
Vector<Rational> load_input(const std::filesystem::path& path);

struct QuantizationParams {
  int scale_bits = 8;
};

struct PruneParams {
  Rational target_density{1};
};

/// Weights become round(w·2^S). The bias of the l-th affine (fc/conv) layer
/// becomes round(b·2^(S·l)) so every layer's output carries scale 2^(S·l).
Network<Integer> quantize(const Network<Rational>& net, const QuantizationParams& params);

/// Number of fc/conv layers.
template <ExactScalar S>
int affine_depth(const Network<S>& net) {
  int depth = 0;
  for (const auto& layer : net.layers()) {
    if (!std::holds_alternative<MaxPool>(layer) && !std::holds_alternative<Flatten>(layer)) ++depth;
  }
  return depth;
}

/// 2^(S·depth): divide a quantized output by this to compare it with the
/// rational network.
Rational output_scale(int scale_bits, int depth);

/// Per-output bound on |dequantized int output - rational output| for
/// inputs in the box, propagated from a rounding error of at most
/// 2^(-S-1) per weight and 2^(-S·l-1) per bias of layer l.
std::vector<Rational> quantization_error_bound(const Network<Rational>& net,
                                               const QuantizationParams& params,
                                               const Box& input_box);

/// Global magnitude pruning over fc weights (biases exempt). Keeps the
/// floor(density·N) largest-magnitude entries, earlier (layer, row, col)
/// first on ties; pruned fc layers come back as SparseMap.
template <ExactScalar S>
Network<S> prune(const Network<S>& net, const PruneParams& params);

/// Total fc weight entries excluding biases, and how many are nonzero.
template <ExactScalar S>
std::pair<std::size_t, std::size_t> fc_weight_counts(const Network<S>& net);

extern template Network<Rational> prune(const Network<Rational>&, const PruneParams&);
extern template Network<Integer> prune(const Network<Integer>&, const PruneParams&);
extern template std::pair<std::size_t, std::size_t> fc_weight_counts(const Network<Rational>&);
extern template std::pair<std::size_t, std::size_t> fc_weight_counts(const Network<Integer>&);

}  // namespace exactnn

#endif
