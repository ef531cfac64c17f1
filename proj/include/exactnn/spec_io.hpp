#ifndef EXACTNN_SPEC_IO_HPP
#define EXACTNN_SPEC_IO_HPP

#include "exactnn/model_io.hpp"
#include "exactnn/properties.hpp"

#include <filesystem>
#include <variant>

namespace exactnn {

inline constexpr int kSpecFormatVersion = 1;

/// Reach file:
///   {"format_version": 1, "kind": "reach", "name": ...,
///    "constants": {name: decimal, ...},            (optional)
///    "inputs": [{"name": ..., "lower": decimal, "upper": decimal}, ...],
///    "output": {"coefficients": [decimal, ...], "comparator": "<=", "threshold": decimal}}
ReachSpec reach_spec_from_json(const Json& doc);
Json reach_spec_to_json(const ReachSpec& spec);

/// Robustness file:
///   {"format_version": 1, "kind": "robustness", "variant": "cr|sr|lr|acr",
///    "norm": "l0|linf", "epsilon": decimal, "delta": decimal, "lipschitz": decimal,
///    "eta": decimal, "target_class": int, "input_constraint": "none|binary",
///    "domain": {"lower": decimal, "upper": decimal}}     (optional)
/// Absent parameters default to 0; absent norm to l0.
RobustnessSpec robustness_spec_from_json(const Json& doc);
Json robustness_spec_to_json(const RobustnessSpec& spec);

using PropertySpec = std::variant<ReachSpec, RobustnessSpec>;

/// Throws ModelFormatError naming the offending field.
PropertySpec load_property(const std::filesystem::path& path);
void save_property(const PropertySpec& spec, const std::filesystem::path& path);

}  // namespace exactnn

#endif
