#include "exactnn/spec_io.hpp"

#include <fstream>

namespace exactnn {

namespace {

[[noreturn]] void spec_error(const std::string& where, const std::string& what) {
  throw ModelFormatError(where + ": " + what);
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) spec_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) spec_error(where, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string text(const Json& v, const std::string& where) {
  if (!v.is_string()) spec_error(where, "expected a string");
  return v.get<std::string>();
}

Rational decimal(const Json& v, const std::string& where) {
  try {
    return parse_rational(text(v, where));
  } catch (const ParseError& e) {
    spec_error(where, e.what());
  }
}

Rational optional_decimal(const Json& doc, const char* key, const std::string& where) {
  auto it = doc.find(key);
  return it == doc.end() ? Rational(0) : decimal(*it, where + "." + key);
}

void check_header(const Json& doc, const char* kind) {
  const Json& version = field(doc, "format_version", "property");
  if (!version.is_number_integer() || version.get<int>() != kSpecFormatVersion) {
    spec_error("property.format_version", "unsupported version " + version.dump());
  }
  const std::string k = text(field(doc, "kind", "property"), "property.kind");
  if (k != kind) spec_error("property.kind", "expected \"" + std::string(kind) + "\", got \"" + k + "\"");
}

}  // namespace

ReachSpec reach_spec_from_json(const Json& doc) {
  check_header(doc, "reach");
  ReachSpec spec;
  if (auto it = doc.find("name"); it != doc.end()) spec.name = text(*it, "property.name");
  if (auto it = doc.find("constants"); it != doc.end()) {
    if (!it->is_object()) spec_error("property.constants", "expected an object");
    for (const auto& [key, value] : it->items()) spec.constants[key] = decimal(value, "property.constants." + key);
  }
  const Json& inputs = field(doc, "inputs", "property");
  if (!inputs.is_array()) spec_error("property.inputs", "expected a list");
  std::vector<Interval> bounds;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::string where = "property.inputs[" + std::to_string(i) + "]";
    const Json& in = inputs[i];
    spec.input_names.push_back(in.contains("name") ? text(in["name"], where + ".name") : "x" + std::to_string(i));
    Interval iv{decimal(field(in, "lower", where), where + ".lower"), decimal(field(in, "upper", where), where + ".upper")};
    if (iv.hi < iv.lo) spec_error(where, "lower exceeds upper");
    bounds.push_back(std::move(iv));
  }
  spec.input_box = Box(std::move(bounds));

  const Json& out = field(doc, "output", "property");
  const Json& coeffs = field(out, "coefficients", "property.output");
  if (!coeffs.is_array()) spec_error("property.output.coefficients", "expected a list");
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    spec.output.coefficients.push_back(decimal(coeffs[i], "property.output.coefficients[" + std::to_string(i) + "]"));
  }
  try {
    spec.output.comparator = parse_comparator(text(field(out, "comparator", "property.output"), "property.output.comparator"));
  } catch (const std::invalid_argument& e) {
    spec_error("property.output.comparator", e.what());
  }
  spec.output.threshold = decimal(field(out, "threshold", "property.output"), "property.output.threshold");
  return spec;
}

Json reach_spec_to_json(const ReachSpec& spec) {
  Json doc;
  doc["format_version"] = kSpecFormatVersion;
  doc["kind"] = "reach";
  doc["name"] = spec.name;
  if (!spec.constants.empty()) {
    Json c = Json::object();
    for (const auto& [k, v] : spec.constants) c[k] = to_decimal_string(v);
    doc["constants"] = std::move(c);
  }
  Json inputs = Json::array();
  for (std::size_t i = 0; i < spec.input_box.size(); ++i) {
    inputs.push_back(Json{{"name", i < spec.input_names.size() ? spec.input_names[i] : "x" + std::to_string(i)},
                          {"lower", to_decimal_string(spec.input_box[i].lo)},
                          {"upper", to_decimal_string(spec.input_box[i].hi)}});
  }
  doc["inputs"] = std::move(inputs);
  Json coeffs = Json::array();
  for (const auto& c : spec.output.coefficients) coeffs.push_back(to_decimal_string(c));
  doc["output"] = Json{{"coefficients", std::move(coeffs)},
                       {"comparator", comparator_name(spec.output.comparator)},
                       {"threshold", to_decimal_string(spec.output.threshold)}};
  return doc;
}

RobustnessSpec robustness_spec_from_json(const Json& doc) {
  check_header(doc, "robustness");
  RobustnessSpec spec;
  try {
    spec.variant = parse_variant(text(field(doc, "variant", "property"), "property.variant"));
  } catch (const std::invalid_argument& e) {
    spec_error("property.variant", e.what());
  }
  if (auto it = doc.find("norm"); it != doc.end()) {
    try {
      spec.norm = parse_norm(text(*it, "property.norm"));
    } catch (const std::invalid_argument& e) {
      spec_error("property.norm", e.what());
    }
  }
  spec.epsilon = optional_decimal(doc, "epsilon", "property");
  spec.delta = optional_decimal(doc, "delta", "property");
  spec.lipschitz = optional_decimal(doc, "lipschitz", "property");
  spec.eta = optional_decimal(doc, "eta", "property");
  if (auto it = doc.find("target_class"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 0) {
      spec_error("property.target_class", "expected a non-negative integer");
    }
    spec.target_class = it->get<std::size_t>();
  }
  if (auto it = doc.find("input_constraint"); it != doc.end()) {
    const std::string c = text(*it, "property.input_constraint");
    if (c == "binary") {
      spec.constraint = InputConstraint::Binary;
    } else if (c == "none") {
      spec.constraint = InputConstraint::None;
    } else {
      spec_error("property.input_constraint", "expected \"none\" or \"binary\", got \"" + c + "\"");
    }
  }
  if (auto it = doc.find("domain"); it != doc.end()) {
    spec.domain = Interval{decimal(field(*it, "lower", "property.domain"), "property.domain.lower"),
                           decimal(field(*it, "upper", "property.domain"), "property.domain.upper")};
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    spec_error("property", e.what());
  }
  return spec;
}

Json robustness_spec_to_json(const RobustnessSpec& spec) {
  Json doc;
  doc["format_version"] = kSpecFormatVersion;
  doc["kind"] = "robustness";
  doc["variant"] = variant_name(spec.variant);
  doc["norm"] = norm_name(spec.norm);
  doc["epsilon"] = to_decimal_string(spec.epsilon);
  doc["delta"] = to_decimal_string(spec.delta);
  doc["lipschitz"] = to_decimal_string(spec.lipschitz);
  doc["eta"] = to_decimal_string(spec.eta);
  doc["target_class"] = spec.target_class;
  doc["input_constraint"] = spec.constraint == InputConstraint::Binary ? "binary" : "none";
  if (spec.domain) {
    doc["domain"] = Json{{"lower", to_decimal_string(spec.domain->lo)}, {"upper", to_decimal_string(spec.domain->hi)}};
  }
  return doc;
}

PropertySpec load_property(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError(path.string() + ": cannot open property file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ModelFormatError(path.string() + ": " + e.what());
  }
  const std::string kind = text(field(doc, "kind", "property"), "property.kind");
  if (kind == "reach") return reach_spec_from_json(doc);
  if (kind == "robustness") return robustness_spec_from_json(doc);
  spec_error("property.kind", "unknown kind \"" + kind + "\"");
}

void save_property(const PropertySpec& spec, const std::filesystem::path& path) {
  const Json doc = std::holds_alternative<ReachSpec>(spec) ? reach_spec_to_json(std::get<ReachSpec>(spec))
                                                           : robustness_spec_to_json(std::get<RobustnessSpec>(spec));
  std::ofstream out(path);
  if (!out) throw ModelFormatError(path.string() + ": cannot write property file");
  out << dump_canonical(doc);
}

}  // namespace exactnn
