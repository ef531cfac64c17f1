#include "exactnn/lemmas.hpp"

#include <algorithm>
#include <stdexcept>

namespace exactnn {

Rational random_rational(std::mt19937_64& rng, long max_num, long max_den, bool nonnegative) {
  std::uniform_int_distribution<long> num(nonnegative ? 0 : -max_num, max_num);
  std::uniform_int_distribution<long> den(1, max_den);
  const long p = num(rng);
  return Rational(p) / Rational(den(rng));
}

namespace {

Json vector_json(const Vector<Rational>& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_decimal_string(v(i)));
  return out;
}

Json vector_json(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_decimal_string(x));
  return out;
}

bool coin(std::mt19937_64& rng, unsigned num, unsigned den) {
  return std::uniform_int_distribution<unsigned>(0, den - 1)(rng) < num;
}

std::size_t uniform_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Network<Rational> random_nonnegative_network(std::mt19937_64& rng, std::size_t max_layers,
                                             std::size_t max_width) {
  const std::size_t depth = uniform_size(rng, 1, std::max<std::size_t>(1, max_layers));
  Index width = static_cast<Index>(uniform_size(rng, 1, std::max<std::size_t>(1, max_width)));
  const Index inputs = width;
  std::vector<Layer<Rational>> layers;
  for (std::size_t l = 0; l < depth; ++l) {
    const Index out = static_cast<Index>(uniform_size(rng, 1, std::max<std::size_t>(1, max_width)));
    Matrix<Rational>::DenseStorage w(out, width + 1);
    for (Index i = 0; i < out; ++i) {
      for (Index j = 0; j <= width; ++j) w(i, j) = coin(rng, 1, 4) ? Rational(0) : random_rational(rng, 6, 4, true);
    }
    layers.push_back(FullyConnected<Rational>{Matrix<Rational>(std::move(w)), Activation::Relu});
    width = out;
  }
  return Network<Rational>(Shape::vector(inputs), std::move(layers));
}

std::pair<Vector<Rational>, Vector<Rational>> ordered_pair(std::mt19937_64& rng, Index n) {
  Vector<Rational> lo(n);
  Vector<Rational> hi(n);
  const bool same = coin(rng, 1, 10);
  for (Index i = 0; i < n; ++i) {
    lo(i) = random_rational(rng, 10, 4, true);
    hi(i) = lo(i) + (same || coin(rng, 1, 2) ? Rational(0) : random_rational(rng, 10, 4, true));
  }
  return {lo, hi};
}

void check_pair(const Network<Rational>& net, const Vector<Rational>& lo, const Vector<Rational>& hi,
                MonotonicityReport& report) {
  ++report.trials;
  if (!gte(run(net, hi), run(net, lo))) {
    ++report.violations;
    if (!report.counterexample) report.counterexample = MonotonicityCounterexample{net, lo, hi};
  }
  Tensor<Rational> a(lo);
  Tensor<Rational> b(hi);
  for (const auto& layer : net.layers()) {
    Tensor<Rational> na = apply_layer(layer, a);
    Tensor<Rational> nb = apply_layer(layer, b);
    ++report.layer_checks;
    if (!gte(flatten(nb), flatten(na))) ++report.layer_violations;
    if (positive(a)) {
      ++report.positivity_checks;
      if (!positive(na)) ++report.positivity_violations;
    }
    a = std::move(na);
    b = std::move(nb);
  }
}

}  // namespace

MonotonicityReport check_monotonicity(const MonotonicityOptions& options) {
  std::mt19937_64 rng(options.seed);
  MonotonicityReport report;
  for (std::size_t t = 0; t < options.trials; ++t) {
    const Network<Rational> net = random_nonnegative_network(rng, options.max_layers, options.max_width);
    const auto [lo, hi] = ordered_pair(rng, net.input_shape().size());
    check_pair(net, lo, hi, report);
  }
  return report;
}

MonotonicityReport check_monotonicity_on(const Network<Rational>& net, std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MonotonicityReport report;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto [lo, hi] = ordered_pair(rng, net.input_shape().size());
    check_pair(net, lo, hi, report);
  }
  return report;
}

Json monotonicity_report_to_json(const MonotonicityReport& report) {
  Json doc;
  doc["trials"] = report.trials;
  doc["violations"] = report.violations;
  doc["layer_monotonicity"] = Json{{"checks", report.layer_checks}, {"violations", report.layer_violations}};
  doc["positive_push"] = Json{{"checks", report.positivity_checks}, {"violations", report.positivity_violations}};
  if (report.counterexample) {
    doc["counterexample"] = Json{{"network", network_to_json(report.counterexample->network)},
                                 {"i", vector_json(report.counterexample->lower)},
                                 {"i_prime", vector_json(report.counterexample->upper)}};
  } else {
    doc["counterexample"] = nullptr;
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Extreme values

LemmaMode parse_lemma_mode(const std::string& text) {
  if (text == "grid" || text == "exhaustive-grid") return LemmaMode::Grid;
  if (text == "random") return LemmaMode::Random;
  if (text == "both") return LemmaMode::Both;
  throw std::invalid_argument("unknown mode '" + text + "' (expected grid, random or both)");
}

const char* lemma_mode_name(LemmaMode m) {
  switch (m) {
    case LemmaMode::Grid: return "grid";
    case LemmaMode::Random: return "random";
    case LemmaMode::Both: return "both";
  }
  return "?";
}

namespace {

Rational positive_rational(std::mt19937_64& rng) {
  return random_rational(rng, 9, 6, true) + Rational(1) / Rational(static_cast<long>(uniform_size(rng, 1, 8)));
}

/// Weights for a fixed binary a: w_x > w_y on the extremes, free elsewhere.
ExtremeValuesInstance r1_instance(std::mt19937_64& rng, const std::vector<Rational>& a) {
  const ExtremeValuesInstance shape(a, a, a);
  std::vector<Rational> wx(a.size());
  std::vector<Rational> wy(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    wy[i] = random_rational(rng, 10, 6, false);
    wx[i] = shape.is_extreme(i) ? wy[i] + positive_rational(rng) : random_rational(rng, 10, 6, false);
  }
  return ExtremeValuesInstance(std::move(wx), std::move(wy), a);
}

std::vector<Rational> binary_vector(std::uint64_t mask, std::size_t dim) {
  std::vector<Rational> a(dim);
  for (std::size_t i = 0; i < dim; ++i) a[i] = Rational(static_cast<long>((mask >> i) & 1U));
  return a;
}

/// w_x = 1 on extremes; w_y = 1 on the non-extremes where `wy_rest` says so.
ExtremeValuesInstance binary_weights(const std::vector<Rational>& a, const std::vector<bool>& wx_rest,
                                     const std::vector<bool>& wy_rest) {
  const ExtremeValuesInstance shape(a, a, a);
  std::vector<Rational> wx(a.size());
  std::vector<Rational> wy(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool e = shape.is_extreme(i);
    wx[i] = (e || wx_rest[i]) ? 1 : 0;
    wy[i] = (!e && wy_rest[i]) ? 1 : 0;
  }
  return ExtremeValuesInstance(std::move(wx), std::move(wy), a);
}

/// Small values in [0, 1] mixed with large ones near a random level.
std::vector<Rational> r2_values(std::mt19937_64& rng, std::size_t dim) {
  const Rational level(static_cast<long>(uniform_size(rng, 2, 30)));
  const unsigned large_share = static_cast<unsigned>(uniform_size(rng, 1, 7));
  std::vector<Rational> a(dim);
  for (auto& v : a) {
    const long q = static_cast<long>(uniform_size(rng, 1, 16));
    const Rational unit = Rational(static_cast<long>(uniform_size(rng, 0, static_cast<std::size_t>(q)))) / Rational(q);
    v = coin(rng, large_share, 8) ? level * (1 + unit / 4) : unit;
  }
  return a;
}

void record(ExtremeValuesReport& report, const ExtremeValuesInstance& inst) {
  if (!evl_postcondition(inst)) {
    ++report.violations;
    if (!report.counterexample) report.counterexample = inst;
  }
}

void r1_check(const ExtremeValuesOptions& o, std::mt19937_64& rng, ExtremeValuesReport& report) {
  const std::size_t dim = o.dim;
  if (dim > 20) throw std::invalid_argument("R1 exhaustive enumeration supports dim <= 20");
  const std::uint64_t full = (std::uint64_t{1} << dim) - 1;
  if (o.mode != LemmaMode::Random) {
    for (std::uint64_t mask = 1; mask < full; ++mask) {
      const auto a = binary_vector(mask, dim);
      for (std::size_t s = 0; s < o.budget; ++s) {
        const auto inst = r1_instance(rng, a);
        if (!evl_precondition(LemmaCase::R1, inst)) {
          ++report.rejected;
          continue;
        }
        ++report.grid_tested;
        record(report, inst);
      }
    }
  }
  if (o.mode != LemmaMode::Grid && full > 1) {
    for (std::size_t s = 0; s < o.budget; ++s) {
      const std::uint64_t mask = std::uniform_int_distribution<std::uint64_t>(1, full - 1)(rng);
      const auto inst = r1_instance(rng, binary_vector(mask, dim));
      if (!evl_precondition(LemmaCase::R1, inst)) {
        ++report.rejected;
        continue;
      }
      ++report.random_tested;
      record(report, inst);
    }
  }
}

// Draws are counted up to and including the first counterexample.
void r2_negative(ExtremeValuesReport& report, const ExtremeValuesInstance& inst) {
  if (report.negative_control_found) return;
  ++report.negative_control_draws;
  if (evl_precondition_r2_without_bound(inst) && !evl_postcondition(inst)) {
    report.negative_control_found = true;
    report.negative_control_example = inst;
  }
}

void r2_check(const ExtremeValuesOptions& o, std::mt19937_64& rng, ExtremeValuesReport& report) {
  const std::size_t dim = o.dim;
  report.negative_control_run = true;
  const std::vector<bool> none(dim, false);
  const std::vector<bool> all(dim, true);

  if (o.mode != LemmaMode::Random) {
    if (dim > 10) throw std::invalid_argument("R2 grid supports dim <= 10");
    static const Rational grid[4] = {Rational(0), Rational(1, 2), Rational(1), Rational(2)};
    std::vector<std::size_t> digits(dim, 0);
    for (;;) {
      std::vector<Rational> a(dim);
      for (std::size_t i = 0; i < dim; ++i) a[i] = grid[digits[i]];
      // Worst case first: all weight of w_y on the non-extremes.
      for (const auto& inst : {binary_weights(a, none, all), binary_weights(a, all, all), binary_weights(a, none, none)}) {
        if (evl_precondition(LemmaCase::R2, inst)) {
          ++report.grid_tested;
          record(report, inst);
        }
        r2_negative(report, inst);
      }
      std::size_t pos = 0;
      while (pos < dim && ++digits[pos] == 4) digits[pos++] = 0;
      if (pos == dim) break;
    }
  }

  if (o.mode != LemmaMode::Grid) {
    const std::size_t max_attempts = 100 * o.budget + 1000;
    for (std::size_t attempt = 0; report.random_tested < o.budget && attempt < max_attempts; ++attempt) {
      const auto a = r2_values(rng, dim);
      std::vector<bool> wx_rest(dim);
      std::vector<bool> wy_rest(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        wx_rest[i] = coin(rng, 1, 2);
        wy_rest[i] = coin(rng, 3, 4);
      }
      const auto inst = binary_weights(a, wx_rest, wy_rest);
      if (!evl_precondition(LemmaCase::R2, inst)) {
        ++report.rejected;
        continue;
      }
      ++report.random_tested;
      record(report, inst);
    }
    for (std::size_t s = 0; s < o.budget && !report.negative_control_found; ++s) {
      r2_negative(report, binary_weights(r2_values(rng, dim), none, all));
    }
  }
}

}  // namespace

ExtremeValuesReport check_extreme_values(const ExtremeValuesOptions& options) {
  if (options.dim < 1) throw std::invalid_argument("dim must be at least 1");
  std::mt19937_64 rng(options.seed);
  ExtremeValuesReport report;
  report.lemma = options.lemma;
  report.dim = options.dim;
  if (options.lemma == LemmaCase::R1) {
    r1_check(options, rng, report);
  } else {
    r2_check(options, rng, report);
  }
  return report;
}

Json instance_to_json(const ExtremeValuesInstance& inst) {
  return Json{{"w_x", vector_json(inst.w_x())},
              {"w_y", vector_json(inst.w_y())},
              {"a", vector_json(inst.a())},
              {"mean", to_decimal_string(inst.mean())},
              {"threshold", to_decimal_string(inst.threshold())},
              {"m", inst.m()},
              {"n", inst.n()}};
}

Json extreme_values_report_to_json(const ExtremeValuesReport& report) {
  Json doc;
  doc["case"] = report.lemma == LemmaCase::R1 ? "r1" : "r2";
  doc["dim"] = report.dim;
  doc["method"] = "falsification by grid and random sampling (not a proof)";
  doc["tested"] = report.tested();
  doc["grid_tested"] = report.grid_tested;
  doc["random_tested"] = report.random_tested;
  doc["rejected"] = report.rejected;
  doc["violations"] = report.violations;
  doc["counterexample"] = report.counterexample ? instance_to_json(*report.counterexample) : Json(nullptr);
  if (report.negative_control_run) {
    doc["negative_control"] =
        Json{{"draws", report.negative_control_draws},
             {"found", report.negative_control_found},
             {"counterexample", report.negative_control_example ? instance_to_json(*report.negative_control_example)
                                                                : Json(nullptr)}};
  } else {
    doc["negative_control"] = nullptr;
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Pattern explanation

std::vector<PatternPredicate> default_pattern_predicates() {
  using T = Tensor<Rational>;
  auto region = [](bool (*pred)(const Matrix<Rational>&)) {
    return [pred](const T& t) {
      auto block = happy_region(t);
      return block && pred(*block);
    };
  };
  return {
      {"has_pattern", [](const T& t) { return has_pattern(t); }},
      {"happy_properties", [](const T& t) { return happy_properties(t); }},
      {"left_vertical", region(&left_vertical<Rational>)},
      {"bottom_horizontal", region(&bottom_horizontal<Rational>)},
      {"left_diagonal", region(&left_diagonal<Rational>)},
      {"is_topleft_corner", region(&is_topleft_corner<Rational>)},
      {"is_topright_corner", region(&is_topright_corner<Rational>)},
      {"is_bottomleft_angle", region(&is_bottomleft_angle<Rational>)},
  };
}

template <ExactScalar S>
Tensor<Rational> pooled_features(const Network<S>& net, const dataset::FaceImage& image) {
  const auto& layers = net.layers();
  std::size_t count = 0;
  while (count < layers.size() && !std::holds_alternative<MaxPool>(layers[count])) ++count;
  if (count == layers.size()) throw std::invalid_argument("network has no pooling layer to explain");
  if constexpr (std::same_as<S, Integer>) {
    const Tensor<Integer> out = run_prefix(net, image.as_tensor(), count + 1);
    std::vector<Matrix<Rational>> ch;
    for (const auto& m : out.channels()) ch.push_back(to_rational(m));
    return Tensor<Rational>(std::move(ch));
  } else {
    return run_prefix(net, Tensor<Rational>(std::vector<Matrix<Rational>>{to_rational(image.pixels)}), count + 1);
  }
}

template <ExactScalar S>
ExplainReport explain_patterns(const Network<S>& net, const std::vector<dataset::FaceImage>& images,
                               const std::vector<PatternPredicate>& predicates) {
  ExplainReport report;
  if (std::none_of(net.layers().begin(), net.layers().end(),
                   [](const Layer<S>& l) { return std::holds_alternative<MaxPool>(l); })) {
    throw std::invalid_argument("network has no pooling layer to explain");
  }
  for (const auto& p : predicates) report.patterns.push_back(PatternStat{p.name, 0, 0, false});
  for (const auto& img : images) {
    const bool happy = img.label == dataset::Label::Happy;
    (happy ? report.happy : report.sad)++;
    const Tensor<Rational> pooled = pooled_features(net, img);
    for (std::size_t k = 0; k < predicates.size(); ++k) {
      if (predicates[k].test(pooled)) (happy ? report.patterns[k].happy_matches : report.patterns[k].sad_matches)++;
    }
  }
  for (auto& s : report.patterns) s.holds_for_all_happy = report.happy > 0 && s.happy_matches == report.happy;
  return report;
}

template Tensor<Rational> pooled_features(const Network<Rational>&, const dataset::FaceImage&);
template Tensor<Rational> pooled_features(const Network<Integer>&, const dataset::FaceImage&);
template ExplainReport explain_patterns(const Network<Rational>&, const std::vector<dataset::FaceImage>&,
                                        const std::vector<PatternPredicate>&);
template ExplainReport explain_patterns(const Network<Integer>&, const std::vector<dataset::FaceImage>&,
                                        const std::vector<PatternPredicate>&);

Json explain_report_to_json(const ExplainReport& report) {
  Json doc;
  doc["images"] = Json{{"happy", report.happy}, {"sad", report.sad}};
  Json pats = Json::array();
  auto fraction = [](std::size_t k, std::size_t total) {
    return total == 0 ? Json(nullptr) : Json(to_decimal_string(Rational(static_cast<long>(k)) / Rational(static_cast<long>(total))));
  };
  for (const auto& s : report.patterns) {
    pats.push_back(Json{{"name", s.name},
                        {"happy_matches", s.happy_matches},
                        {"sad_matches", s.sad_matches},
                        {"happy_fraction", fraction(s.happy_matches, report.happy)},
                        {"sad_fraction", fraction(s.sad_matches, report.sad)},
                        {"holds_for_all_happy", s.holds_for_all_happy}});
  }
  doc["patterns"] = std::move(pats);
  return doc;
}

}  // namespace exactnn
