#ifndef EXACTNN_LEMMAS_HPP
#define EXACTNN_LEMMAS_HPP

#include "exactnn/dataset.hpp"
#include "exactnn/model_io.hpp"
#include "exactnn/properties.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace exactnn {

/// Uniform p/q with |p| <= max_num (p >= 0 when nonnegative) and 1 <= q <= max_den.
Rational random_rational(std::mt19937_64& rng, long max_num, long max_den, bool nonnegative);

// ---------------------------------------------------------------------------
// Monotonicity of nonnegative networks

struct MonotonicityOptions {
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  std::size_t max_layers = 4;
  std::size_t max_width = 8;
};

struct MonotonicityCounterexample {
  Network<Rational> network;
  Vector<Rational> lower;  // i
  Vector<Rational> upper;  // i', with i <= i'
};

struct MonotonicityReport {
  std::size_t trials = 0;
  /// gte(run(i'), run(i)) failures.
  std::size_t violations = 0;
  /// Per-layer gte(layer(i'), layer(i)) checks and failures.
  std::size_t layer_checks = 0;
  std::size_t layer_violations = 0;
  /// Per-layer "positive input gives positive output" checks and failures.
  std::size_t positivity_checks = 0;
  std::size_t positivity_violations = 0;
  std::optional<MonotonicityCounterexample> counterexample;
};

/// Random FC networks with nonnegative weights and biases and ReLU
/// activations, each run on an ordered pair of nonnegative inputs.
MonotonicityReport check_monotonicity(const MonotonicityOptions& options);

/// The same checks on one fixed network with `trials` random input pairs.
MonotonicityReport check_monotonicity_on(const Network<Rational>& net, std::size_t trials,
                                         std::uint64_t seed);

Json monotonicity_report_to_json(const MonotonicityReport& report);

// ---------------------------------------------------------------------------
// Extreme values lemma

enum class LemmaMode { Grid, Random, Both };

LemmaMode parse_lemma_mode(const std::string& text);
const char* lemma_mode_name(LemmaMode m);

struct ExtremeValuesOptions {
  LemmaCase lemma = LemmaCase::R1;
  std::size_t dim = 8;
  LemmaMode mode = LemmaMode::Both;
  /// R1: weight samples per binary vector. R2: random instances.
  std::size_t budget = 1000;
  std::uint64_t seed = 0;
};

struct ExtremeValuesReport {
  LemmaCase lemma = LemmaCase::R1;
  std::size_t dim = 0;
  /// Instances meeting the precondition, by source.
  std::size_t grid_tested = 0;
  std::size_t random_tested = 0;
  /// Random draws discarded for failing the precondition.
  std::size_t rejected = 0;
  std::size_t violations = 0;
  std::optional<ExtremeValuesInstance> counterexample;

  /// R2 only: the precondition without its m bound.
  bool negative_control_run = false;
  bool negative_control_found = false;
  /// Candidates examined up to and including the first counterexample.
  std::size_t negative_control_draws = 0;
  std::optional<ExtremeValuesInstance> negative_control_example;

  std::size_t tested() const { return grid_tested + random_tested; }
};

/// Falsification by grids and sampling; a clean report is evidence, not a proof.
///   R1 grid: every binary a of length dim that admits the precondition,
///            with `budget` sampled weight pairs each.
///   R2 grid: a over {0, 1/2, 1, 2}^dim with the extreme-favouring binary
///            weight pairs.
///   random:  `budget` precondition-satisfying draws of (w_x, w_y, a).
ExtremeValuesReport check_extreme_values(const ExtremeValuesOptions& options);

Json extreme_values_report_to_json(const ExtremeValuesReport& report);
Json instance_to_json(const ExtremeValuesInstance& inst);

// ---------------------------------------------------------------------------
// Pattern explanation

struct PatternPredicate {
  std::string name;
  std::function<bool(const Tensor<Rational>&)> test;
};

/// has_pattern, happy_properties, and each 2x2 shape predicate on the
/// bottom-left block of channel 0.
std::vector<PatternPredicate> default_pattern_predicates();

struct PatternStat {
  std::string name;
  std::size_t happy_matches = 0;
  std::size_t sad_matches = 0;
  bool holds_for_all_happy = false;
};

struct ExplainReport {
  std::size_t happy = 0;
  std::size_t sad = 0;
  std::vector<PatternStat> patterns;
};

/// Output of the layers up to and including the first max-pool. Throws
/// std::invalid_argument when there is none.
template <ExactScalar S>
Tensor<Rational> pooled_features(const Network<S>& net, const dataset::FaceImage& image);

template <ExactScalar S>
ExplainReport explain_patterns(const Network<S>& net, const std::vector<dataset::FaceImage>& images,
                               const std::vector<PatternPredicate>& predicates = default_pattern_predicates());

Json explain_report_to_json(const ExplainReport& report);

extern template Tensor<Rational> pooled_features(const Network<Rational>&, const dataset::FaceImage&);
extern template Tensor<Rational> pooled_features(const Network<Integer>&, const dataset::FaceImage&);
extern template ExplainReport explain_patterns(const Network<Rational>&, const std::vector<dataset::FaceImage>&,
                                               const std::vector<PatternPredicate>&);
extern template ExplainReport explain_patterns(const Network<Integer>&, const std::vector<dataset::FaceImage>&,
                                               const std::vector<PatternPredicate>&);

}  // namespace exactnn

#endif
