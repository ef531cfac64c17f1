// exactnn command-line interface. JSON results go to stdout, a one-line
// human summary to stderr.
//
// Exit codes: 0 proved/success, 1 refuted (or a lemma check failed),
// 2 timeout, 64 usage error, 65 input data error.

#include "exactnn/dataset.hpp"
#include "exactnn/lemmas.hpp"
#include "exactnn/model_io.hpp"
#include "exactnn/spec_io.hpp"
#include "exactnn/verifier.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace exactnn;

constexpr int kExitProved = 0;
constexpr int kExitRefuted = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchFlags {
  std::size_t workers = 1;
  std::optional<std::int64_t> timeout_ms;
  std::size_t max_depth = 64;
  bool deterministic = false;

  void add_to(CLI::App* app) {
    app->add_option("--workers", workers, "Branch-and-bound worker threads")->check(CLI::PositiveNumber);
    app->add_option("--timeout-ms", timeout_ms, "Wall-clock budget in milliseconds")->check(CLI::NonNegativeNumber);
    app->add_option("--max-depth", max_depth, "Deepest phase split that may be expanded");
    app->add_flag("--deterministic", deterministic, "Report elapsed_ms as 0");
  }
  SearchOptions options() const { return SearchOptions{timeout_ms, max_depth, workers}; }
};

void emit(const Json& doc) { std::cout << doc.dump(2) << "\n"; }

int status_exit(Status s) {
  switch (s) {
    case Status::Proved: return kExitProved;
    case Status::Refuted: return kExitRefuted;
    case Status::Timeout: return kExitTimeout;
  }
  return kExitData;
}

int report_verdict(const Verdict& v, const SearchFlags& flags, const std::string& what) {
  emit(verdict_to_json(v, flags.deterministic));
  std::cerr << what << ": " << status_name(v.status) << " (" << v.stats.nodes_explored << " nodes, "
            << v.stats.splits << " splits)\n";
  return status_exit(v.status);
}

// --- run ---------------------------------------------------------------------

struct RunCmd {
  std::string model;
  std::string input;
  bool dequantize = false;

  int operator()() const {
    const Model m = load_model(model);
    const Vector<Rational> x = load_input(input);
    Vector<Rational> y;
    if (m.is_int()) {
      y = run(m.integer(), from_rational_vector<Integer>(x)).cast<Rational>();
    } else {
      y = run(m.rational(), x);
    }
    Json doc;
    Json out = Json::array();
    for (Index i = 0; i < y.size(); ++i) out.push_back(to_decimal_string(y(i)));
    doc["output"] = std::move(out);
    doc["argmax"] = argmax(y);
    if (dequantize && m.is_int() && m.scale_bits) {
      const Rational scale = output_scale(*m.scale_bits, affine_depth(m.integer()));
      Json dq = Json::array();
      for (Index i = 0; i < y.size(); ++i) dq.push_back(to_decimal_string(y(i) / scale));
      doc["dequantized"] = std::move(dq);
    }
    emit(doc);
    std::cerr << "run: " << y.size() << " outputs, argmax " << argmax(y) << "\n";
    return kExitProved;
  }
};

// --- verify ------------------------------------------------------------------

struct RobustnessCmd {
  std::string model;
  std::string input;
  std::string spec_path;
  std::string method = "bab";
  std::optional<std::string> variant;
  std::optional<std::string> norm;
  std::optional<std::string> epsilon;
  std::optional<std::string> delta;
  std::optional<std::string> lipschitz;
  std::optional<std::string> eta;
  std::optional<std::size_t> target_class;
  bool binary = false;
  SearchFlags flags;

  RobustnessSpec spec(const Vector<Rational>& y) const {
    RobustnessSpec s;
    bool have_class = false;
    if (!spec_path.empty()) {
      const PropertySpec p = load_property(spec_path);
      if (!std::holds_alternative<RobustnessSpec>(p)) throw UsageError(spec_path + " is not a robustness property");
      s = std::get<RobustnessSpec>(p);
      have_class = true;
    } else if (!variant) {
      throw UsageError("give --spec or --variant");
    }
    if (variant) s.variant = parse_variant(*variant);
    if (norm) s.norm = parse_norm(*norm);
    if (epsilon) s.epsilon = parse_rational(*epsilon);
    if (delta) s.delta = parse_rational(*delta);
    if (lipschitz) s.lipschitz = parse_rational(*lipschitz);
    if (eta) s.eta = parse_rational(*eta);
    if (binary) s.constraint = InputConstraint::Binary;
    if (target_class) {
      s.target_class = *target_class;
    } else if (!have_class) {
      s.target_class = argmax(y);
    }
    return s;
  }

  template <ExactScalar S>
  Verdict verify(const Network<S>& net, const Vector<Rational>& x) const {
    const Vector<Rational> y = to_rational_vector(run(net, from_rational_vector<S>(x)));
    const RobustnessSpec s = spec(y);
    if (method == "brute") return verify_robustness_brute(net, x, s, flags.options());
    return verify_robustness_bab(net, x, s, flags.options());
  }

  int operator()() const {
    const Model m = load_model(model);
    const Vector<Rational> x = load_input(input);
    const Verdict v = m.is_int() ? verify(m.integer(), x) : verify(m.rational(), x);
    return report_verdict(v, flags, "robustness (" + method + ")");
  }
};

struct ReachCmd {
  std::string model;
  std::string spec_path;
  SearchFlags flags;

  int operator()() const {
    const Model m = load_model(model);
    const PropertySpec p = load_property(spec_path);
    if (!std::holds_alternative<ReachSpec>(p)) throw UsageError(spec_path + " is not a reach property");
    const ReachSpec& spec = std::get<ReachSpec>(p);
    const Verdict v = m.is_int() ? verify_reach_bab(m.integer(), spec, flags.options())
                                 : verify_reach_bab(m.rational(), spec, flags.options());
    return report_verdict(v, flags, "reach " + spec.name);
  }
};

// --- lemma -------------------------------------------------------------------

struct MonotonicityCmd {
  MonotonicityOptions options;

  int operator()() const {
    const MonotonicityReport r = check_monotonicity(options);
    emit(monotonicity_report_to_json(r));
    const bool ok = r.violations == 0 && r.layer_violations == 0 && r.positivity_violations == 0;
    std::cerr << "monotonicity: " << r.trials << " trials, " << r.violations << " violations, "
              << r.layer_violations << " layer violations, " << r.positivity_violations
              << " positivity violations\n";
    return ok ? kExitProved : kExitRefuted;
  }
};

struct ExtremeValuesCmd {
  std::string lemma = "r1";
  std::string mode = "both";
  ExtremeValuesOptions options;

  int operator()() {
    options.lemma = lemma == "r2" ? LemmaCase::R2 : LemmaCase::R1;
    options.mode = parse_lemma_mode(mode);
    const ExtremeValuesReport r = check_extreme_values(options);
    emit(extreme_values_report_to_json(r));
    const bool control_ok = !r.negative_control_run || r.negative_control_found;
    std::cerr << "extreme values " << lemma << " dim " << r.dim << ": " << r.tested() << " instances, "
              << r.violations << " violations";
    if (r.negative_control_run) {
      std::cerr << ", negative control " << (r.negative_control_found ? "found a counterexample" : "found nothing");
    }
    std::cerr << "\n";
    return r.violations == 0 && control_ok ? kExitProved : kExitRefuted;
  }
};

// --- model transforms ----------------------------------------------------------

void write_model(const Model& m, const std::string& out) {
  if (out.empty()) {
    std::cout << dump_canonical(model_to_json(m));
  } else {
    save_model(m, out);
  }
}

struct QuantizeCmd {
  std::string model;
  std::string output;
  int scale_bits = 8;

  int operator()() const {
    const Model m = load_model(model);
    if (m.is_int()) throw std::invalid_argument(model + " is already an integer model");
    const Network<Integer> q = quantize(m.rational(), QuantizationParams{scale_bits});
    write_model(Model{q, scale_bits}, output);
    if (!output.empty()) {
      emit(Json{{"output", output}, {"scale_bits", scale_bits}, {"affine_depth", affine_depth(q)}});
    }
    std::cerr << "quantize: scale 2^" << scale_bits << ", " << affine_depth(q) << " affine layers\n";
    return kExitProved;
  }
};

struct PruneCmd {
  std::string model;
  std::string output;
  std::string density = "0.1";

  template <ExactScalar S>
  Model prune_model(const Network<S>& net, std::optional<int> bits, std::pair<std::size_t, std::size_t>& counts) const {
    const Network<S> p = prune(net, PruneParams{parse_rational(density)});
    counts = fc_weight_counts(p);
    return Model{p, bits};
  }

  int operator()() const {
    const Model m = load_model(model);
    std::pair<std::size_t, std::size_t> before =
        m.is_int() ? fc_weight_counts(m.integer()) : fc_weight_counts(m.rational());
    std::pair<std::size_t, std::size_t> after;
    const Model p = m.is_int() ? prune_model(m.integer(), m.scale_bits, after)
                               : prune_model(m.rational(), m.scale_bits, after);
    write_model(p, output);
    if (!output.empty()) {
      emit(Json{{"output", output},
                {"weights", before.first},
                {"nonzero_before", before.second},
                {"nonzero_after", after.second}});
    }
    std::cerr << "prune: " << before.second << " -> " << after.second << " nonzero of " << before.first
              << " fc weights\n";
    return kExitProved;
  }
};

// --- dataset / explain -----------------------------------------------------------

struct DatasetCmd {
  std::uint64_t seed = 0;
  std::size_t count = 144;
  std::string output = "dataset";
  bool no_pgm = false;

  int operator()() const {
    const dataset::DatasetManifest manifest = dataset::generate(seed, count);
    dataset::write_dataset(manifest, output, !no_pgm);
    std::size_t agree = 0;
    for (const auto& img : manifest.images) agree += dataset::happy_spec(img) == (img.label == dataset::Label::Happy);
    emit(Json{{"output", output},
              {"seed", seed},
              {"count", manifest.images.size()},
              {"happy", manifest.happy_count},
              {"sad", manifest.sad_count},
              {"happy_spec_agreement", agree}});
    std::cerr << "dataset: " << manifest.images.size() << " images in " << output << "\n";
    return kExitProved;
  }
};

struct ExplainCmd {
  std::string model;
  std::string data;

  int operator()() const {
    const Model m = load_model(model);
    const dataset::DatasetManifest manifest = dataset::read_dataset(data);
    const ExplainReport r = m.is_int() ? explain_patterns(m.integer(), manifest.images)
                                       : explain_patterns(m.rational(), manifest.images);
    emit(explain_report_to_json(r));
    std::cerr << "explain: " << r.happy << " happy, " << r.sad << " sad images\n";
    for (const auto& s : r.patterns) {
      std::cerr << "  " << s.name << ": " << s.happy_matches << "/" << r.happy << " happy, " << s.sad_matches
                << "/" << r.sad << " sad" << (s.holds_for_all_happy ? "  [all happy]" : "") << "\n";
    }
    return kExitProved;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact-arithmetic neural network execution and verification"};
  app.require_subcommand(1);
  std::function<int()> action;

  RunCmd run_cmd;
  auto* run_app = app.add_subcommand("run", "Forward pass of a model on one input");
  run_app->add_option("--model", run_cmd.model, "Model JSON")->required();
  run_app->add_option("--input", run_cmd.input, "Input JSON or PGM")->required();
  run_app->add_flag("--dequantize", run_cmd.dequantize, "Also print outputs divided by the quantization scale");
  run_app->callback([&] { action = [&] { return run_cmd(); }; });

  auto* verify_app = app.add_subcommand("verify", "Verify a property");
  verify_app->require_subcommand(1);

  RobustnessCmd rob;
  auto* rob_app = verify_app->add_subcommand("robustness", "Robustness around one input");
  rob_app->add_option("--model", rob.model, "Model JSON")->required();
  rob_app->add_option("--input", rob.input, "Center input")->required();
  rob_app->add_option("--spec", rob.spec_path, "Robustness property JSON");
  rob_app->add_option("--method", rob.method, "brute or bab")->check(CLI::IsMember({"brute", "bab"}));
  rob_app->add_option("--variant", rob.variant, "cr, sr, lr or acr");
  rob_app->add_option("--norm", rob.norm, "l0 or linf");
  rob_app->add_option("--epsilon", rob.epsilon, "Input distance bound");
  rob_app->add_option("--delta", rob.delta, "Output distance bound (sr)");
  rob_app->add_option("--lipschitz", rob.lipschitz, "Lipschitz constant (lr)");
  rob_app->add_option("--eta", rob.eta, "Score lower bound (acr)");
  rob_app->add_option("--target-class", rob.target_class, "Class for cr/acr; defaults to the center's class");
  rob_app->add_flag("--binary", rob.binary, "Restrict inputs to {0, 1}");
  rob.flags.add_to(rob_app);
  rob_app->callback([&] { action = [&] { return rob(); }; });

  ReachCmd reach;
  auto* reach_app = verify_app->add_subcommand("reach", "Output predicate over an input box");
  reach_app->add_option("--model", reach.model, "Model JSON")->required();
  reach_app->add_option("--spec", reach.spec_path, "Reach property JSON")->required();
  reach.flags.add_to(reach_app);
  reach_app->callback([&] { action = [&] { return reach(); }; });

  auto* lemma_app = app.add_subcommand("lemma", "Randomized and grid lemma checks");
  lemma_app->require_subcommand(1);

  MonotonicityCmd mono;
  auto* mono_app = lemma_app->add_subcommand("monotonicity", "Monotonicity of nonnegative networks");
  mono_app->add_option("--trials", mono.options.trials, "Random networks to test")->capture_default_str();
  mono_app->add_option("--seed", mono.options.seed, "RNG seed")->capture_default_str();
  mono_app->add_option("--max-layers", mono.options.max_layers, "Most fc layers per network")->capture_default_str()->check(CLI::PositiveNumber);
  mono_app->add_option("--max-width", mono.options.max_width, "Widest hidden layer")->capture_default_str()->check(CLI::PositiveNumber);
  mono_app->callback([&] { action = [&] { return mono(); }; });

  ExtremeValuesCmd evl;
  auto* evl_app = lemma_app->add_subcommand("extreme-values", "Extreme values lemma, cases r1 and r2");
  evl_app->add_option("--case", evl.lemma, "Lemma case")->capture_default_str()->check(CLI::IsMember({"r1", "r2"}));
  evl_app->add_option("--dim", evl.options.dim, "Vector length")->capture_default_str()->check(CLI::PositiveNumber);
  evl_app->add_option("--budget", evl.options.budget, "Random samples (r2) or weight samples per a (r1)")->capture_default_str();
  evl_app->add_option("--mode", evl.mode, "Instance source")->capture_default_str()->check(CLI::IsMember({"grid", "exhaustive-grid", "random", "both"}));
  evl_app->add_option("--seed", evl.options.seed, "RNG seed")->capture_default_str();
  evl_app->callback([&] { action = [&] { return evl(); }; });

  QuantizeCmd quant;
  auto* quant_app = app.add_subcommand("quantize", "Integer model with weights scaled by 2^bits");
  quant_app->add_option("--model", quant.model, "Rational model JSON")->required();
  quant_app->add_option("--scale-bits", quant.scale_bits, "Weights are rounded from w * 2^bits")->capture_default_str()->check(CLI::Range(0, 62));
  quant_app->add_option("-o,--output", quant.output, "Output model path (stdout if omitted)");
  quant_app->callback([&] { action = [&] { return quant(); }; });

  PruneCmd prune_cmd;
  auto* prune_app = app.add_subcommand("prune", "Global magnitude pruning of fc weights");
  prune_app->add_option("--model", prune_cmd.model, "Model JSON")->required();
  prune_app->add_option("--density", prune_cmd.density, "Fraction of fc weights kept, e.g. 0.1");
  prune_app->add_option("-o,--output", prune_cmd.output, "Output model path (stdout if omitted)");
  prune_app->callback([&] { action = [&] { return prune_cmd(); }; });

  auto* dataset_app = app.add_subcommand("dataset", "Face image dataset");
  dataset_app->require_subcommand(1);
  DatasetCmd gen;
  auto* gen_app = dataset_app->add_subcommand("gen", "Generate labelled 9x9 binary faces");
  gen_app->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
  gen_app->add_option("--count", gen.count, "Images to write, half happy and half sad")->capture_default_str();
  gen_app->add_option("-o,--output", gen.output, "Output directory");
  gen_app->add_flag("--no-pgm", gen.no_pgm, "Only write manifest.json");
  gen_app->callback([&] { action = [&] { return gen(); }; });

  ExplainCmd explain;
  auto* explain_app = app.add_subcommand("explain", "Pattern predicates over pooled features");
  explain_app->add_option("--model", explain.model, "Model JSON")->required();
  explain_app->add_option("--dataset", explain.data, "Dataset directory or manifest")->required();
  explain_app->callback([&] { action = [&] { return explain(); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const exactnn::ModelFormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const exactnn::ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const exactnn::DimensionError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const exactnn::ShapeError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
