#include "exactnn/properties.hpp"

#include <algorithm>
#include <stdexcept>

namespace exactnn {

void RobustnessSpec::validate() const {
  if (epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
  if (variant == RobustnessVariant::SR && delta < 0) throw std::invalid_argument("delta must be non-negative");
  if (variant == RobustnessVariant::LR && lipschitz < 0) {
    throw std::invalid_argument("lipschitz constant must be non-negative");
  }
  if (domain && domain->hi < domain->lo) throw std::invalid_argument("input domain has lo > hi");
}

const char* variant_name(RobustnessVariant v) {
  switch (v) {
    case RobustnessVariant::CR: return "cr";
    case RobustnessVariant::SR: return "sr";
    case RobustnessVariant::LR: return "lr";
    case RobustnessVariant::ACR: return "acr";
  }
  return "?";
}

RobustnessVariant parse_variant(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "cr") return RobustnessVariant::CR;
  if (s == "sr") return RobustnessVariant::SR;
  if (s == "lr") return RobustnessVariant::LR;
  if (s == "acr") return RobustnessVariant::ACR;
  throw std::invalid_argument("unknown robustness variant '" + name + "' (expected cr, sr, lr or acr)");
}

const char* norm_name(Norm n) { return n == Norm::L0 ? "l0" : "linf"; }

Norm parse_norm(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "l0") return Norm::L0;
  if (s == "linf") return Norm::Linf;
  throw std::invalid_argument("unknown norm '" + name + "' (expected l0 or linf)");
}

bool satisfies_constraint(const RobustnessSpec& spec, const Vector<Rational>& x) {
  for (Index i = 0; i < x.size(); ++i) {
    if (spec.constraint == InputConstraint::Binary && x(i) != 0 && x(i) != 1) return false;
    if (spec.domain && !spec.domain->contains(x(i))) return false;
  }
  return true;
}

const char* comparator_name(Comparator c) {
  switch (c) {
    case Comparator::Le: return "<=";
    case Comparator::Lt: return "<";
    case Comparator::Ge: return ">=";
    case Comparator::Gt: return ">";
  }
  return "?";
}

Comparator parse_comparator(const std::string& text) {
  if (text == "<=" || text == "le") return Comparator::Le;
  if (text == "<" || text == "lt") return Comparator::Lt;
  if (text == ">=" || text == "ge") return Comparator::Ge;
  if (text == ">" || text == "gt") return Comparator::Gt;
  throw std::invalid_argument("unknown comparator '" + text + "'");
}

Comparator negate(Comparator c) {
  switch (c) {
    case Comparator::Le: return Comparator::Gt;
    case Comparator::Lt: return Comparator::Ge;
    case Comparator::Ge: return Comparator::Lt;
    case Comparator::Gt: return Comparator::Le;
  }
  return c;
}

bool compare(const Rational& lhs, Comparator c, const Rational& rhs) {
  switch (c) {
    case Comparator::Le: return lhs <= rhs;
    case Comparator::Lt: return lhs < rhs;
    case Comparator::Ge: return lhs >= rhs;
    case Comparator::Gt: return lhs > rhs;
  }
  return false;
}

Rational LinearPredicate::lhs(const Vector<Rational>& v) const {
  if (static_cast<Index>(coefficients.size()) != v.size()) {
    throw DimensionError("predicate", std::to_string(coefficients.size()) + " outputs", v.size(), 1);
  }
  Rational acc = 0;
  for (std::size_t i = 0; i < coefficients.size(); ++i) acc += coefficients[i] * v(static_cast<Index>(i));
  return acc;
}

Box acas_default_valid_box() {
  const Rational pi = parse_rational("3.141593");
  return Box({{Rational(0), Rational(60760)},
              {-pi, pi},
              {-pi, pi},
              {Rational(100), Rational(1200)},
              {Rational(0), Rational(1200)}});
}

bool phi1_condition(const Vector<Rational>& x) {
  const Phi1Constants k;
  if (x.size() != 5) throw DimensionError("phi1_condition", "5 values", x.size(), 1);
  return x(0) >= k.dist_min && x(3) >= k.vown_min && x(4) <= k.vint_max;
}

ReachSpec acas_phi1(const Box& valid_region) {
  if (valid_region.size() != 5) {
    throw std::invalid_argument("ACAS Xu validity box needs 5 dimensions, got " +
                                std::to_string(valid_region.size()));
  }
  const Phi1Constants k;
  std::vector<Interval> b = valid_region.bounds();
  b[0].lo = std::max(b[0].lo, k.dist_min);
  b[3].lo = std::max(b[3].lo, k.vown_min);
  b[4].hi = std::min(b[4].hi, k.vint_max);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i].hi < b[i].lo) {
      throw std::invalid_argument("validity box does not meet the phi_1 condition on " +
                                  acas_input_names()[i]);
    }
  }
  ReachSpec spec;
  spec.name = "acas_phi1";
  spec.input_names = acas_input_names();
  spec.input_box = Box(std::move(b));
  spec.output = LinearPredicate{{Rational(1), Rational(0), Rational(0), Rational(0), Rational(0)},
                                Comparator::Le,
                                k.coc_max};
  spec.constants = {{"dist_min", k.dist_min},
                    {"vown_min", k.vown_min},
                    {"vint_max", k.vint_max},
                    {"coc_max", k.coc_max}};
  return spec;
}

Rational extreme_threshold(const std::vector<Rational>& a) {
  if (a.empty()) throw std::invalid_argument("extreme_threshold of an empty vector");
  Rational sum = 0;
  for (const auto& v : a) sum += v;
  const Rational mean = sum / Rational(static_cast<long>(a.size()));
  const Rational mx = *std::max_element(a.begin(), a.end());
  return mean + (mx - mean) / 2;
}

std::size_t num_extreme(const std::vector<Rational>& a, const Rational& t) {
  return static_cast<std::size_t>(std::count_if(a.begin(), a.end(), [&](const Rational& v) { return v > t; }));
}

ExtremeValuesInstance::ExtremeValuesInstance(std::vector<Rational> w_x, std::vector<Rational> w_y,
                                             std::vector<Rational> a)
    : w_x_(std::move(w_x)), w_y_(std::move(w_y)), a_(std::move(a)) {
  if (a_.empty()) throw std::invalid_argument("extreme-values instance needs at least one entry");
  if (w_x_.size() != a_.size() || w_y_.size() != a_.size()) {
    throw DimensionError("extreme_values", std::to_string(a_.size()) + " weights",
                         static_cast<Index>(std::min(w_x_.size(), w_y_.size())), 1);
  }
  Rational sum = 0;
  for (const auto& v : a_) sum += v;
  mean_ = sum / Rational(static_cast<long>(a_.size()));
  max_ = *std::max_element(a_.begin(), a_.end());
  min_ = *std::min_element(a_.begin(), a_.end());
  threshold_ = mean_ + (max_ - mean_) / 2;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (a_[i] > threshold_) extremes_.push_back(i);
  }
}

namespace {

bool binary(const std::vector<Rational>& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0 || x == 1; });
}

bool own_distinct_pattern(const ExtremeValuesInstance& inst) {
  for (std::size_t i = 0; i < inst.n(); ++i) {
    if (!inst.is_extreme(i) && !(inst.a()[i] < inst.mean())) return false;
  }
  return true;
}

bool weights_favour_x_on_extremes(const ExtremeValuesInstance& inst) {
  for (std::size_t i : inst.extreme_indices()) {
    if (!(inst.w_x()[i] > inst.w_y()[i])) return false;
  }
  return true;
}

bool r2_base(const ExtremeValuesInstance& inst) {
  const auto& a = inst.a();
  return std::all_of(a.begin(), a.end(), [](const Rational& v) { return v >= 0; }) &&
         own_distinct_pattern(inst) && binary(inst.w_x()) && binary(inst.w_y()) &&
         weights_favour_x_on_extremes(inst) && inst.mean() != 0;
}

}  // namespace

bool distinct_pattern(const std::vector<Rational>& a) {
  return own_distinct_pattern(ExtremeValuesInstance(a, a, a));
}

bool evl_precondition(LemmaCase c, const ExtremeValuesInstance& inst) {
  if (c == LemmaCase::R1) {
    return binary(inst.a()) && inst.min() != inst.mean() && inst.max() != inst.mean() &&
           own_distinct_pattern(inst) && inst.m() >= 1 && weights_favour_x_on_extremes(inst);
  }
  if (!r2_base(inst)) return false;
  // m >= n / (3/2 + a_max / (2 mean)), multiplied through by 2 mean (3 mean + a_max) > 0.
  const Rational m(static_cast<long>(inst.m()));
  const Rational n(static_cast<long>(inst.n()));
  return m * (3 * inst.mean() + inst.max()) >= 2 * n * inst.mean();
}

bool evl_precondition_r2_without_bound(const ExtremeValuesInstance& inst) { return r2_base(inst); }

bool evl_postcondition(const ExtremeValuesInstance& inst) {
  Rational x = 0;
  Rational y = 0;
  for (std::size_t i = 0; i < inst.n(); ++i) {
    x += inst.w_x()[i] * inst.a()[i];
    y += inst.w_y()[i] * inst.a()[i];
  }
  return x > y;
}

}  // namespace exactnn
