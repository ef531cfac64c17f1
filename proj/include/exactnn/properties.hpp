#ifndef EXACTNN_PROPERTIES_HPP
#define EXACTNN_PROPERTIES_HPP

#include "exactnn/box.hpp"
#include "exactnn/layers.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace exactnn {

enum class Norm { L0, Linf };

/// L0: number of differing coordinates. Linf: largest absolute difference.
template <ExactScalar S>
Rational norm_dist(const Vector<S>& x, const Vector<S>& y, Norm norm) {
  if (x.size() != y.size()) throw DimensionError("norm_dist", std::to_string(x.size()) + " values", y.size(), 1);
  Rational acc = 0;
  for (Index i = 0; i < x.size(); ++i) {
    if (norm == Norm::L0) {
      if (x(i) != y(i)) acc += 1;
    } else {
      const Rational d = to_rational(abs_value(S(x(i) - y(i))));
      if (d > acc) acc = d;
    }
  }
  return acc;
}

template <ExactScalar S>
Vector<S> from_rational_vector(const Vector<Rational>& x) {
  if constexpr (std::same_as<S, Rational>) {
    return x;
  } else {
    Vector<S> out(x.size());
    for (Index i = 0; i < x.size(); ++i) out(i) = scalar_from_rational<S>(x(i));
    return out;
  }
}

template <ExactScalar S>
Vector<Rational> to_rational_vector(const Vector<S>& x) {
  if constexpr (std::same_as<S, Rational>) {
    return x;
  } else {
    return x.template cast<Rational>();
  }
}

// ---------------------------------------------------------------------------
// Robustness

enum class RobustnessVariant { CR, SR, LR, ACR };

/// Admissible-input predicate conjoined with the distance bound.
enum class InputConstraint { None, Binary };

struct RobustnessSpec {
  RobustnessVariant variant = RobustnessVariant::CR;
  Rational epsilon{0};
  Rational delta{0};
  Rational lipschitz{0};
  Rational eta{0};
  std::size_t target_class = 0;
  Norm norm = Norm::L0;
  InputConstraint constraint = InputConstraint::None;
  /// Optional per-coordinate bounds that every admissible input satisfies.
  std::optional<Interval> domain;

  /// Throws std::invalid_argument when a parameter the variant uses is negative.
  void validate() const;
};

const char* variant_name(RobustnessVariant v);
RobustnessVariant parse_variant(const std::string& name);
const char* norm_name(Norm n);
Norm parse_norm(const std::string& name);

bool satisfies_constraint(const RobustnessSpec& spec, const Vector<Rational>& x);

/// Evaluates one robustness implication at a perturbed point, caching f(x̂).
template <ExactScalar S>
class RobustnessEvaluator {
 public:
  RobustnessEvaluator(const Network<S>& net, Vector<Rational> center, RobustnessSpec spec)
      : net_(net),
        center_(std::move(center)),
        spec_(std::move(spec)),
        center_output_(to_rational_vector(run(net_, from_rational_vector<S>(center_)))) {
    spec_.validate();
    if ((spec_.variant == RobustnessVariant::CR || spec_.variant == RobustnessVariant::ACR) &&
        static_cast<Index>(spec_.target_class) >= center_output_.size()) {
      throw std::invalid_argument("target class " + std::to_string(spec_.target_class) +
                                  " outside the network's " +
                                  std::to_string(center_output_.size()) + " outputs");
    }
  }

  const RobustnessSpec& spec() const noexcept { return spec_; }
  const Vector<Rational>& center() const noexcept { return center_; }
  const Vector<Rational>& center_output() const noexcept { return center_output_; }

  /// Whether the antecedent (constraint and distance bound) holds at x.
  bool in_ball(const Vector<Rational>& x) const {
    return satisfies_constraint(spec_, x) && norm_dist(x, center_, spec_.norm) <= spec_.epsilon;
  }

  /// The consequent at x, given f(x).
  bool consequent(const Vector<Rational>& x, const Vector<Rational>& fx) const {
    switch (spec_.variant) {
      case RobustnessVariant::CR:
        return argmax(fx) == spec_.target_class;
      case RobustnessVariant::SR:
        return norm_dist(fx, center_output_, spec_.norm) <= spec_.delta;
      case RobustnessVariant::LR:
        return norm_dist(fx, center_output_, spec_.norm) <=
               spec_.lipschitz * norm_dist(x, center_, spec_.norm);
      case RobustnessVariant::ACR:
        return fx(static_cast<Index>(spec_.target_class)) >= spec_.eta;
    }
    return false;
  }

  bool holds_at(const Vector<Rational>& x) const {
    if (!in_ball(x)) return true;
    return consequent(x, to_rational_vector(run(net_, from_rational_vector<S>(x))));
  }

 private:
  const Network<S>& net_;
  Vector<Rational> center_;
  RobustnessSpec spec_;
  Vector<Rational> center_output_;
};

template <ExactScalar S>
bool eval_robustness(const Network<S>& net, const Vector<Rational>& center,
                     const RobustnessSpec& spec, const Vector<Rational>& x) {
  return RobustnessEvaluator<S>(net, center, spec).holds_at(x);
}

// ---------------------------------------------------------------------------
// Reachability

enum class Comparator { Le, Lt, Ge, Gt };

const char* comparator_name(Comparator c);
Comparator parse_comparator(const std::string& text);
/// The comparator that holds exactly when `c` fails.
Comparator negate(Comparator c);
bool compare(const Rational& lhs, Comparator c, const Rational& rhs);

/// coefficients · v  (comparator)  threshold
struct LinearPredicate {
  std::vector<Rational> coefficients;
  Comparator comparator = Comparator::Le;
  Rational threshold{0};

  Rational lhs(const Vector<Rational>& v) const;
  bool holds(const Vector<Rational>& v) const { return compare(lhs(v), comparator, threshold); }
};

/// inputs in box  ==>  output predicate.
struct ReachSpec {
  std::string name;
  std::vector<std::string> input_names;
  Box input_box;
  LinearPredicate output;
  std::map<std::string, Rational> constants;

  bool precondition(const Vector<Rational>& x) const { return input_box.contains(x); }
};

/// Constants of the ACAS Xu property phi_1.
struct Phi1Constants {
  Rational dist_min{55948};
  Rational vown_min{1145};
  Rational vint_max{60};
  Rational coc_max{1500};
};

inline const std::vector<std::string>& acas_input_names() {
  static const std::vector<std::string> names{"dist", "angle", "angle_int", "vown", "vint"};
  return names;
}

/// Non-normative default validity ranges for the five ACAS Xu inputs.
Box acas_default_valid_box();

/// (dist >= 55948) && (vown >= 1145) && (vint <= 60)
bool phi1_condition(const Vector<Rational>& x);

/// phi_1 on the given validity box: the box tightened by the condition
/// constants, output[0] <= 1500.
ReachSpec acas_phi1(const Box& valid_region = acas_default_valid_box());

// ---------------------------------------------------------------------------
// Structural predicates

template <ExactScalar S>
bool gte(const Vector<S>& a, const Vector<S>& b) {
  if (a.size() != b.size()) throw DimensionError("gte", std::to_string(a.size()) + " values", b.size(), 1);
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return false;
  }
  return true;
}

template <ExactScalar S>
bool positive(const Vector<S>& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (v(i) < 0) return false;
  }
  return true;
}

template <ExactScalar S>
bool positive(const Matrix<S>& m) {
  bool ok = true;
  m.for_each_nonzero([&](Index, Index, const S& v) { ok = ok && v >= 0; });
  return ok;
}

template <ExactScalar S>
bool positive(const Tensor<S>& t) {
  if (t.is_flat()) return positive(t.values());
  for (const auto& ch : t.channels()) {
    if (!positive(ch)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Pooling-layer pattern predicates over 2x2 matrices. Any other shape yields
// false. With tl, tr, bl, br the four cells:
//   is_topright_corner   tr > tl, bl, br
//   is_topleft_corner    tl > tr, bl, br
//   is_bottomleft_angle  min(tl, bl, br) > tr      (an L shape)
//   left_vertical        min(tl, bl) > max(tr, br)
//   bottom_horizontal    min(bl, br) > max(tl, tr)
//   left_diagonal        min(tl, br) > max(tr, bl)

namespace detail {
template <ExactScalar S>
struct Quad {
  S tl, tr, bl, br;
};
template <ExactScalar S>
std::optional<Quad<S>> quad(const Matrix<S>& m) {
  if (m.rows() != 2 || m.cols() != 2) return std::nullopt;
  return Quad<S>{m.at(0, 0), m.at(0, 1), m.at(1, 0), m.at(1, 1)};
}
template <ExactScalar S>
S min2(const S& a, const S& b) {
  return a < b ? a : b;
}
template <ExactScalar S>
S max2(const S& a, const S& b) {
  return a < b ? b : a;
}
}  // namespace detail

template <ExactScalar S>
bool is_topright_corner(const Matrix<S>& m) {
  auto q = detail::quad(m);
  return q && q->bl < q->tr && q->tl < q->tr && q->br < q->tr;
}

template <ExactScalar S>
bool is_topleft_corner(const Matrix<S>& m) {
  auto q = detail::quad(m);
  return q && q->tr < q->tl && q->bl < q->tl && q->br < q->tl;
}

template <ExactScalar S>
bool is_bottomleft_angle(const Matrix<S>& m) {
  auto q = detail::quad(m);
  return q && detail::min2(q->tl, detail::min2(q->bl, q->br)) > q->tr;
}

template <ExactScalar S>
bool left_vertical(const Matrix<S>& m) {
  auto q = detail::quad(m);
  return q && detail::min2(q->tl, q->bl) > detail::max2(q->tr, q->br);
}

template <ExactScalar S>
bool bottom_horizontal(const Matrix<S>& m) {
  auto q = detail::quad(m);
  return q && detail::min2(q->bl, q->br) > detail::max2(q->tl, q->tr);
}

template <ExactScalar S>
bool left_diagonal(const Matrix<S>& m) {
  auto q = detail::quad(m);
  return q && detail::min2(q->tl, q->br) > detail::max2(q->tr, q->bl);
}

/// The unique strict maximum of the matrix sits at (row, col).
template <ExactScalar S>
bool unique_max_at(const Matrix<S>& m, Index row, Index col) {
  if (m.rows() == 0 || m.cols() == 0) return false;
  const S corner = m.at(row, col);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if ((i != row || j != col) && !(m.at(i, j) < corner)) return false;
    }
  }
  return true;
}

template <ExactScalar S>
bool max_bottom_left_corner(const Matrix<S>& m) {
  return m.rows() > 0 && unique_max_at(m, m.rows() - 1, 0);
}

template <ExactScalar S>
bool max_bottom_right_corner(const Matrix<S>& m) {
  return m.rows() > 0 && m.cols() > 0 && unique_max_at(m, m.rows() - 1, m.cols() - 1);
}

/// Bottom-left corner maximum on channel 0 and bottom-right on channel 1.
template <ExactScalar S>
bool has_pattern(const Tensor<S>& pooled) {
  if (pooled.is_flat() || pooled.channels().size() < 2) return false;
  return max_bottom_left_corner(pooled.channels()[0]) &&
         max_bottom_right_corner(pooled.channels()[1]);
}

/// The 2x2 block in the bottom-left corner of channel 0.
template <ExactScalar S>
std::optional<Matrix<S>> happy_region(const Tensor<S>& pooled) {
  if (pooled.is_flat() || pooled.channels().empty()) return std::nullopt;
  const auto& ch = pooled.channels().front();
  if (ch.rows() < 2 || ch.cols() < 2) return std::nullopt;
  return sub_matrix(ch, {ch.rows() - 2, 0}, {2, 2});
}

template <ExactScalar S>
bool happy_properties(const Tensor<S>& pooled) {
  auto block = happy_region(pooled);
  if (!block) return false;
  return left_vertical(*block) || bottom_horizontal(*block) || left_diagonal(*block) ||
         is_topleft_corner(*block) || is_bottomleft_angle(*block);
}

// ---------------------------------------------------------------------------
// Extreme values

/// mean(a) + (max(a) - mean(a)) / 2
Rational extreme_threshold(const std::vector<Rational>& a);
/// Entries strictly above t.
std::size_t num_extreme(const std::vector<Rational>& a, const Rational& t);
/// Every entry is extreme or strictly below the mean.
bool distinct_pattern(const std::vector<Rational>& a);

enum class LemmaCase { R1, R2 };

/// Weight rows of the two output units and the vector they are applied to,
/// with the derived statistics computed once at construction.
class ExtremeValuesInstance {
 public:
  ExtremeValuesInstance(std::vector<Rational> w_x, std::vector<Rational> w_y,
                        std::vector<Rational> a);

  const std::vector<Rational>& w_x() const noexcept { return w_x_; }
  const std::vector<Rational>& w_y() const noexcept { return w_y_; }
  const std::vector<Rational>& a() const noexcept { return a_; }

  std::size_t n() const noexcept { return a_.size(); }
  std::size_t m() const noexcept { return extremes_.size(); }
  const Rational& mean() const noexcept { return mean_; }
  const Rational& max() const noexcept { return max_; }
  const Rational& min() const noexcept { return min_; }
  const Rational& threshold() const noexcept { return threshold_; }
  const std::vector<std::size_t>& extreme_indices() const noexcept { return extremes_; }
  bool is_extreme(std::size_t i) const { return a_[i] > threshold_; }

 private:
  std::vector<Rational> w_x_;
  std::vector<Rational> w_y_;
  std::vector<Rational> a_;
  Rational mean_;
  Rational max_;
  Rational min_;
  Rational threshold_;
  std::vector<std::size_t> extremes_;
};

/// R1: a binary, a_min != mean, a_max != mean, distinct pattern, at least
///     one extreme, and w_x > w_y on every extreme index.
/// R2: a >= 0, distinct pattern, w_x and w_y binary, w_x > w_y on extremes,
///     mean != 0 and m >= n / (3/2 + a_max / (2 mean)).
bool evl_precondition(LemmaCase c, const ExtremeValuesInstance& inst);

/// R2 without the m >= n / (...) bound; used as a negative control.
bool evl_precondition_r2_without_bound(const ExtremeValuesInstance& inst);

/// dot(w_x, a) > dot(w_y, a)
bool evl_postcondition(const ExtremeValuesInstance& inst);

}  // namespace exactnn

#endif
