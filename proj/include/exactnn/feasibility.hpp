#ifndef EXACTNN_FEASIBILITY_HPP
#define EXACTNN_FEASIBILITY_HPP

#include "exactnn/box.hpp"
#include "exactnn/properties.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace exactnn {

/// Σ coeff·x_var  (comparator)  rhs, with sparse terms.
struct LinearConstraint {
  std::vector<std::pair<Index, Rational>> terms;
  Comparator comparator = Comparator::Le;
  Rational rhs{0};

  Rational lhs(const Vector<Rational>& x) const;
  bool holds(const Vector<Rational>& x) const { return compare(lhs(x), comparator, rhs); }
};

/// Conjunction of linear constraints over variables confined to closed intervals.
struct FeasibilityProblem {
  std::vector<Interval> bounds;
  std::vector<LinearConstraint> constraints;
};

struct FeasibilityResult {
  bool feasible = false;
  /// A point satisfying every bound and constraint, strict ones strictly.
  Vector<Rational> point;
  std::size_t pivots = 0;
};

/// Exact decision by a bounded-variable simplex over values c + k·δ, with
/// δ an infinitesimal standing for strictness. A feasible answer carries a
/// concrete point where δ has been replaced by a small enough rational.
FeasibilityResult check_feasibility(const FeasibilityProblem& problem);

}  // namespace exactnn

#endif
