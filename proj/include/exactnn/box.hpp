#ifndef EXACTNN_BOX_HPP
#define EXACTNN_BOX_HPP

#include "exactnn/matrix.hpp"

#include <stdexcept>
#include <vector>

namespace exactnn {

struct Interval {
  Rational lo;
  Rational hi;

  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool degenerate() const { return lo == hi; }
  Rational width() const { return hi - lo; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned region, one closed interval per dimension.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
    for (std::size_t i = 0; i < bounds_.size(); ++i) {
      if (bounds_[i].hi < bounds_[i].lo) {
        throw std::invalid_argument("box dimension " + std::to_string(i) + " has lo > hi");
      }
    }
  }

  static Box point(const Vector<Rational>& x) {
    std::vector<Interval> b;
    b.reserve(static_cast<std::size_t>(x.size()));
    for (Index i = 0; i < x.size(); ++i) b.push_back({x(i), x(i)});
    return Box(std::move(b));
  }

  std::size_t size() const noexcept { return bounds_.size(); }
  const Interval& operator[](std::size_t i) const { return bounds_[i]; }
  const std::vector<Interval>& bounds() const noexcept { return bounds_; }

  template <ExactScalar S>
  bool contains(const Vector<S>& x) const {
    if (static_cast<std::size_t>(x.size()) != bounds_.size()) return false;
    for (std::size_t i = 0; i < bounds_.size(); ++i) {
      if (!bounds_[i].contains(to_rational(x(static_cast<Index>(i))))) return false;
    }
    return true;
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<Interval> bounds_;
};

}  // namespace exactnn

#endif
