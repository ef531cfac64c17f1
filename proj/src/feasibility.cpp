#include "exactnn/feasibility.hpp"

#include <optional>
#include <stdexcept>

namespace exactnn {

Rational LinearConstraint::lhs(const Vector<Rational>& x) const {
  Rational acc = 0;
  for (const auto& [var, coeff] : terms) {
    if (var < 0 || var >= x.size()) throw DimensionError("constraint", "variable in range", var, x.size());
    acc += coeff * x(var);
  }
  return acc;
}

namespace {

/// c + k·δ for a positive infinitesimal δ; ordered lexicographically.
struct DeltaRational {
  Rational c{0};
  Rational k{0};

  DeltaRational& operator+=(const DeltaRational& o) {
    c += o.c;
    k += o.k;
    return *this;
  }
  friend DeltaRational operator-(const DeltaRational& a, const DeltaRational& b) {
    return {a.c - b.c, a.k - b.k};
  }
  friend DeltaRational operator*(const Rational& s, const DeltaRational& a) { return {s * a.c, s * a.k}; }
  friend bool operator<(const DeltaRational& a, const DeltaRational& b) {
    return a.c < b.c || (a.c == b.c && a.k < b.k);
  }
  friend bool operator>(const DeltaRational& a, const DeltaRational& b) { return b < a; }
};

class Simplex {
 public:
  Simplex(const FeasibilityProblem& p, const std::vector<std::size_t>& rows)
      : n_(p.bounds.size()), m_(rows.size()) {
    const std::size_t total = n_ + m_;
    lower_.resize(total);
    upper_.resize(total);
    value_.resize(total);
    for (std::size_t j = 0; j < n_; ++j) {
      lower_[j] = DeltaRational{p.bounds[j].lo, 0};
      upper_[j] = DeltaRational{p.bounds[j].hi, 0};
      value_[j] = *lower_[j];
    }
    tableau_.assign(m_, std::vector<Rational>(total, Rational(0)));
    basic_.resize(m_);
    is_basic_.assign(total, false);
    for (std::size_t r = 0; r < m_; ++r) {
      const auto& con = p.constraints[rows[r]];
      const std::size_t s = n_ + r;
      for (const auto& [var, coeff] : con.terms) tableau_[r][static_cast<std::size_t>(var)] += coeff;
      basic_[r] = s;
      is_basic_[s] = true;
      DeltaRational v;
      for (std::size_t j = 0; j < n_; ++j) {
        if (tableau_[r][j] != 0) v += tableau_[r][j] * value_[j];
      }
      value_[s] = v;
      switch (con.comparator) {
        case Comparator::Le: upper_[s] = DeltaRational{con.rhs, 0}; break;
        case Comparator::Lt: upper_[s] = DeltaRational{con.rhs, -1}; break;
        case Comparator::Ge: lower_[s] = DeltaRational{con.rhs, 0}; break;
        case Comparator::Gt: lower_[s] = DeltaRational{con.rhs, 1}; break;
      }
    }
  }

  bool check() {
    for (;;) {
      std::optional<std::size_t> row;
      std::size_t best = 0;
      for (std::size_t r = 0; r < m_; ++r) {
        const std::size_t b = basic_[r];
        if (violates_lower(b) || violates_upper(b)) {
          if (!row || b < best) {
            row = r;
            best = b;
          }
        }
      }
      if (!row) return true;
      const std::size_t r = *row;
      const std::size_t b = basic_[r];
      const bool raise = violates_lower(b);
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < n_ + m_ && !entering; ++j) {
        if (is_basic_[j] || tableau_[r][j] == 0) continue;
        const bool positive = tableau_[r][j] > 0;
        const bool can_increase = !upper_[j] || value_[j] < *upper_[j];
        const bool can_decrease = !lower_[j] || value_[j] > *lower_[j];
        if (raise ? (positive ? can_increase : can_decrease) : (positive ? can_decrease : can_increase)) {
          entering = j;
        }
      }
      if (!entering) return false;
      pivot_and_update(r, *entering, raise ? *lower_[b] : *upper_[b]);
    }
  }

  std::size_t pivots() const { return pivots_; }

  /// Replaces δ with a rational small enough that every bound still holds.
  Vector<Rational> concrete_point() const {
    Rational delta = 1;
    auto tighten = [&](const DeltaRational& small, const DeltaRational& large) {
      // small.c + small.k δ <= large.c + large.k δ
      if (small.c < large.c && small.k > large.k) {
        const Rational limit = (large.c - small.c) / (small.k - large.k);
        if (limit < delta) delta = limit;
      }
    };
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (lower_[j]) tighten(*lower_[j], value_[j]);
      if (upper_[j]) tighten(value_[j], *upper_[j]);
    }
    Vector<Rational> x(static_cast<Index>(n_));
    for (std::size_t j = 0; j < n_; ++j) x(static_cast<Index>(j)) = value_[j].c + value_[j].k * delta;
    return x;
  }

 private:
  bool violates_lower(std::size_t j) const { return lower_[j] && value_[j] < *lower_[j]; }
  bool violates_upper(std::size_t j) const { return upper_[j] && value_[j] > *upper_[j]; }

  void pivot_and_update(std::size_t r, std::size_t j, const DeltaRational& target) {
    ++pivots_;
    const std::size_t b = basic_[r];
    const Rational a = tableau_[r][j];
    const DeltaRational theta = (Rational(1) / a) * (target - value_[b]);
    value_[b] = target;
    value_[j] += theta;
    for (std::size_t k = 0; k < m_; ++k) {
      if (k != r && tableau_[k][j] != 0) value_[basic_[k]] += tableau_[k][j] * theta;
    }

    // Row r: x_b = a x_j + Σ others  ==>  x_j = (x_b - Σ others) / a.
    std::vector<Rational>& pr = tableau_[r];
    const Rational inv = Rational(1) / a;
    for (std::size_t l = 0; l < n_ + m_; ++l) {
      if (l == j || pr[l] == 0) continue;
      pr[l] = -pr[l] * inv;
    }
    pr[b] = inv;
    pr[j] = 0;
    for (std::size_t k = 0; k < m_; ++k) {
      if (k == r) continue;
      const Rational f = tableau_[k][j];
      if (f == 0) continue;
      tableau_[k][j] = 0;
      for (std::size_t l = 0; l < n_ + m_; ++l) {
        if (pr[l] != 0) tableau_[k][l] += f * pr[l];
      }
    }
    basic_[r] = j;
    is_basic_[j] = true;
    is_basic_[b] = false;
  }

  std::size_t n_;
  std::size_t m_;
  std::vector<std::optional<DeltaRational>> lower_;
  std::vector<std::optional<DeltaRational>> upper_;
  std::vector<DeltaRational> value_;
  std::vector<std::vector<Rational>> tableau_;
  std::vector<std::size_t> basic_;
  std::vector<bool> is_basic_;
  std::size_t pivots_ = 0;
};

}  // namespace

FeasibilityResult check_feasibility(const FeasibilityProblem& problem) {
  const std::size_t n = problem.bounds.size();
  for (const auto& b : problem.bounds) {
    if (b.hi < b.lo) return {};
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const auto& con = problem.constraints[i];
    bool constant = true;
    for (const auto& [var, coeff] : con.terms) {
      if (var < 0 || static_cast<std::size_t>(var) >= n) {
        throw DimensionError("check_feasibility", "variable below " + std::to_string(n), var, 1);
      }
      if (coeff != 0) constant = false;
    }
    if (constant) {
      if (!compare(Rational(0), con.comparator, con.rhs)) return {};
    } else {
      rows.push_back(i);
    }
  }

  Simplex simplex(problem, rows);
  FeasibilityResult result;
  result.feasible = simplex.check();
  result.pivots = simplex.pivots();
  if (!result.feasible) return result;
  result.point = simplex.concrete_point();

  for (std::size_t j = 0; j < n; ++j) {
    if (!problem.bounds[j].contains(result.point(static_cast<Index>(j)))) {
      throw std::logic_error("feasibility witness leaves the variable bounds");
    }
  }
  for (const auto& con : problem.constraints) {
    if (!con.holds(result.point)) throw std::logic_error("feasibility witness violates a constraint");
  }
  return result;
}

}  // namespace exactnn
