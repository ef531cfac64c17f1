// Reference implementations used only by tests. They work on plain nested
// vectors of rationals and share no code with the library beyond the
// scalar type, so a bug in a library kernel cannot hide in its oracle.

#ifndef EXACTNN_TESTS_ORACLES_HPP
#define EXACTNN_TESTS_ORACLES_HPP

#include "exactnn/layers.hpp"
#include "exactnn/properties.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace oracle {

using exactnn::Integer;
using exactnn::Rational;
using Grid = std::vector<std::vector<Rational>>;

inline Grid convolve(const Grid& in, const Grid& k) {
  const std::size_t rows = in.size() - k.size() + 1;
  const std::size_t cols = in[0].size() - k[0].size() + 1;
  Grid out(rows, std::vector<Rational>(cols, Rational(0)));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t a = 0; a < k.size(); ++a)
        for (std::size_t b = 0; b < k[0].size(); ++b) out[i][j] += in[i + a][j + b] * k[a][b];
  return out;
}

inline Grid max_pool(const Grid& in, std::size_t pr, std::size_t pc) {
  Grid out(in.size() / pr, std::vector<Rational>(in[0].size() / pc));
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < out[0].size(); ++j) {
      Rational best = in[i * pr][j * pc];
      for (std::size_t a = 0; a < pr; ++a)
        for (std::size_t b = 0; b < pc; ++b) best = std::max(best, in[i * pr + a][j * pc + b]);
      out[i][j] = best;
    }
  return out;
}

template <class S>
Grid to_grid(const exactnn::Matrix<S>& m) {
  Grid g(static_cast<std::size_t>(m.rows()), std::vector<Rational>(static_cast<std::size_t>(m.cols())));
  for (exactnn::Index i = 0; i < m.rows(); ++i)
    for (exactnn::Index j = 0; j < m.cols(); ++j) g[i][j] = exactnn::to_rational(m.at(i, j));
  return g;
}

inline Grid random_grid(std::mt19937_64& rng, std::size_t rows, std::size_t cols, long max_num = 5,
                        long max_den = 3, double zero_fraction = 0.0) {
  std::uniform_int_distribution<long> num(-max_num, max_num);
  std::uniform_int_distribution<long> den(1, max_den);
  std::bernoulli_distribution zero(zero_fraction);
  Grid g(rows, std::vector<Rational>(cols));
  for (auto& row : g)
    for (auto& v : row) v = zero(rng) ? Rational(0) : Rational(num(rng)) / Rational(den(rng));
  return g;
}

// Forward pass for a network made only of fully connected layers, by
// explicit loops over weight rows [bias, w1..wd].
inline std::vector<Rational> fc_run(const exactnn::Network<Rational>& net, std::vector<Rational> x) {
  for (const auto& layer : net.layers()) {
    const auto& fc = std::get<exactnn::FullyConnected<Rational>>(layer);
    std::vector<Rational> y;
    for (exactnn::Index r = 0; r < fc.weights.rows(); ++r) {
      Rational acc = fc.weights.at(r, 0);
      for (std::size_t j = 0; j < x.size(); ++j) acc += fc.weights.at(r, static_cast<exactnn::Index>(j) + 1) * x[j];
      if (fc.activation == exactnn::Activation::Relu && acc < 0) acc = 0;
      y.push_back(acc);
    }
    x = std::move(y);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Fourier–Motzkin elimination over exact rationals with strict rows.

struct Ineq {
  std::vector<Rational> a;  // a·x (< or <=) b
  Rational b;
  bool strict = false;
  bool operator<(const Ineq& o) const { return std::tie(a, b, strict) < std::tie(o.a, o.b, o.strict); }
};

inline Ineq normalized(Ineq q) {
  Rational scale = 0;
  for (const auto& v : q.a) {
    if (v != 0) {
      scale = v < 0 ? Rational(-v) : v;
      break;
    }
  }
  if (scale == 0) return q;
  for (auto& v : q.a) v /= scale;
  q.b /= scale;
  return q;
}

inline bool fm_feasible(std::vector<Ineq> rows, std::size_t vars) {
  for (std::size_t k = vars; k-- > 0;) {
    std::vector<Ineq> pos, neg;
    std::set<Ineq> next;
    for (auto& r : rows) {
      if (r.a[k] > 0) {
        pos.push_back(r);
      } else if (r.a[k] < 0) {
        neg.push_back(r);
      } else {
        next.insert(normalized(r));
      }
    }
    for (const auto& p : pos) {
      for (const auto& n : neg) {
        const Rational sp = -n.a[k];
        const Rational sn = p.a[k];
        Ineq c;
        c.a.resize(vars);
        for (std::size_t j = 0; j < vars; ++j) c.a[j] = sp * p.a[j] + sn * n.a[j];
        c.a[k] = 0;
        c.b = sp * p.b + sn * n.b;
        c.strict = p.strict || n.strict;
        next.insert(normalized(c));
      }
    }
    rows.assign(next.begin(), next.end());
  }
  for (const auto& r : rows) {
    if (r.strict ? !(0 < r.b) : !(0 <= r.b)) return false;
  }
  return true;
}

// Adds `lhs (cmp) rhs` where lhs is given by coefficients and a constant.
inline void add_row(std::vector<Ineq>& rows, std::vector<Rational> coeffs, const Rational& constant,
                    exactnn::Comparator cmp, const Rational& rhs) {
  using exactnn::Comparator;
  const bool flip = cmp == Comparator::Ge || cmp == Comparator::Gt;
  Ineq q;
  q.a = std::move(coeffs);
  q.b = rhs - constant;
  if (flip) {
    for (auto& v : q.a) v = -v;
    q.b = -q.b;
  }
  q.strict = cmp == Comparator::Lt || cmp == Comparator::Gt;
  rows.push_back(std::move(q));
}

// ---------------------------------------------------------------------------
// Exhaustive phase-pattern oracle for reach properties over FC networks:
// for each of the 2^k on/off patterns of the ReLU neurons the network is
// affine; the property fails iff some pattern admits an input in the box
// consistent with the pattern and violating the output predicate.

struct AffineExpr {
  std::vector<Rational> coeffs;
  Rational constant;
};

inline std::size_t relu_neurons(const exactnn::Network<Rational>& net) {
  std::size_t k = 0;
  for (const auto& layer : net.layers()) {
    const auto& fc = std::get<exactnn::FullyConnected<Rational>>(layer);
    if (fc.activation == exactnn::Activation::Relu) k += static_cast<std::size_t>(fc.weights.rows());
  }
  return k;
}

inline bool reach_holds_by_patterns(const exactnn::Network<Rational>& net, const exactnn::ReachSpec& spec) {
  const std::size_t n = spec.input_box.size();
  const std::size_t k = relu_neurons(net);
  if (k > 20) throw std::invalid_argument("too many relus for the pattern oracle");
  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << k); ++pattern) {
    std::vector<Ineq> rows;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Rational> e(n, Rational(0));
      e[i] = 1;
      add_row(rows, e, 0, exactnn::Comparator::Ge, spec.input_box[i].lo);
      add_row(rows, e, 0, exactnn::Comparator::Le, spec.input_box[i].hi);
    }
    std::vector<AffineExpr> cur;
    for (std::size_t i = 0; i < n; ++i) {
      AffineExpr e{std::vector<Rational>(n, Rational(0)), Rational(0)};
      e.coeffs[i] = 1;
      cur.push_back(std::move(e));
    }
    std::size_t bit = 0;
    for (const auto& layer : net.layers()) {
      const auto& fc = std::get<exactnn::FullyConnected<Rational>>(layer);
      std::vector<AffineExpr> next;
      for (exactnn::Index r = 0; r < fc.weights.rows(); ++r) {
        AffineExpr pre{std::vector<Rational>(n, Rational(0)), fc.weights.at(r, 0)};
        for (std::size_t j = 0; j < cur.size(); ++j) {
          const Rational w = fc.weights.at(r, static_cast<exactnn::Index>(j) + 1);
          if (w == 0) continue;
          for (std::size_t t = 0; t < n; ++t) pre.coeffs[t] += w * cur[j].coeffs[t];
          pre.constant += w * cur[j].constant;
        }
        if (fc.activation == exactnn::Activation::Relu) {
          const bool on = (pattern >> bit++) & 1;
          add_row(rows, pre.coeffs, pre.constant, on ? exactnn::Comparator::Ge : exactnn::Comparator::Le, 0);
          if (!on) pre = AffineExpr{std::vector<Rational>(n, Rational(0)), Rational(0)};
        }
        next.push_back(std::move(pre));
      }
      cur = std::move(next);
    }
    std::vector<Rational> out_coeffs(n, Rational(0));
    Rational out_const = 0;
    for (std::size_t o = 0; o < spec.output.coefficients.size(); ++o) {
      const Rational& c = spec.output.coefficients[o];
      for (std::size_t t = 0; t < n; ++t) out_coeffs[t] += c * cur[o].coeffs[t];
      out_const += c * cur[o].constant;
    }
    add_row(rows, out_coeffs, out_const, exactnn::negate(spec.output.comparator), spec.output.threshold);
    if (fm_feasible(rows, n)) return false;
  }
  return true;
}

}  // namespace oracle

#endif
