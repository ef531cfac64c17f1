#ifndef EXACTNN_MATRIX_HPP
#define EXACTNN_MATRIX_HPP

#include "exactnn/scalar.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace exactnn {

using Index = Eigen::Index;

template <ExactScalar S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

enum class Representation { Dense, SparseMap };

/// Raised by every shape-checked operation. Carries the operation name, what
/// it expected and the (rows, cols) it actually received.
class DimensionError : public std::runtime_error {
 public:
  DimensionError(std::string operation, std::string expected, Index actual_rows,
                 Index actual_cols);

  const std::string& operation() const noexcept { return operation_; }
  const std::string& expected() const noexcept { return expected_; }
  Index actual_rows() const noexcept { return actual_rows_; }
  Index actual_cols() const noexcept { return actual_cols_; }

 private:
  std::string operation_;
  std::string expected_;
  Index actual_rows_;
  Index actual_cols_;
};

/// Immutable exact matrix with either a row-major dense payload or a sparse
/// (row, col) -> value mapping whose absent keys read as zero.
template <ExactScalar S>
class Matrix {
 public:
  using Scalar = S;
  using DenseStorage = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Key = std::pair<Index, Index>;
  using SparseStorage = std::map<Key, S>;

  Matrix() : rows_(0), cols_(0), payload_(DenseStorage(0, 0)) {}

  explicit Matrix(DenseStorage dense)
      : rows_(dense.rows()), cols_(dense.cols()), payload_(std::move(dense)) {}

  /// Zero-valued entries are dropped; keys outside the bounds are rejected.
  Matrix(Index rows, Index cols, SparseStorage entries);

  static Matrix zeros(Index rows, Index cols, Representation rep = Representation::Dense);
  static Matrix identity(Index n, Representation rep = Representation::Dense);
  static Matrix from_rows(const std::vector<std::vector<S>>& rows,
                          Representation rep = Representation::Dense);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }

  Representation representation() const noexcept {
    return std::holds_alternative<DenseStorage>(payload_) ? Representation::Dense
                                                          : Representation::SparseMap;
  }
  bool is_dense() const noexcept { return representation() == Representation::Dense; }

  /// Dense reads outside the bounds raise DimensionError; SparseMap reads
  /// outside the bounds return 0.
  S at(Index i, Index j) const;

  const DenseStorage& dense() const { return std::get<DenseStorage>(payload_); }
  const SparseStorage& sparse() const { return std::get<SparseStorage>(payload_); }

  DenseStorage to_dense_storage() const;
  std::vector<S> row(Index i) const;
  std::size_t nonzeros() const;

  /// Visits every nonzero entry in row-major order.
  template <class F>
  void for_each_nonzero(F&& f) const {
    if (const auto* d = std::get_if<DenseStorage>(&payload_)) {
      for (Index i = 0; i < rows_; ++i) {
        for (Index j = 0; j < cols_; ++j) {
          if ((*d)(i, j) != 0) f(i, j, (*d)(i, j));
        }
      }
    } else {
      for (const auto& [key, value] : sparse()) f(key.first, key.second, value);
    }
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (Index i = 0; i < a.rows_; ++i) {
      for (Index j = 0; j < a.cols_; ++j) {
        if (a.at(i, j) != b.at(i, j)) return false;
      }
    }
    return true;
  }

 private:
  Index rows_;
  Index cols_;
  std::variant<DenseStorage, SparseStorage> payload_;
};

template <ExactScalar S>
S dot_product(std::span<const S> a, std::span<const S> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot_product",
                         "vectors of equal length (" + std::to_string(a.size()) + ")",
                         1, static_cast<Index>(b.size()));
  }
  S acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <ExactScalar S>
S dot_product(const Vector<S>& a, const Vector<S>& b) {
  return dot_product(std::span<const S>(a.data(), static_cast<std::size_t>(a.size())),
                     std::span<const S>(b.data(), static_cast<std::size_t>(b.size())));
}

template <ExactScalar S>
S dot_product(const std::vector<S>& a, const std::vector<S>& b) {
  return dot_product(std::span<const S>(a), std::span<const S>(b));
}

/// The rows×cols window whose top-left element is m(origin).
template <ExactScalar S>
Matrix<S> sub_matrix(const Matrix<S>& m, std::pair<Index, Index> origin,
                     std::pair<Index, Index> size);

template <ExactScalar S, class F>
Matrix<S> map(F&& f, const Matrix<S>& m) {
  typename Matrix<S>::DenseStorage out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out(i, j) = f(m.at(i, j));
  }
  Matrix<S> result(std::move(out));
  return m.is_dense() ? result : convert(result, Representation::SparseMap);
}

/// Element-wise combination. The result takes the representation of `a`.
template <ExactScalar S, class F>
Matrix<S> map2(F&& f, const Matrix<S>& a, const Matrix<S>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("map2",
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()),
                         b.rows(), b.cols());
  }
  typename Matrix<S>::DenseStorage out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) out(i, j) = f(a.at(i, j), b.at(i, j));
  }
  Matrix<S> result(std::move(out));
  return a.is_dense() ? result : convert(result, Representation::SparseMap);
}

template <ExactScalar S>
Matrix<S> convert(const Matrix<S>& m, Representation target);

/// Sum of the element-wise product of two equally shaped matrices.
template <ExactScalar S>
S frobenius_dot(const Matrix<S>& a, const Matrix<S>& b);

template <ExactScalar S>
S max_element(const Matrix<S>& m);

extern template class Matrix<Rational>;
extern template class Matrix<Integer>;
extern template Matrix<Rational> sub_matrix(const Matrix<Rational>&, std::pair<Index, Index>,
                                            std::pair<Index, Index>);
extern template Matrix<Integer> sub_matrix(const Matrix<Integer>&, std::pair<Index, Index>,
                                           std::pair<Index, Index>);
extern template Matrix<Rational> convert(const Matrix<Rational>&, Representation);
extern template Matrix<Integer> convert(const Matrix<Integer>&, Representation);
extern template Rational frobenius_dot(const Matrix<Rational>&, const Matrix<Rational>&);
extern template Integer frobenius_dot(const Matrix<Integer>&, const Matrix<Integer>&);
extern template Rational max_element(const Matrix<Rational>&);
extern template Integer max_element(const Matrix<Integer>&);

}  // namespace exactnn

#endif
