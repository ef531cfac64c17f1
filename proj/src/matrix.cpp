#include "exactnn/matrix.hpp"

namespace exactnn {

namespace {

std::string shape_text(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace

DimensionError::DimensionError(std::string operation, std::string expected, Index actual_rows,
                               Index actual_cols)
    : std::runtime_error("invalid dimensions in " + operation + ": expected " + expected +
                         ", got " + shape_text(actual_rows, actual_cols)),
      operation_(std::move(operation)),
      expected_(std::move(expected)),
      actual_rows_(actual_rows),
      actual_cols_(actual_cols) {}

template <ExactScalar S>
Matrix<S>::Matrix(Index rows, Index cols, SparseStorage entries)
    : rows_(rows), cols_(cols), payload_(SparseStorage{}) {
  if (rows < 0 || cols < 0) throw DimensionError("Matrix", "nonnegative shape", rows, cols);
  auto& stored = std::get<SparseStorage>(payload_);
  for (auto& [key, value] : entries) {
    if (key.first < 0 || key.first >= rows || key.second < 0 || key.second >= cols) {
      throw DimensionError("Matrix", "sparse key inside " + shape_text(rows, cols), key.first,
                           key.second);
    }
    if (value != 0) stored.emplace(key, std::move(value));
  }
}

template <ExactScalar S>
Matrix<S> Matrix<S>::zeros(Index rows, Index cols, Representation rep) {
  if (rep == Representation::SparseMap) return Matrix(rows, cols, SparseStorage{});
  return Matrix(DenseStorage::Zero(rows, cols));
}

template <ExactScalar S>
Matrix<S> Matrix<S>::identity(Index n, Representation rep) {
  if (rep == Representation::SparseMap) {
    SparseStorage entries;
    for (Index i = 0; i < n; ++i) entries.emplace(Key{i, i}, S(1));
    return Matrix(n, n, std::move(entries));
  }
  return Matrix(DenseStorage::Identity(n, n));
}

template <ExactScalar S>
Matrix<S> Matrix<S>::from_rows(const std::vector<std::vector<S>>& rows, Representation rep) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  DenseStorage dense(r, c);
  for (Index i = 0; i < r; ++i) {
    if (static_cast<Index>(rows[i].size()) != c) {
      throw DimensionError("from_rows", "rows of length " + std::to_string(c), i,
                           static_cast<Index>(rows[i].size()));
    }
    for (Index j = 0; j < c; ++j) dense(i, j) = rows[i][j];
  }
  Matrix m(std::move(dense));
  return rep == Representation::Dense ? m : convert(m, rep);
}

template <ExactScalar S>
S Matrix<S>::at(Index i, Index j) const {
  if (const auto* d = std::get_if<DenseStorage>(&payload_)) {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) {
      throw DimensionError("nth", "index inside " + shape_text(rows_, cols_), i, j);
    }
    return (*d)(i, j);
  }
  const auto& entries = sparse();
  auto it = entries.find(Key{i, j});
  return it == entries.end() ? S(0) : it->second;
}

template <ExactScalar S>
typename Matrix<S>::DenseStorage Matrix<S>::to_dense_storage() const {
  if (is_dense()) return dense();
  DenseStorage out = DenseStorage::Zero(rows_, cols_);
  for (const auto& [key, value] : sparse()) out(key.first, key.second) = value;
  return out;
}

template <ExactScalar S>
std::vector<S> Matrix<S>::row(Index i) const {
  if (i < 0 || i >= rows_) throw DimensionError("row", "row inside " + shape_text(rows_, cols_), i, 0);
  std::vector<S> out(static_cast<std::size_t>(cols_), S(0));
  if (is_dense()) {
    for (Index j = 0; j < cols_; ++j) out[static_cast<std::size_t>(j)] = dense()(i, j);
  } else {
    const auto& entries = sparse();
    for (auto it = entries.lower_bound(Key{i, 0}); it != entries.end() && it->first.first == i;
         ++it) {
      out[static_cast<std::size_t>(it->first.second)] = it->second;
    }
  }
  return out;
}

template <ExactScalar S>
std::size_t Matrix<S>::nonzeros() const {
  if (!is_dense()) return sparse().size();
  std::size_t count = 0;
  const auto& d = dense();
  for (Index i = 0; i < d.size(); ++i) {
    if (d.data()[i] != 0) ++count;
  }
  return count;
}

template <ExactScalar S>
Matrix<S> sub_matrix(const Matrix<S>& m, std::pair<Index, Index> origin,
                     std::pair<Index, Index> size) {
  const auto [i0, j0] = origin;
  const auto [r, c] = size;
  if (r < 0 || c < 0) throw DimensionError("sub_matrix", "nonnegative window", r, c);
  if (m.is_dense()) {
    if (i0 < 0 || j0 < 0 || i0 + r > m.rows() || j0 + c > m.cols()) {
      throw DimensionError("sub_matrix",
                           "window " + shape_text(r, c) + " at (" + std::to_string(i0) + "," +
                               std::to_string(j0) + ") inside",
                           m.rows(), m.cols());
    }
    return Matrix<S>(typename Matrix<S>::DenseStorage(m.dense().block(i0, j0, r, c)));
  }
  typename Matrix<S>::SparseStorage window;
  for (const auto& [key, value] : m.sparse()) {
    const Index di = key.first - i0;
    const Index dj = key.second - j0;
    if (di >= 0 && di < r && dj >= 0 && dj < c) window.emplace(typename Matrix<S>::Key{di, dj}, value);
  }
  return Matrix<S>(r, c, std::move(window));
}

template <ExactScalar S>
Matrix<S> convert(const Matrix<S>& m, Representation target) {
  if (m.representation() == target) return m;
  if (target == Representation::Dense) return Matrix<S>(m.to_dense_storage());
  typename Matrix<S>::SparseStorage entries;
  m.for_each_nonzero([&](Index i, Index j, const S& v) {
    entries.emplace(typename Matrix<S>::Key{i, j}, v);
  });
  return Matrix<S>(m.rows(), m.cols(), std::move(entries));
}

template <ExactScalar S>
S frobenius_dot(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("frobenius_dot", shape_text(a.rows(), a.cols()), b.rows(), b.cols());
  }
  if (a.is_dense() && b.is_dense()) return a.dense().cwiseProduct(b.dense()).sum();
  const Matrix<S>& sparse_side = a.is_dense() ? b : a;
  const Matrix<S>& other = a.is_dense() ? a : b;
  S acc = 0;
  sparse_side.for_each_nonzero([&](Index i, Index j, const S& v) { acc += v * other.at(i, j); });
  return acc;
}

template <ExactScalar S>
S max_element(const Matrix<S>& m) {
  if (m.rows() == 0 || m.cols() == 0) throw DimensionError("max_element", "nonempty matrix", m.rows(), m.cols());
  if (m.is_dense()) return m.dense().maxCoeff();
  // Absent entries are zeros, so they take part whenever the map is not full.
  const auto total = static_cast<std::size_t>(m.rows() * m.cols());
  bool first = m.sparse().size() == total;
  S best = 0;
  for (const auto& entry : m.sparse()) {
    if (first || entry.second > best) best = entry.second;
    first = false;
  }
  return best;
}

template class Matrix<Rational>;
template class Matrix<Integer>;
template Matrix<Rational> sub_matrix(const Matrix<Rational>&, std::pair<Index, Index>,
                                     std::pair<Index, Index>);
template Matrix<Integer> sub_matrix(const Matrix<Integer>&, std::pair<Index, Index>,
                                    std::pair<Index, Index>);
template Matrix<Rational> convert(const Matrix<Rational>&, Representation);
template Matrix<Integer> convert(const Matrix<Integer>&, Representation);
template Rational frobenius_dot(const Matrix<Rational>&, const Matrix<Rational>&);
template Integer frobenius_dot(const Matrix<Integer>&, const Matrix<Integer>&);
template Rational max_element(const Matrix<Rational>&);
template Integer max_element(const Matrix<Integer>&);

}  // namespace exactnn
