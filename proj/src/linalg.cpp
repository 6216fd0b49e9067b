// Copyright 2026 The xsetspir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xspir/linalg.hpp"

#include <numeric>
#include <sstream>
#include <utility>

#include "xspir/errors.hpp"

namespace xspir {
namespace {

void check_same_field(const FieldMatrix& a, const FieldMatrix& b) {
  if (&a.field() != &b.field()) throw Error("mixed-field operands");
}

struct Echelon {
  FieldMatrix m;
  std::vector<std::size_t> pivots;
};

// Reduced row echelon form; pivot columns are recorded in order.
Echelon rref(FieldMatrix m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t sel = row;
    while (sel < m.rows() && m(sel, col).is_zero()) ++sel;
    if (sel == m.rows()) continue;
    if (sel != row) {
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(sel, c), m(row, c));
    }
    const FieldElement scale = m(row, col).inv();
    for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= scale;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col).is_zero()) continue;
      const FieldElement factor = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c) m(r, c) -= factor * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(m), std::move(pivots)};
}

}  // namespace

FieldMatrix::FieldMatrix(const GaloisField& field, std::size_t rows, std::size_t cols)
    : field_(&field), rows_(rows), cols_(cols), data_(rows * cols, field.zero()) {}

FieldMatrix::FieldMatrix(const GaloisField& field, std::size_t rows, std::size_t cols,
                         std::vector<FieldElement> entries)
    : field_(&field), rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) throw Error("matrix entry count does not match shape");
  for (const auto& e : data_) {
    if (&e.field() != field_) throw Error("mixed-field operands");
  }
}

FieldMatrix FieldMatrix::identity(const GaloisField& field, std::size_t n) {
  FieldMatrix m(field, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = field.one();
  return m;
}

FieldMatrix FieldMatrix::diag(std::span<const FieldElement> d) {
  if (d.empty()) throw Error("diag of empty vector");
  FieldMatrix m(d.front().field(), d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

FieldMatrix FieldMatrix::from_ints(const GaloisField& field,
                                   const std::vector<std::vector<long>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.front().size() : 0;
  FieldMatrix m(field, r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw Error("ragged matrix literal");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = field.from_int(rows[i][j]);
  }
  return m;
}

FieldMatrix FieldMatrix::transpose() const {
  FieldMatrix t(*field_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

FieldMatrix FieldMatrix::columns(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw Error("column range out of bounds");
  FieldMatrix out(*field_, rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
  return out;
}

FieldMatrix FieldMatrix::select_rows(std::span<const std::size_t> idx) const {
  FieldMatrix out(*field_, idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= rows_) throw Error("row index out of bounds");
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(idx[i], j);
  }
  return out;
}

bool FieldMatrix::is_zero() const {
  for (const auto& e : data_)
    if (!e.is_zero()) return false;
  return true;
}

FieldMatrix FieldMatrix::operator+(const FieldMatrix& o) const {
  check_same_field(*this, o);
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("dimension mismatch in matrix add");
  FieldMatrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += o.data_[i];
  return out;
}

FieldMatrix FieldMatrix::operator-(const FieldMatrix& o) const {
  check_same_field(*this, o);
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("dimension mismatch in matrix sub");
  FieldMatrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= o.data_[i];
  return out;
}

bool operator==(const FieldMatrix& a, const FieldMatrix& b) {
  return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

std::string FieldMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << (*this)(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b) {
  check_same_field(a, b);
  if (a.cols() != b.rows()) {
    throw Error("dimension mismatch: " + std::to_string(a.rows()) + "x" +
                std::to_string(a.cols()) + " times " + std::to_string(b.rows()) + "x" +
                std::to_string(b.cols()));
  }
  const auto& f = a.field();
  FieldMatrix out(f, a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const auto aik = a(i, k).index();
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        const auto prod = f.mul(aik, b(k, j).index());
        out(i, j) = FieldElement(f, f.add(out(i, j).index(), prod));
      }
    }
  }
  return out;
}

FieldVector mat_vec(const FieldMatrix& a, std::span<const FieldElement> x) {
  if (a.cols() != x.size()) throw Error("dimension mismatch in matrix-vector product");
  const auto& f = a.field();
  FieldVector out(a.rows(), f.zero());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::uint32_t acc = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (&x[j].field() != &f) throw Error("mixed-field operands");
      acc = f.add(acc, f.mul(a(i, j).index(), x[j].index()));
    }
    out[i] = FieldElement(f, acc);
  }
  return out;
}

std::size_t rank(const FieldMatrix& a) { return rref(a).pivots.size(); }

FieldMatrix invert(const FieldMatrix& a) {
  if (a.rows() != a.cols()) throw Error("invert requires a square matrix");
  const std::size_t n = a.rows();
  auto e = rref(hstack(a, FieldMatrix::identity(a.field(), n)));
  std::size_t r = 0;
  while (r < e.pivots.size() && e.pivots[r] < n) ++r;
  if (r < n) throw SingularMatrixError(r, n);
  return e.m.columns(n, n);
}

FieldVector solve(const FieldMatrix& a, std::span<const FieldElement> y) {
  if (a.rows() != a.cols()) throw Error("solve requires a square matrix");
  if (y.size() != a.rows()) throw Error("dimension mismatch in solve");
  FieldMatrix rhs(a.field(), y.size(), 1);
  for (std::size_t i = 0; i < y.size(); ++i) rhs(i, 0) = y[i];
  auto e = rref(hstack(a, rhs));
  std::size_t r = 0;
  while (r < e.pivots.size() && e.pivots[r] < a.cols()) ++r;
  if (r < a.rows()) throw SingularMatrixError(r, a.rows());
  FieldVector x(a.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) x[i] = e.m(i, a.cols());
  return x;
}

FieldMatrix left_null_space(const FieldMatrix& a) {
  // Null space of a^T read off its reduced echelon form: one basis vector per
  // free column.
  auto t = rref(a.transpose());
  const std::size_t k = a.rows() - t.pivots.size();
  FieldMatrix out(a.field(), k, a.rows());
  std::vector<bool> is_pivot(a.rows(), false);
  for (auto p : t.pivots) is_pivot[p] = true;
  std::size_t row = 0;
  for (std::size_t free = 0; free < a.rows(); ++free) {
    if (is_pivot[free]) continue;
    out(row, free) = a.field().one();
    for (std::size_t pr = 0; pr < t.pivots.size(); ++pr) {
      out(row, t.pivots[pr]) = -t.m(pr, free);
    }
    ++row;
  }
  return out;
}

FieldMatrix hstack(const FieldMatrix& a, const FieldMatrix& b) {
  check_same_field(a, b);
  if (a.rows() != b.rows()) throw Error("dimension mismatch in hstack");
  FieldMatrix out(a.field(), a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
  }
  return out;
}

FieldMatrix block_diag(const FieldMatrix& a, const FieldMatrix& b) {
  check_same_field(a, b);
  FieldMatrix out(a.field(), a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, a.cols() + j) = b(i, j);
  return out;
}

EvalPoints::EvalPoints(FieldVector alpha, FieldVector f)
    : alpha_(std::move(alpha)), f_(std::move(f)) {
  if (alpha_.empty()) throw ConfigError("points.alpha-nonempty", "need at least one alpha");
  const auto* field = &alpha_.front().field();
  for (const auto& x : alpha_)
    if (&x.field() != field) throw Error("mixed-field operands");
  for (const auto& x : f_)
    if (&x.field() != field) throw Error("mixed-field operands");
  for (std::size_t i = 0; i < alpha_.size(); ++i)
    for (std::size_t j = i + 1; j < alpha_.size(); ++j)
      if (alpha_[i] == alpha_[j])
        throw ConfigError("points.alpha-distinct", "repeated alpha " + alpha_[i].to_string());
  for (std::size_t i = 0; i < f_.size(); ++i) {
    for (std::size_t j = i + 1; j < f_.size(); ++j)
      if (f_[i] == f_[j])
        throw ConfigError("points.f-distinct", "repeated f " + f_[i].to_string());
    for (const auto& a : alpha_)
      if (a == f_[i])
        throw ConfigError("points.f-not-alpha", "f coincides with alpha " + a.to_string());
  }
}

EvalPoints EvalPoints::defaults(const GaloisField& field, std::size_t n, std::size_t l) {
  if (n + l > field.order()) {
    throw ConfigError("field.order-sufficient",
                      "q = " + std::to_string(field.order()) + " < N + L = " +
                          std::to_string(n + l));
  }
  FieldVector pool;
  for (std::uint32_t i = 1; i < field.order(); ++i) pool.push_back(field.element(i));
  pool.push_back(field.zero());
  FieldVector alpha(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
  FieldVector f(pool.begin() + static_cast<std::ptrdiff_t>(n),
                pool.begin() + static_cast<std::ptrdiff_t>(n + l));
  return EvalPoints(std::move(alpha), std::move(f));
}

FieldVector EvalPoints::gamma() const {
  FieldVector g;
  g.reserve(alpha_.size());
  for (const auto& a : alpha_) {
    FieldElement prod = a.field().one();
    for (const auto& fi : f_) prod *= fi - a;
    g.push_back(prod);
  }
  return g;
}

FieldMatrix build_B(const EvalPoints& points) {
  const std::size_t n = points.n();
  const std::size_t l = points.l();
  if (l > n) throw ConfigError("points.dimensions", "L exceeds N");
  const auto gamma = points.gamma();
  FieldMatrix b(points.field(), n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& a = points.alpha()[r];
    for (std::size_t j = 0; j < l; ++j) b(r, j) = gamma[r] * (points.f()[j] - a).inv();
    FieldElement power = a.field().one();
    for (std::size_t j = l; j < n; ++j) {
      b(r, j) = gamma[r] * power;
      power *= a;
    }
  }
  return b;
}

FieldMatrix build_D(const EvalPoints& points, std::span<const FieldElement> beta,
                    std::size_t l) {
  const std::size_t n = points.n();
  if (beta.size() != n) throw Error("beta must have N entries");
  if (l > points.l()) throw ConfigError("points.dimensions", "L exceeds number of f points");
  if (l > (n + 1) / 2) {
    throw ConfigError("qcsa.L-half", "L = " + std::to_string(l) + " exceeds ceil(N/2)");
  }
  for (const auto& b : beta)
    if (b.is_zero()) throw ConfigError("qcsa.beta-nonzero", "zero beta entry");
  FieldMatrix d(points.field(), n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = points.alpha()[i];
    for (std::size_t j = 0; j < l; ++j) d(i, j) = beta[i] * (points.f()[j] - a).inv();
    FieldElement power = a.field().one();
    for (std::size_t j = l; j < n; ++j) {
      d(i, j) = beta[i] * power;
      power *= a;
    }
  }
  return d;
}

}  // namespace xspir
