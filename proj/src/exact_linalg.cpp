#include "heckenew/exact_linalg.hpp"

#include <algorithm>

namespace heckenew::linalg {

Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

QMatrix::QMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

QMatrix::QMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
    for (const auto& x : r) entries_.push_back(x);
  }
}

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QMatrix QMatrix::from_rows(const std::vector<QVector>& rows, std::size_t cols) {
  QMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument("from_rows: length mismatch");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

QMatrix QMatrix::from_columns(const std::vector<QVector>& cols, std::size_t rows) {
  QMatrix m(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != rows) throw std::invalid_argument("from_columns: length mismatch");
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
  }
  return m;
}

QVector QMatrix::row(std::size_t r) const {
  return QVector(entries_.begin() + r * cols_, entries_.begin() + (r + 1) * cols_);
}

QVector QMatrix::column(std::size_t c) const {
  QVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
  return v;
}

QMatrix QMatrix::transpose() const {
  QMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool QMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Rational& x) { return sgn(x) == 0; });
}

QMatrix QMatrix::operator*(const QMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("matrix product: dimension mismatch");
  QMatrix r(rows_, o.cols_);
  Rational t;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(i, k);
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        const Rational& b = o(k, j);
        if (sgn(b) == 0) continue;
        t = a * b;
        r(i, j) += t;
      }
    }
  return r;
}

QVector QMatrix::operator*(const QVector& v) const {
  if (cols_ != v.size()) throw std::invalid_argument("matrix-vector product: dimension mismatch");
  QVector r(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k)
      if (sgn((*this)(i, k)) != 0 && sgn(v[k]) != 0) r[i] += (*this)(i, k) * v[k];
  return r;
}

QMatrix QMatrix::operator+(const QMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix sum: dimension mismatch");
  QMatrix r(*this);
  for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] += o.entries_[i];
  return r;
}

QMatrix QMatrix::operator-(const QMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix difference: dimension mismatch");
  QMatrix r(*this);
  for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] -= o.entries_[i];
  return r;
}

QMatrix QMatrix::scaled(const Rational& s) const {
  QMatrix r(*this);
  for (auto& x : r.entries_) x *= s;
  return r;
}

bool QMatrix::operator==(const QMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
}

QMatrix vstack(const QMatrix& a, const QMatrix& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  if (a.cols() != b.cols()) throw std::invalid_argument("vstack: column mismatch");
  QMatrix r(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) r(a.rows() + i, j) = b(i, j);
  return r;
}

RrefResult rref(const QMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  // Clear denominators row by row, then run Bareiss on the integer matrix.
  std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    mpz_class l = 1;
    for (std::size_t j = 0; j < cols; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den_mpz_t());
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = m(i, j).get_num() * (l / m(i, j).get_den());
  }

  std::vector<std::size_t> pivots;
  mpz_class prev = 1, t;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t best = rows;
    for (std::size_t i = r; i < rows; ++i) {
      if (a[i][c] == 0) continue;
      if (best == rows || abs(a[i][c]) < abs(a[best][c])) best = i;
    }
    if (best == rows) continue;
    std::swap(a[r], a[best]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        t = a[r][c] * a[i][j] - a[i][c] * a[r][j];
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    pivots.push_back(c);
    ++r;
  }

  QMatrix out(rows, cols);
  for (std::size_t i = 0; i < r; ++i) {
    std::size_t pc = pivots[i];
    for (std::size_t j = pc; j < cols; ++j) {
      out(i, j) = Rational(a[i][j], a[i][pc]);
      out(i, j).canonicalize();
    }
  }
  for (std::size_t i = r; i-- > 0;) {
    std::size_t pc = pivots[i];
    for (std::size_t k = 0; k < i; ++k) {
      Rational f = out(k, pc);
      if (sgn(f) == 0) continue;
      for (std::size_t j = pc; j < cols; ++j)
        if (sgn(out(i, j)) != 0) out(k, j) -= f * out(i, j);
    }
  }
  return {std::move(out), std::move(pivots)};
}

std::size_t rank(const QMatrix& m) { return rref(m).pivots.size(); }

Subspace Subspace::zero(std::size_t ambient) {
  Subspace s;
  s.ambient_ = ambient;
  s.basis_ = QMatrix(0, ambient);
  return s;
}

Subspace Subspace::full(std::size_t ambient) { return span(QMatrix::identity(ambient)); }

Subspace Subspace::span(const QMatrix& rows) {
  Subspace s;
  s.ambient_ = rows.cols();
  RrefResult r = rref(rows);
  s.pivots_ = r.pivots;
  s.basis_ = QMatrix(r.pivots.size(), rows.cols());
  for (std::size_t i = 0; i < r.pivots.size(); ++i)
    for (std::size_t j = 0; j < rows.cols(); ++j) s.basis_(i, j) = r.matrix(i, j);
  return s;
}

Subspace Subspace::span(std::size_t ambient, const std::vector<QVector>& vectors) {
  if (vectors.empty()) return zero(ambient);
  return span(QMatrix::from_rows(vectors, ambient));
}

std::optional<QVector> Subspace::coordinates(const QVector& v) const {
  if (v.size() != ambient_) throw std::invalid_argument("coordinates: ambient mismatch");
  QVector coords(dim());
  QVector rest = v;
  for (std::size_t i = 0; i < dim(); ++i) {
    coords[i] = rest[pivots_[i]];
    if (sgn(coords[i]) == 0) continue;
    for (std::size_t j = 0; j < ambient_; ++j)
      if (sgn(basis_(i, j)) != 0) rest[j] -= coords[i] * basis_(i, j);
  }
  for (const auto& x : rest)
    if (sgn(x) != 0) return std::nullopt;
  return coords;
}

bool Subspace::contains(const QVector& v) const { return coordinates(v).has_value(); }

bool Subspace::operator==(const Subspace& o) const {
  return ambient_ == o.ambient_ && basis_ == o.basis_;
}

Subspace kernel(const QMatrix& m) {
  RrefResult r = rref(m);
  const std::size_t cols = m.cols();
  std::vector<bool> is_pivot(cols, false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<QVector> vecs;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    QVector v(cols);
    v[f] = 1;
    for (std::size_t i = 0; i < r.pivots.size(); ++i) v[r.pivots[i]] = -r.matrix(i, f);
    vecs.push_back(std::move(v));
  }
  return Subspace::span(cols, vecs);
}

Subspace eigenspace(const QMatrix& op, const Rational& lambda) {
  if (!op.square()) throw std::invalid_argument("eigenspace: operator not square");
  QMatrix shifted(op);
  for (std::size_t i = 0; i < op.rows(); ++i) shifted(i, i) -= lambda;
  return kernel(shifted);
}

namespace {

void require_same_ambient(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("subspace ambient dimension mismatch");
}

// Rows spanning the annihilator of s under the standard pairing.
QMatrix normals(const Subspace& s) { return kernel(s.basis()).basis(); }

}  // namespace

Subspace intersect(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b);
  QMatrix stacked = vstack(normals(a), normals(b));
  if (stacked.rows() == 0) return Subspace::full(a.ambient_dim());
  return kernel(stacked);
}

Subspace sum(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b);
  if (a.dim() == 0) return b;
  if (b.dim() == 0) return a;
  return Subspace::span(vstack(a.basis(), b.basis()));
}

bool contains(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b);
  for (std::size_t i = 0; i < b.dim(); ++i)
    if (!a.contains(b.basis_vector(i))) return false;
  return true;
}

bool equal(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b);
  return contains(a, b) && contains(b, a);
}

Subspace subspace_ops(const Subspace& a, const Subspace& b, SubspaceOp kind) {
  switch (kind) {
    case SubspaceOp::intersect:
      return intersect(a, b);
    case SubspaceOp::sum:
      return sum(a, b);
    case SubspaceOp::equal:
      return equal(a, b) ? Subspace::full(a.ambient_dim()) : Subspace::zero(a.ambient_dim());
    case SubspaceOp::contains:
      return contains(a, b) ? Subspace::full(a.ambient_dim()) : Subspace::zero(a.ambient_dim());
  }
  throw std::logic_error("unknown subspace op");
}

Subspace image(const QMatrix& op, const Subspace& s) {
  if (op.cols() != s.ambient_dim()) throw std::invalid_argument("image: dimension mismatch");
  std::vector<QVector> vecs;
  for (std::size_t i = 0; i < s.dim(); ++i) vecs.push_back(op * s.basis_vector(i));
  return Subspace::span(op.rows(), vecs);
}

Subspace column_space(const QMatrix& m) { return Subspace::span(m.transpose()); }

QMatrix restrict_operator(const QMatrix& op, const Subspace& s) {
  if (!op.square() || op.rows() != s.ambient_dim())
    throw std::invalid_argument("restrict_operator: dimension mismatch");
  QMatrix r(s.dim(), s.dim());
  for (std::size_t j = 0; j < s.dim(); ++j) {
    auto coords = s.coordinates(op * s.basis_vector(j));
    if (!coords) throw NotInvariantError("operator does not preserve the subspace (not invariant)");
    for (std::size_t i = 0; i < s.dim(); ++i) r(i, j) = (*coords)[i];
  }
  return r;
}

std::vector<QVector> symmetric_difference_witness(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b);
  std::vector<QVector> out;
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (!b.contains(a.basis_vector(i))) out.push_back(a.basis_vector(i));
  for (std::size_t i = 0; i < b.dim(); ++i)
    if (!a.contains(b.basis_vector(i))) out.push_back(b.basis_vector(i));
  return out;
}

}  // namespace heckenew::linalg
