#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace heckenew::linalg {

using Rational = mpq_class;
using QVector = std::vector<Rational>;

Rational make_rational(long num, long den = 1);
std::string to_string(const Rational& q);

class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols);
  QMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

  static QMatrix identity(std::size_t n);
  static QMatrix from_rows(const std::vector<QVector>& rows, std::size_t cols);
  static QMatrix from_columns(const std::vector<QVector>& cols, std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  QVector row(std::size_t r) const;
  QVector column(std::size_t c) const;
  const std::vector<Rational>& entries() const { return entries_; }

  QMatrix transpose() const;
  bool is_zero() const;

  QMatrix operator*(const QMatrix& o) const;
  QVector operator*(const QVector& v) const;
  QMatrix operator+(const QMatrix& o) const;
  QMatrix operator-(const QMatrix& o) const;
  QMatrix scaled(const Rational& s) const;
  bool operator==(const QMatrix& o) const;
  bool operator!=(const QMatrix& o) const { return !(*this == o); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> entries_;
};

QMatrix vstack(const QMatrix& a, const QMatrix& b);

struct RrefResult {
  QMatrix matrix;
  std::vector<std::size_t> pivots;
};

// Full-size RREF; zero rows are kept at the bottom.
RrefResult rref(const QMatrix& m);
std::size_t rank(const QMatrix& m);

class Subspace {
 public:
  Subspace() = default;
  static Subspace zero(std::size_t ambient);
  static Subspace full(std::size_t ambient);
  // Row span of `rows` (any number of rows, possibly dependent).
  static Subspace span(const QMatrix& rows);
  static Subspace span(std::size_t ambient, const std::vector<QVector>& vectors);

  std::size_t ambient_dim() const { return ambient_; }
  std::size_t dim() const { return basis_.rows(); }
  const QMatrix& basis() const { return basis_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  QVector basis_vector(std::size_t i) const { return basis_.row(i); }

  bool contains(const QVector& v) const;
  // Coordinates in the RREF basis, or nullopt if v is outside.
  std::optional<QVector> coordinates(const QVector& v) const;

  bool operator==(const Subspace& o) const;
  bool operator!=(const Subspace& o) const { return !(*this == o); }

 private:
  std::size_t ambient_ = 0;
  QMatrix basis_;
  std::vector<std::size_t> pivots_;
};

class NotInvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Subspace kernel(const QMatrix& m);
Subspace eigenspace(const QMatrix& op, const Rational& lambda);

Subspace intersect(const Subspace& a, const Subspace& b);
Subspace sum(const Subspace& a, const Subspace& b);
bool equal(const Subspace& a, const Subspace& b);
// True iff b is contained in a.
bool contains(const Subspace& a, const Subspace& b);

enum class SubspaceOp { intersect, sum, equal, contains };
// Dispatching form; boolean results come back as full/zero subspaces of the ambient space.
Subspace subspace_ops(const Subspace& a, const Subspace& b, SubspaceOp kind);

// Image of s under a matrix acting on column vectors.
Subspace image(const QMatrix& op, const Subspace& s);
Subspace column_space(const QMatrix& m);

// Matrix of op on the basis of s (column convention); throws NotInvariantError.
QMatrix restrict_operator(const QMatrix& op, const Subspace& s);

// Vectors from the bases of a and b that are missing from the other.
std::vector<QVector> symmetric_difference_witness(const Subspace& a, const Subspace& b);

}  // namespace heckenew::linalg
