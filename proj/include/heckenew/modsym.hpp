#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "heckenew/arith.hpp"
#include "heckenew/exact_linalg.hpp"
#include "heckenew/p1.hpp"
#include "heckenew/report.hpp"

namespace heckenew::modsym {

using linalg::QMatrix;
using linalg::QVector;
using linalg::Rational;
using linalg::Subspace;

struct IntMatrix2 {
  i64 a = 1, b = 0, c = 0, d = 1;

  i64 det() const { return a * d - b * c; }
  IntMatrix2 operator*(const IntMatrix2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  bool operator==(const IntMatrix2&) const = default;
};

// A cusp num/den in lowest terms with den >= 0; infinity is 1/0.
struct Cusp {
  i64 num = 1;
  i64 den = 0;
  static Cusp make(i64 num, i64 den);
  static Cusp infinity() { return {1, 0}; }
  bool operator==(const Cusp&) const = default;
};

// Homogeneous polynomial of degree `deg` in X, Y; coeffs[i] multiplies X^i Y^(deg-i).
struct Poly {
  std::vector<mpz_class> coeffs;
  static Poly monomial(int deg, int i);
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  // P(aX + bY, cX + dY).
  Poly substitute(i64 a, i64 b, i64 c, i64 d) const;
};

struct OperatorSpec {
  std::vector<std::pair<Rational, IntMatrix2>> terms;
  std::string description;

  void validate() const;
  std::size_t size() const { return terms.size(); }
};

// Lift (c:d) in P^1(Z/N) to a matrix of SL2(Z) with that bottom row mod N.
IntMatrix2 lift_to_sl2z(i64 c, i64 d, i64 n);

class ManinSpace {
 public:
  static constexpr int kFormatVersion = 1;

  ManinSpace(i64 level, int weight);

  i64 level() const { return level_; }
  int weight() const { return weight_; }
  int half_weight() const { return weight_ / 2; }
  const P1List& p1() const { return p1_; }

  std::size_t num_generators() const { return gen_to_free_.size(); }
  std::size_t ambient_dim() const { return free_.size(); }
  const std::vector<std::size_t>& free_generators() const { return free_; }
  const std::vector<Cusp>& cusps() const { return cusps_; }
  const QMatrix& boundary() const { return boundary_; }
  const Subspace& cuspidal() const { return cuspidal_; }
  std::size_t cuspidal_dim() const { return cuspidal_.dim(); }

  std::size_t generator_index(std::size_t p1_index, int monomial) const {
    return p1_index * static_cast<std::size_t>(weight_ - 1) + static_cast<std::size_t>(monomial);
  }
  // Ambient coordinates of a single Manin generator.
  const std::vector<std::pair<std::size_t, Rational>>& generator_image(std::size_t g) const { return gen_to_free_[g]; }
  IntMatrix2 generator_lift(std::size_t g) const;
  int generator_monomial(std::size_t g) const { return static_cast<int>(g % static_cast<std::size_t>(weight_ - 1)); }

  // Adds coeff * [P, (c:d)] to acc (ambient coordinates).
  void add_manin_symbol(const Poly& P, i64 c, i64 d, const Rational& coeff, QVector& acc) const;
  // Adds coeff * P{alpha, beta} to acc.
  void add_path(const Poly& P, const Cusp& alpha, const Cusp& beta, const Rational& coeff, QVector& acc) const;

  // Cuspidal coordinates of an ambient vector; throws if it is not cuspidal.
  QVector cuspidal_coordinates(const QVector& ambient) const;
  QVector cuspidal_basis_vector(std::size_t i) const { return cuspidal_.basis_vector(i); }

  std::size_t cusp_class(const Cusp& x) const;

  ojson to_json() const;
  static ManinSpace from_json(const ojson& j);

 private:
  ManinSpace(i64 level, int weight, bool);
  void build_relations();
  void build_boundary();
  void enumerate_cusps();

  i64 level_;
  int weight_;
  P1List p1_;
  std::vector<IntMatrix2> lifts_;
  std::vector<std::size_t> free_;
  std::vector<std::vector<std::pair<std::size_t, Rational>>> gen_to_free_;
  std::vector<Cusp> cusps_;
  QMatrix boundary_;
  Subspace cuspidal_;
};

ManinSpace build_manin_space(i64 level, int weight);

bool cusps_equivalent(const Cusp& x, const Cusp& y, i64 n);

// Ambient coordinates of X^(w-2){alpha, beta}, or of P{alpha, beta}.
QVector path_to_symbols(const ManinSpace& space, const Cusp& alpha, const Cusp& beta);
QVector path_to_symbols(const ManinSpace& space, const Poly& P, const Cusp& alpha, const Cusp& beta);

// Applies sum coeff_i * M_i (no translation scalar) from the Manin generators of `src`,
// reducing at `dst`. Columns are the cuspidal basis vectors of src; rows cuspidal coords of dst.
QMatrix apply_terms(const ManinSpace& src, const ManinSpace& dst,
                    const std::vector<std::pair<Rational, IntMatrix2>>& terms);

// Matrix of sum c_i det(M_i)^(1-k) M_i on cuspidal symbols (column convention).
QMatrix act(const ManinSpace& space, const OperatorSpec& spec);

OperatorSpec spec_T(i64 q);
OperatorSpec spec_U(i64 p);
QMatrix hecke_T(const ManinSpace& space, i64 q);
QMatrix hecke_U(const ManinSpace& space, i64 p);
QMatrix star_involution(const ManinSpace& space);

// Right coset representatives of Gamma0(N) in Gamma0(M).
std::vector<IntMatrix2> gamma0_coset_reps(i64 m, i64 n);
// Right coset representatives of Gamma0(M) cap Gamma^0(d) in Gamma0(M).
std::vector<IntMatrix2> upper_coset_reps(i64 m, i64 d);
i64 gamma0_index(i64 n);

// delta_e: cuspidal(N) -> cuspidal(M), path action of [e,0;0,1].
QMatrix degeneracy_down(const ManinSpace& space_n, const ManinSpace& space_m, i64 e);
// beta_d: cuspidal(M) -> cuspidal(N), transfer to level dM after [1,0;0,d] coset sum, then to N.
QMatrix degeneracy_up(const ManinSpace& space_m, const ManinSpace& space_n, i64 d);

i64 dim_formula_oracle(i64 n, int w);
i64 dim_new_oracle(i64 n, int w);
i64 cusp_count(i64 n);

}  // namespace heckenew::modsym
