#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "heckenew/modsym.hpp"
#include "heckenew/report.hpp"
#include "heckenew/space_cache.hpp"

namespace heckenew::newform {

using linalg::QMatrix;
using linalg::Rational;
using linalg::Subspace;
using modsym::IntMatrix2;
using modsym::ManinSpace;
using modsym::OperatorSpec;

struct AtkinLehnerParams {
  i64 level = 1;
  i64 q = 1;  // p^n exactly dividing level
  i64 p = 1;
  int n = 0;
  i64 beta = 0;
  i64 gamma = 0;

  // Smallest nonnegative beta with q*beta = 1 mod level/q.
  static AtkinLehnerParams make(i64 level, i64 q);
  // Explicit beta; gamma is derived and the determinant condition checked.
  static AtkinLehnerParams make(i64 level, i64 q, i64 beta);

  IntMatrix2 matrix() const { return {q * beta, 1, level * gamma, q}; }
};

// [a, b; p^j M, p^(n-j) - s M] in SL2(Z).
IntMatrix2 coset_matrix_A(i64 s, int j, i64 p, int n, i64 m);

// Matrix on cuspidal symbols, column convention. The symbol matrix of a form
// operator is its transpose, so compositions multiply in reverse.
struct OperatorHandle {
  std::string name;
  i64 level = 1;
  int weight = 2;
  ojson params = ojson::object();
  QMatrix matrix;
  std::size_t terms = 0;  // matrix terms of the underlying spec, 0 for composites

  std::size_t dim() const { return matrix.rows(); }
};

// Form operator outer o inner (inner applied first).
OperatorHandle compose(const OperatorHandle& outer, const OperatorHandle& inner, const std::string& name);

enum class QVariant { Qp, Qp_prime, Qpn, Qp2, Qp2_prime };

OperatorSpec spec_W(i64 level, i64 q);
OperatorSpec spec_Utilde(i64 p);
OperatorSpec spec_L(i64 level, i64 p, int j);
OperatorSpec spec_S(i64 level, i64 p, int r);

OperatorHandle build_W(const ManinSpace& space, i64 q);
OperatorHandle build_W(const ManinSpace& space, const AtkinLehnerParams& al);
OperatorHandle build_Utilde(const ManinSpace& space, i64 p);
OperatorHandle build_Q(const ManinSpace& space, i64 p, QVariant variant);
OperatorHandle build_L(const ManinSpace& space, i64 p, int j);
OperatorHandle build_S(const ManinSpace& space, i64 p, int r, bool primed);
OperatorHandle build_Rp_squared(const ManinSpace& space, i64 p);
OperatorHandle build_Rchi_squared(const ManinSpace& space);
OperatorHandle build_T(const ManinSpace& space, i64 q);

// Exponent of p in n, and n / p^exponent.
std::pair<int, i64> split_prime(i64 n, i64 p);

Subspace new_symbol_space(SpaceCache& cache, i64 level, int weight);
Subspace old_summand(SpaceCache& cache, i64 level, int weight, i64 m, i64 d);
// New-symbol dimension from cuspidal dimensions of all divisor levels.
i64 new_dim_bookkeeping(SpaceCache& cache, i64 level, int weight);

struct CheckOptions {
  bool star_plus = false;  // restrict both sides to the +1 eigenspace of star
};

enum class Theorem { T1, T2, T2prime, T3, T5 };

std::string theorem_name(Theorem t);
bool theorem_applies(Theorem t, i64 level);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

CheckReport check_theorem(SpaceCache& cache, i64 level, int weight, Theorem which, const CheckOptions& opts = {});
std::vector<CheckReport> check_lemma_suite(SpaceCache& cache, i64 level, int weight);
std::vector<CheckReport> check_section6(SpaceCache& cache, i64 level, int weight, const CheckOptions& opts = {});
// Polynomial identities, W^2 = I, cross-prime commutativity.
std::vector<CheckReport> check_operator_identities(SpaceCache& cache, i64 level, int weight);
// Old summands plus the new space reconstruct the cuspidal space as a direct sum.
CheckReport check_old_decomposition(SpaceCache& cache, i64 level, int weight);

}  // namespace heckenew::newform
