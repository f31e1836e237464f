#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "heckenew/arith.hpp"
#include "heckenew/exact_linalg.hpp"
#include "heckenew/p1.hpp"
#include "heckenew/report.hpp"

namespace heckenew::local {

struct LocalParams {
  i64 p = 2;
  int n = 1;
  i64 modulus() const { return ipow(p, n); }
  i64 index() const { return ipow(p, n - 1) * (p + 1); }
  void validate() const;
};

struct ResidueMatrix {
  i64 a, b, c, d;
  i64 m;

  i64 det() const;
  ResidueMatrix operator*(const ResidueMatrix& o) const;
  ResidueMatrix inverse() const;
};

ResidueMatrix x_elem(i64 t, i64 m);
ResidueMatrix y_elem(i64 t, i64 m);
ResidueMatrix w_elem(i64 t, i64 m);
ResidueMatrix d_elem(i64 t, i64 m);

// Labels: 0 = identity class (X_1), 1 = w(1) class (U0), 1 + r = y(p^r) class (V_r).
using Label = int;

// Coefficient vector over (X_1, U0, V_1, ..., V_{n-1}).
struct HeckeElement {
  std::vector<i64> coeffs;

  HeckeElement operator+(const HeckeElement& o) const;
  HeckeElement operator-(const HeckeElement& o) const;
  HeckeElement operator*(i64 s) const;
  bool operator==(const HeckeElement& o) const = default;
  bool is_zero() const;
  std::string to_string() const;
};

struct CosetModel {
  LocalParams params;
  P1List points;
  std::vector<ResidueMatrix> right_cosets;
  std::vector<ResidueMatrix> left_cosets;
  std::vector<Label> double_coset_label;

  std::size_t num_classes() const { return static_cast<std::size_t>(params.n) + 1; }
  Label classify(const ResidueMatrix& g) const;
  ResidueMatrix class_representative(Label l) const;

  HeckeElement zero() const;
  HeckeElement basis(Label l) const;
  HeckeElement identity() const { return basis(0); }
  HeckeElement U0() const { return basis(1); }
  HeckeElement V(int r) const;
  HeckeElement Y(int r) const;
};

// Bound on [K : K0] accepted by build_coset_model.
constexpr i64 kMaxCosets = 1000;
// Bound on |GL2(Z/p^n)| accepted by brute_force_convolve.
constexpr i64 kMaxGroupOrder = 20000;

CosetModel build_coset_model(const LocalParams& params);

HeckeElement convolve(const HeckeElement& f, const HeckeElement& g, const CosetModel& model);
HeckeElement brute_force_convolve(const HeckeElement& f, const HeckeElement& g, const LocalParams& params);

std::vector<std::vector<HeckeElement>> structure_table(const CosetModel& model);

CheckReport verify_local_relations(const LocalParams& params);

struct EigenRow {
  std::string name;
  HeckeElement vector;
  i64 u0 = 0;
  std::vector<i64> y;  // Y_1..Y_n
  std::vector<i64> v;  // V_1..V_{n-1}
};

// Computed by convolution; throws if a listed vector is not an eigenvector.
std::vector<EigenRow> eigenvector_table(const LocalParams& params);
// The closed-form table, evaluated at (p, n).
std::vector<EigenRow> expected_eigenvector_table(const LocalParams& params);

struct Component {
  std::string name;
  std::size_t dim = 0;
  std::size_t expected_dim = 0;
  std::vector<std::size_t> fixed_dims;  // K0(p^m)-fixed dimension for m = 0..n
};

struct Decomposition {
  std::vector<Component> components;
  std::size_t total_dim = 0;
  bool direct = false;
  std::vector<linalg::Rational> solved_dims;  // from the trace system
};

Decomposition induced_decomposition(const LocalParams& params);

// Matrix of pi_L(f) on I(n) in the coset basis.
linalg::QMatrix pi_L_matrix(const CosetModel& model, const HeckeElement& f);
i64 pi_L_trace(const LocalParams& params, const HeckeElement& f);

ojson eigen_table_to_json(const LocalParams& params, const std::vector<EigenRow>& rows);
ojson decomposition_to_json(const LocalParams& params, const Decomposition& d);

}  // namespace heckenew::local
