#include <doctest.h>

#include <set>

#include "heckenew/local_hecke.hpp"

using namespace heckenew;
using namespace heckenew::local;

namespace {

HeckeElement elem(std::vector<i64> c) { return {std::move(c)}; }

}  // namespace

TEST_CASE("coset model sizes and labels") {
  struct Case {
    i64 p;
    int n;
    std::size_t cosets;
  };
  for (auto [p, n, cosets] : {Case{2, 2, 6}, Case{3, 2, 12}, Case{2, 1, 3}, Case{2, 3, 12}, Case{5, 2, 30}}) {
    CosetModel m = build_coset_model({p, n});
    CHECK(m.right_cosets.size() == cosets);
    CHECK(m.left_cosets.size() == cosets);
    std::set<Label> labels(m.double_coset_label.begin(), m.double_coset_label.end());
    CHECK(labels.size() == static_cast<std::size_t>(n) + 1);
    std::vector<std::size_t> counts(n + 1, 0);
    for (auto l : m.double_coset_label) ++counts[l];
    CHECK(counts[0] == 1);
    CHECK(counts[1] == static_cast<std::size_t>(ipow(p, n)));
    for (int r = 1; r <= n - 1; ++r) CHECK(counts[1 + r] == static_cast<std::size_t>((p - 1) * ipow(p, n - r - 1)));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(build_coset_model({4, 1}), std::invalid_argument);
  CHECK_THROWS_AS(build_coset_model({2, 0}), std::invalid_argument);
  CHECK_THROWS_AS(build_coset_model({31, 3}), std::invalid_argument);
}

TEST_CASE("convolution examples") {
  CosetModel m22 = build_coset_model({2, 2});
  CHECK(convolve(m22.V(1), m22.V(1), m22) == m22.identity());
  CHECK(convolve(m22.U0(), m22.U0(), m22) == m22.U0() * 2 + (m22.identity() + m22.V(1)) * 4);
  for (Label l = 0; l < 3; ++l) CHECK(convolve(m22.identity(), m22.basis(l), m22) == m22.basis(l));

  CosetModel m32 = build_coset_model({3, 2});
  CHECK(convolve(m32.V(1), m32.V(1), m32) == elem({2, 0, 1}));
  CosetModel m23 = build_coset_model({2, 3});
  CHECK(convolve(m23.V(1), m23.V(2), m23) == m23.V(1));
}

TEST_CASE("convolve matches full group enumeration") {
  for (LocalParams params : {LocalParams{2, 2}, LocalParams{2, 3}, LocalParams{3, 2}, LocalParams{2, 1}, LocalParams{3, 1}}) {
    CosetModel m = build_coset_model(params);
    for (Label i = 0; i <= params.n; ++i)
      for (Label j = 0; j <= params.n; ++j)
        CHECK(convolve(m.basis(i), m.basis(j), m) == brute_force_convolve(m.basis(i), m.basis(j), params));
  }
  CosetModel m = build_coset_model({2, 2});
  CHECK(brute_force_convolve(m.zero(), m.U0(), {2, 2}).is_zero());
  CHECK_THROWS_AS(brute_force_convolve(elem({1, 0, 0}), elem({1, 0, 0}), {5, 2}), std::invalid_argument);
}

TEST_CASE("structure table is symmetric") {
  for (LocalParams params : {LocalParams{3, 2}, LocalParams{2, 4}, LocalParams{3, 3}}) {
    auto t = structure_table(build_coset_model(params));
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < t.size(); ++j) CHECK(t[i][j] == t[j][i]);
  }
}

TEST_CASE("local relations") {
  for (LocalParams params : {LocalParams{2, 2}, LocalParams{3, 2}, LocalParams{5, 2}, LocalParams{2, 3}, LocalParams{3, 3},
                             LocalParams{2, 4}, LocalParams{2, 1}, LocalParams{3, 1}, LocalParams{5, 1}, LocalParams{7, 1}}) {
    CAPTURE(params.p);
    CAPTURE(params.n);
    CheckReport r = verify_local_relations(params);
    CHECK(r.pass);
    CHECK(r.details["relations"].size() > 0);
  }
  CosetModel m = build_coset_model({2, 1});
  CHECK(convolve(m.U0(), m.U0(), m) == m.U0() + m.identity() * 2);
}

TEST_CASE("eigenvalue table") {
  for (LocalParams params : {LocalParams{2, 2}, LocalParams{3, 2}, LocalParams{5, 2}, LocalParams{2, 3}, LocalParams{3, 3}, LocalParams{2, 4}}) {
    auto got = eigenvector_table(params);
    auto want = expected_eigenvector_table(params);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].u0 == want[i].u0);
      CHECK(got[i].y == want[i].y);
      CHECK(got[i].v == want[i].v);
    }
  }
  auto t22 = eigenvector_table({2, 2});
  CHECK(t22[0].u0 == 4);
  auto t32 = eigenvector_table({3, 2});
  CHECK(t32[2].y[0] == 0);
  for (const auto& row : eigenvector_table({2, 3})) CHECK(row.y.back() == 1);
}

TEST_CASE("induced representation decomposition") {
  auto d32 = induced_decomposition({3, 2});
  std::vector<std::size_t> dims;
  for (const auto& c : d32.components) dims.push_back(c.dim);
  CHECK(dims == std::vector<std::size_t>{1, 3, 8});
  CHECK(d32.total_dim == 12);

  auto d23 = induced_decomposition({2, 3});
  dims.clear();
  for (const auto& c : d23.components) dims.push_back(c.dim);
  CHECK(dims == std::vector<std::size_t>{1, 2, 3, 6});

  for (LocalParams params : {LocalParams{2, 1}, LocalParams{3, 1}, LocalParams{2, 2}, LocalParams{3, 2}, LocalParams{5, 2},
                             LocalParams{2, 3}, LocalParams{3, 3}, LocalParams{2, 4}}) {
    auto d = induced_decomposition(params);
    CHECK(d.direct);
    CHECK(d.total_dim == static_cast<std::size_t>(params.index()));
    REQUIRE(d.solved_dims.size() == d.components.size());
    for (std::size_t i = 0; i < d.components.size(); ++i) {
      CHECK(d.components[i].dim == d.components[i].expected_dim);
      CHECK(d.solved_dims[i] == static_cast<long>(d.components[i].dim));
    }
    // The newest component: fixed by K0(p^n), not by K0(p^(n-1)).
    const Component& top = d.components.back();
    CHECK(top.fixed_dims[params.n] == 1);
    CHECK(top.fixed_dims[params.n - 1] == 0);
    // Each component has exactly one K0(p^n)-fixed line.
    for (const auto& c : d.components) CHECK(c.fixed_dims[params.n] == 1);
  }
}

TEST_CASE("pi_L traces") {
  for (LocalParams params : {LocalParams{2, 2}, LocalParams{3, 2}, LocalParams{2, 3}}) {
    CosetModel m = build_coset_model(params);
    CHECK(pi_L_trace(params, m.U0()) == 0);
    for (int r = 1; r < params.n; ++r) CHECK(pi_L_trace(params, m.V(r)) == 0);
    CHECK(pi_L_trace(params, m.identity()) == params.index());
  }
}

TEST_CASE("pi_L acts as a scalar on each component's fixed vector") {
  CosetModel m = build_coset_model({3, 2});
  auto M = pi_L_matrix(m, m.U0());
  HeckeElement v2 = m.U0() - m.Y(1) * 3;
  linalg::QVector phi(m.right_cosets.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = v2.coeffs[m.double_coset_label[i]];
  auto img = M * phi;
  for (std::size_t i = 0; i < phi.size(); ++i) CHECK(img[i] == -3 * phi[i]);
}
