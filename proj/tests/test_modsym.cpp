#include <doctest.h>

#include <random>

#include "heckenew/modsym.hpp"

using namespace heckenew;
using namespace heckenew::modsym;

namespace {

// a_p = p + 1 - #E(F_p) for y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with good reduction at p.
i64 curve_ap(i64 p, i64 a1, i64 a2, i64 a3, i64 a4, i64 a6) {
  i64 count = 1;
  for (i64 x = 0; x < p; ++x)
    for (i64 y = 0; y < p; ++y)
      if (mod(y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6), p) == 0) ++count;
  return p + 1 - count;
}

QMatrix scalar(std::size_t n, long s) { return QMatrix::identity(n).scaled(Rational(s)); }

bool is_zero_vector(const QVector& v) {
  for (const auto& x : v)
    if (sgn(x) != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("P1 enumeration") {
  CHECK(p1_list(4).size() == 6);
  CHECK(p1_list(1).size() == 1);
  for (i64 n = 1; n <= 60; ++n) CHECK(static_cast<i64>(p1_list(n).size()) == gamma0_index(n));
  CHECK(p1_normalize(2 * 4, 2 * 7, 15) == p1_normalize(4, 7, 15));
  P1List l(15);
  for (const auto& pt : l.points()) {
    CHECK(l.normalize(pt.c, pt.d) == pt);
    for (i64 u : {2, 4, 7, 8, 11, 13, 14}) CHECK(l.normalize(u * pt.c, u * pt.d) == pt);
  }
  CHECK_THROWS_AS(p1_normalize(3, 6, 15), std::invalid_argument);
}

TEST_CASE("lift to SL2(Z)") {
  for (i64 n : {1, 2, 6, 11, 12, 36, 144}) {
    P1List l(n);
    for (const auto& pt : l.points()) {
      IntMatrix2 g = lift_to_sl2z(pt.c, pt.d, n);
      CHECK(g.det() == 1);
      CHECK(mod(g.c - pt.c, n) == 0);
      CHECK(mod(g.d - pt.d, n) == 0);
    }
  }
}

TEST_CASE("dimension oracle spot values") {
  CHECK(dim_formula_oracle(11, 2) == 1);
  CHECK(dim_formula_oracle(22, 2) == 2);
  CHECK(dim_formula_oracle(37, 2) == 2);
  CHECK(dim_formula_oracle(1, 2) == 0);
  CHECK(dim_formula_oracle(1, 12) == 1);
  CHECK(dim_formula_oracle(1, 4) == 0);
  CHECK(dim_formula_oracle(5, 4) == 1);
  CHECK(dim_formula_oracle(23, 2) == 2);
  CHECK(dim_formula_oracle(33, 2) == 3);
  CHECK(dim_formula_oracle(49, 2) == 1);
  CHECK(dim_new_oracle(22, 2) == 0);
  CHECK(dim_new_oracle(33, 2) == 1);
  CHECK(dim_new_oracle(11, 2) == 1);
  CHECK(cusp_count(11) == 2);
  CHECK(cusp_count(4) == 3);
  CHECK(cusp_count(9) == 4);
  CHECK_THROWS_AS(dim_formula_oracle(11, 3), std::invalid_argument);
}

TEST_CASE("cuspidal dimension matches the oracle") {
  for (i64 n = 1; n <= 100; ++n) {
    CAPTURE(n);
    ManinSpace s(n, 2);
    CHECK(static_cast<i64>(s.cuspidal_dim()) == 2 * dim_formula_oracle(n, 2));
    CHECK(s.ambient_dim() + 1 == s.cuspidal_dim() + s.cusps().size());
  }
  for (i64 n = 1; n <= 40; ++n) {
    CAPTURE(n);
    ManinSpace s(n, 4);
    CHECK(static_cast<i64>(s.cuspidal_dim()) == 2 * dim_formula_oracle(n, 4));
    CHECK(s.ambient_dim() == s.cuspidal_dim() + s.cusps().size());
  }
  CHECK(ManinSpace(11, 2).cuspidal_dim() == 2);
  CHECK(ManinSpace(22, 2).cuspidal_dim() == 4);
  CHECK(ManinSpace(1, 2).cuspidal_dim() == 0);
  CHECK_THROWS_AS(ManinSpace(11, 3), std::invalid_argument);
  CHECK_THROWS_AS(ManinSpace(11, 0), std::invalid_argument);
}

TEST_CASE("paths") {
  ManinSpace s(11, 2);
  CHECK(is_zero_vector(path_to_symbols(s, Cusp::make(2, 7), Cusp::make(2, 7))));
  QVector gen(s.ambient_dim());
  for (const auto& [c, v] : s.generator_image(s.generator_index(s.p1().index(0, 1), 0))) gen[c] += v;
  CHECK(path_to_symbols(s, Cusp::make(0, 1), Cusp::infinity()) == gen);

  // Gamma0(11)-invariance and additivity, independent of the convergent expansion.
  IntMatrix2 g{1, 0, 11, 1};
  auto moved = [&](const Cusp& x) { return Cusp::make(g.a * x.num + g.b * x.den, g.c * x.num + g.d * x.den); };
  Cusp a = Cusp::make(0, 1), b = Cusp::make(1, 5), c = Cusp::make(2, 7);
  CHECK(path_to_symbols(s, a, b) == path_to_symbols(s, moved(a), moved(b)));
  QVector ab = path_to_symbols(s, a, b), bc = path_to_symbols(s, b, c), ac = path_to_symbols(s, a, c);
  for (std::size_t i = 0; i < ab.size(); ++i) CHECK(ab[i] + bc[i] == ac[i]);

  std::mt19937 rng(1);
  std::uniform_int_distribution<int> num(-40, 40), den(1, 40);
  for (i64 n : {11, 12, 30}) {
    for (int w : {2, 4}) {
      ManinSpace sp(n, w);
      Poly P = Poly::monomial(w - 2, 0);
      if (w == 4) P.coeffs = {3, -1, 2};
      for (int t = 0; t < 30; ++t) {
        Cusp x = Cusp::make(num(rng), den(rng)), y = Cusp::make(num(rng), den(rng)), z = Cusp::make(num(rng), den(rng));
        QVector xy = path_to_symbols(sp, P, x, y), yz = path_to_symbols(sp, P, y, z), xz = path_to_symbols(sp, P, x, z);
        for (std::size_t i = 0; i < xy.size(); ++i) CHECK(xy[i] + yz[i] == xz[i]);
        // gamma in Gamma0(N) moves the path and the polynomial together.
        IntMatrix2 gam{1, t, n, 1 + n * t};
        Poly gP = P.substitute(gam.d, -gam.b, -gam.c, gam.a);
        auto mv = [&](const Cusp& q) { return Cusp::make(gam.a * q.num + gam.b * q.den, gam.c * q.num + gam.d * q.den); };
        CHECK(path_to_symbols(sp, gP, mv(x), mv(y)) == xy);
      }
    }
  }
}

TEST_CASE("group elements act trivially") {
  for (auto [n, w] : {std::pair<i64, int>{11, 2}, {30, 2}, {13, 4}}) {
    ManinSpace s(n, w);
    OperatorSpec spec;
    spec.description = "gamma sum";
    spec.terms = {{Rational(1), IntMatrix2{1, 0, 0, 1}}, {Rational(1), IntMatrix2{1, 1, 0, 1}}, {Rational(1), IntMatrix2{1, 0, n, 1}},
                  {Rational(1), IntMatrix2{2 * n + 1, 1, 2 * n, 1}}};
    CHECK(act(s, spec) == scalar(s.cuspidal_dim(), 4));
    OperatorSpec id{{{Rational(1), IntMatrix2{}}}, "I"};
    CHECK(act(s, id) == QMatrix::identity(s.cuspidal_dim()));
  }
  OperatorSpec bad{{{Rational(1), IntMatrix2{0, 1, 1, 0}}}, "neg det"};
  CHECK_THROWS_AS(act(ManinSpace(11, 2), bad), std::invalid_argument);
}

TEST_CASE("Hecke eigenvalues against point counts") {
  ManinSpace s11(11, 2);
  // 11a: y^2 + y = x^3 - x^2 - 10x - 20
  for (i64 q : {2, 3, 5, 7, 13}) {
    i64 aq = curve_ap(q, 0, -1, 1, -10, -20);
    CHECK(hecke_T(s11, q) == scalar(2, aq));
  }
  QMatrix T2 = hecke_T(s11, 2);
  CHECK(T2(0, 0) + T2(1, 1) == -4);
  CHECK(hecke_T(s11, 2) * hecke_T(s11, 3) == hecke_T(s11, 3) * hecke_T(s11, 2));
  CHECK(hecke_U(s11, 11) == QMatrix::identity(2));
  CHECK_THROWS_AS(hecke_T(s11, 11), std::invalid_argument);
  CHECK_THROWS_AS(hecke_U(s11, 2), std::invalid_argument);

  // 37a: y^2 + y = x^3 - x has a_2 = -2; the other newform at 37 has a_2 = 0.
  ManinSpace s37(37, 2);
  CHECK(curve_ap(2, 0, 0, 1, -1, 0) == -2);
  QMatrix T2_37 = hecke_T(s37, 2);
  CHECK(linalg::eigenspace(T2_37, -2).dim() == 2);
  CHECK(linalg::eigenspace(T2_37, 0).dim() == 2);
  for (i64 q : {3, 5, 7}) {
    i64 aq = curve_ap(q, 0, 0, 1, -1, 0);
    auto e = linalg::eigenspace(T2_37, -2);
    CHECK(linalg::restrict_operator(hecke_T(s37, q), e) == scalar(2, aq));
  }
}

TEST_CASE("higher weight Hecke eigenvalues") {
  ManinSpace delta(1, 12);
  REQUIRE(delta.cuspidal_dim() == 2);
  CHECK(hecke_T(delta, 2) == scalar(2, -24));
  CHECK(hecke_T(delta, 3) == scalar(2, 252));
  ManinSpace s5(5, 4);
  REQUIRE(s5.cuspidal_dim() == 2);
  CHECK(hecke_T(s5, 2) == scalar(2, -4));
  CHECK(hecke_T(s5, 3) == scalar(2, 2));
}

TEST_CASE("star involution") {
  for (auto [n, w] : {std::pair<i64, int>{11, 2}, {37, 2}, {30, 2}, {14, 4}}) {
    ManinSpace s(n, w);
    QMatrix star = star_involution(s);
    CHECK(star * star == QMatrix::identity(s.cuspidal_dim()));
    for (i64 q : {2, 3, 5, 7}) {
      if (n % q == 0) {
        QMatrix U = hecke_U(s, q);
        CHECK(star * U == U * star);
      } else {
        QMatrix T = hecke_T(s, q);
        CHECK(star * T == T * star);
      }
    }
    CHECK(linalg::eigenspace(star, 1).dim() * 2 == s.cuspidal_dim());
  }
  CHECK(linalg::eigenspace(star_involution(ManinSpace(11, 2)), 1).dim() == 1);
}

TEST_CASE("coset representatives") {
  for (auto [m, n] : {std::pair<i64, i64>{1, 11}, {11, 22}, {3, 36}, {6, 144}}) {
    auto reps = gamma0_coset_reps(m, n);
    CHECK(static_cast<i64>(reps.size()) == gamma0_index(n) / gamma0_index(m));
    for (const auto& g : reps) {
      CHECK(g.det() == 1);
      CHECK(g.c % m == 0);
    }
  }
  for (auto [m, d] : {std::pair<i64, i64>{11, 2}, {1, 4}, {2, 2}, {5, 3}, {9, 3}, {2, 8}}) {
    auto reps = upper_coset_reps(m, d);
    CHECK(static_cast<i64>(reps.size()) == gamma0_index(m * d) / gamma0_index(m));
    for (const auto& g : reps) {
      CHECK(g.det() == 1);
      CHECK(g.c % m == 0);
    }
  }
  CHECK_THROWS_AS(gamma0_coset_reps(3, 10), std::invalid_argument);
}

TEST_CASE("degeneracy maps") {
  ManinSpace s11(11, 2), s22(22, 2), s33(33, 2), s3(3, 2);
  CHECK(degeneracy_down(s11, s11, 1) == QMatrix::identity(2));
  CHECK(degeneracy_up(s11, s11, 1) == QMatrix::identity(2));

  QMatrix k22 = linalg::vstack(degeneracy_down(s22, s11, 1), degeneracy_down(s22, s11, 2));
  CHECK(linalg::kernel(k22).dim() == 0);

  QMatrix k33 = linalg::vstack(degeneracy_down(s33, s11, 1), degeneracy_down(s33, s11, 3));
  CHECK(linalg::kernel(k33).dim() == 2);

  QMatrix b1 = degeneracy_up(s11, s22, 1), b2 = degeneracy_up(s11, s22, 2);
  CHECK(linalg::rank(b1) == 2);
  CHECK(linalg::rank(b2) == 2);
  CHECK(linalg::sum(linalg::column_space(b1), linalg::column_space(b2)).dim() == 4);

  CHECK_THROWS_AS(degeneracy_up(s11, s33, 2), std::invalid_argument);
  CHECK_THROWS_AS(degeneracy_down(s33, s11, 2), std::invalid_argument);
}

TEST_CASE("degeneracy maps are Hecke equivariant") {
  struct Case {
    i64 m, n;
    int w;
  };
  for (auto [m, n, w] : {Case{11, 22, 2}, Case{11, 33, 2}, Case{11, 44, 2}, Case{15, 30, 2}, Case{7, 14, 4}, Case{13, 26, 2}}) {
    ManinSpace sm(m, w), sn(n, w);
    for (i64 d : divisors(n / m)) {
      QMatrix beta = degeneracy_up(sm, sn, d);
      CHECK(linalg::rank(beta) == sm.cuspidal_dim());
      for (i64 e : divisors(n / m)) {
        QMatrix composite = degeneracy_down(sn, sm, e) * beta;
        for (i64 q : {5, 7, 17}) {
          if (n % q == 0) continue;
          QMatrix Tm = hecke_T(sm, q), Tn = hecke_T(sn, q);
          CHECK(Tn * beta == beta * Tm);
          CHECK(composite * Tm == Tm * composite);
        }
      }
    }
  }
}

TEST_CASE("space serialization round trip") {
  for (auto [n, w] : {std::pair<i64, int>{33, 2}, {14, 4}, {1, 2}}) {
    ManinSpace s(n, w);
    ManinSpace t = ManinSpace::from_json(s.to_json());
    CHECK(t.cuspidal() == s.cuspidal());
    CHECK(t.ambient_dim() == s.ambient_dim());
    CHECK(t.to_json().dump() == s.to_json().dump());
    if (s.cuspidal_dim() > 0 && n % 2 != 0) CHECK(hecke_T(t, 2) == hecke_T(s, 2));
  }
}
