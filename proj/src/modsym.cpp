#include "heckenew/modsym.hpp"

#include <map>
#include <stdexcept>

namespace heckenew::modsym {

Cusp Cusp::make(i64 num, i64 den) {
  if (den == 0) {
    if (num == 0) throw std::invalid_argument("0/0 is not a cusp");
    return infinity();
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i64 g = gcd(num, den);
  return {num / g, den / g};
}

Poly Poly::monomial(int deg, int i) {
  Poly p;
  p.coeffs.assign(static_cast<std::size_t>(deg) + 1, 0);
  p.coeffs[static_cast<std::size_t>(i)] = 1;
  return p;
}

namespace {

// Coefficients (index = power of X) of (aX + bY)^e for e = 0..deg.
std::vector<std::vector<mpz_class>> linear_powers(i64 a, i64 b, int deg) {
  std::vector<std::vector<mpz_class>> out{{mpz_class(1)}};
  for (int e = 1; e <= deg; ++e) {
    const auto& prev = out.back();
    std::vector<mpz_class> next(static_cast<std::size_t>(e) + 1);
    for (std::size_t i = 0; i < prev.size(); ++i) {
      if (prev[i] == 0) continue;
      next[i + 1] += prev[i] * a;
      next[i] += prev[i] * b;
    }
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace

Poly Poly::substitute(i64 a, i64 b, i64 c, i64 d) const {
  const int deg = degree();
  if (deg == 0) return *this;
  auto first = linear_powers(a, b, deg), second = linear_powers(c, d, deg);
  Poly out;
  out.coeffs.assign(coeffs.size(), 0);
  for (int i = 0; i <= deg; ++i) {
    if (coeffs[i] == 0) continue;
    const auto& f = first[i];
    const auto& s = second[deg - i];
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (f[x] == 0) continue;
      for (std::size_t y = 0; y < s.size(); ++y)
        if (s[y] != 0) out.coeffs[x + y] += coeffs[i] * f[x] * s[y];
    }
  }
  return out;
}

void OperatorSpec::validate() const {
  if (terms.empty()) throw std::invalid_argument("operator spec has no terms");
  for (const auto& [c, m] : terms)
    if (m.det() <= 0) throw std::invalid_argument("operator spec matrix must have positive determinant");
}

IntMatrix2 lift_to_sl2z(i64 c, i64 d, i64 n) {
  c = mod(c, n);
  d = mod(d, n);
  if (gcd(gcd(c, d), n) != 1) throw std::invalid_argument("lift_to_sl2z: gcd(c, d, N) != 1");
  if (n == 1) return {1, 0, 0, 1};
  if (c == 0 && d == 1) return {1, 0, 0, 1};
  if (c == 0 && d == n - 1) return {-1, 0, 0, -1};
  if (c == 0) c = n;
  for (int t = 0; t < 1000000; ++t, d += n) {
    if (gcd(c, d) != 1) continue;
    i64 x, y;
    xgcd(d, c, x, y);
    return {x, -y, c, d};
  }
  throw std::logic_error("lift_to_sl2z: search failed");
}

bool cusps_equivalent(const Cusp& x, const Cusp& y, i64 n) {
  // x = a1/c1, y = a2/c2: equivalent iff c2 = s c1 (mod N) and s a2 = a1 (mod gcd(c1, N)) for a unit s.
  i64 a1 = x.num, c1 = x.den, a2 = y.num, c2 = y.den;
  i64 g = gcd(c1, n);
  for (i64 s = 1; s <= n; ++s) {
    if (gcd(s, n) != 1) continue;
    if (mod(c2 - s * c1, n) != 0) continue;
    if (mod(s * a2 - a1, g) == 0) return true;
  }
  return false;
}

ManinSpace::ManinSpace(i64 level, int weight, bool) : level_(level), weight_(weight), p1_(level) {
  if (level < 1) throw std::invalid_argument("level must be positive");
  if (weight < 2 || weight % 2 != 0) throw std::invalid_argument("weight must be even and at least 2");
  for (const auto& pt : p1_.points()) lifts_.push_back(lift_to_sl2z(pt.c, pt.d, level_));
}

ManinSpace::ManinSpace(i64 level, int weight) : ManinSpace(level, weight, true) {
  build_relations();
  enumerate_cusps();
  build_boundary();
  cuspidal_ = linalg::kernel(boundary_);
}

IntMatrix2 ManinSpace::generator_lift(std::size_t g) const {
  return lifts_[g / static_cast<std::size_t>(weight_ - 1)];
}

namespace {

using SparseRow = std::map<std::size_t, Rational>;

void add_to(SparseRow& row, std::size_t col, const Rational& v) {
  if (sgn(v) == 0) return;
  auto [it, inserted] = row.emplace(col, v);
  if (!inserted) {
    it->second += v;
    if (sgn(it->second) == 0) row.erase(it);
  }
}

void axpy(SparseRow& row, const Rational& f, const SparseRow& other) {
  for (const auto& [c, v] : other) add_to(row, c, f * v);
}

}  // namespace

void ManinSpace::build_relations() {
  const int deg = weight_ - 2;
  const std::size_t G = p1_.size() * static_cast<std::size_t>(weight_ - 1);
  const IntMatrix2 sigma{0, -1, 1, 0}, tau{0, -1, 1, -1}, tau2 = tau * tau;

  auto add_term = [&](SparseRow& row, std::size_t t, int i, const IntMatrix2& m) {
    const auto& pt = p1_.point(t);
    Poly P = Poly::monomial(deg, i).substitute(m.a, m.b, m.c, m.d);
    std::size_t u = p1_.index(pt.c * m.a + pt.d * m.c, pt.c * m.b + pt.d * m.d);
    for (int j = 0; j <= deg; ++j)
      if (P.coeffs[j] != 0) add_to(row, generator_index(u, j), Rational(P.coeffs[j]));
  };

  std::vector<SparseRow> relations;
  for (std::size_t t = 0; t < p1_.size(); ++t)
    for (int i = 0; i <= deg; ++i) {
      SparseRow s2;
      add_term(s2, t, i, IntMatrix2{});
      add_term(s2, t, i, sigma);
      relations.push_back(std::move(s2));
      SparseRow s3;
      add_term(s3, t, i, IntMatrix2{});
      add_term(s3, t, i, tau);
      add_term(s3, t, i, tau2);
      relations.push_back(std::move(s3));
    }

  // Sparse elimination: pivot rows are reduced against earlier pivots on insertion,
  // then fully back-substituted.
  std::vector<SparseRow> pivots;
  std::vector<std::size_t> pivot_col;
  std::vector<int> row_of_col(G, -1);
  for (auto& rel : relations) {
    for (std::size_t k = 0; k < pivots.size() && !rel.empty(); ++k) {
      auto it = rel.find(pivot_col[k]);
      if (it == rel.end()) continue;
      Rational f = -it->second;
      axpy(rel, f, pivots[k]);
    }
    if (rel.empty()) continue;
    std::size_t col = rel.rbegin()->first;
    Rational inv = 1 / rel[col];
    for (auto& [c, v] : rel) v *= inv;
    row_of_col[col] = static_cast<int>(pivots.size());
    pivot_col.push_back(col);
    pivots.push_back(std::move(rel));
  }
  for (std::size_t k = pivots.size(); k-- > 0;) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [c, v] : pivots[k]) {
        if (c == pivot_col[k] || row_of_col[c] < 0) continue;
        Rational f = -v;
        axpy(pivots[k], f, pivots[static_cast<std::size_t>(row_of_col[c])]);
        changed = true;
        break;
      }
    }
  }

  std::vector<std::size_t> free_index(G, 0);
  for (std::size_t g = 0; g < G; ++g)
    if (row_of_col[g] < 0) {
      free_index[g] = free_.size();
      free_.push_back(g);
    }
  gen_to_free_.assign(G, {});
  for (std::size_t g = 0; g < G; ++g) {
    if (row_of_col[g] < 0) {
      gen_to_free_[g] = {{free_index[g], Rational(1)}};
      continue;
    }
    for (const auto& [c, v] : pivots[static_cast<std::size_t>(row_of_col[g])])
      if (c != g) gen_to_free_[g].emplace_back(free_index[c], -v);
  }
}

void ManinSpace::enumerate_cusps() {
  for (i64 c : divisors(level_))
    for (i64 a = 0; a < level_; ++a) {
      if (gcd(a, c) != 1) continue;
      Cusp x = Cusp::make(a, c);
      bool seen = false;
      for (const auto& y : cusps_)
        if (cusps_equivalent(x, y, level_)) {
          seen = true;
          break;
        }
      if (!seen) cusps_.push_back(x);
    }
  if (static_cast<i64>(cusps_.size()) != cusp_count(level_)) throw std::logic_error("cusp enumeration count mismatch");
}

std::size_t ManinSpace::cusp_class(const Cusp& x) const {
  for (std::size_t i = 0; i < cusps_.size(); ++i)
    if (cusps_equivalent(x, cusps_[i], level_)) return i;
  throw std::logic_error("cusp not found among class representatives");
}

void ManinSpace::build_boundary() {
  boundary_ = QMatrix(cusps_.size(), free_.size());
  const int deg = weight_ - 2;
  for (std::size_t j = 0; j < free_.size(); ++j) {
    std::size_t g = free_[j];
    int i = generator_monomial(g);
    IntMatrix2 m = generator_lift(g);
    if (i == deg) boundary_(cusp_class(Cusp::make(m.a, m.c)), j) += 1;
    if (i == 0) boundary_(cusp_class(Cusp::make(m.b, m.d)), j) -= 1;
  }
}

void ManinSpace::add_manin_symbol(const Poly& P, i64 c, i64 d, const Rational& coeff, QVector& acc) const {
  std::size_t t = p1_.index(c, d);
  for (int i = 0; i <= P.degree(); ++i) {
    if (P.coeffs[i] == 0) continue;
    Rational f = coeff * P.coeffs[i];
    for (const auto& [col, v] : gen_to_free_[generator_index(t, i)]) acc[col] += f * v;
  }
}

namespace {

void add_path_from_infinity(const ManinSpace& s, const Poly& P, const Cusp& r, const Rational& coeff, QVector& acc) {
  if (r.den == 0) return;
  // Convergents of r; each consecutive pair is unimodular.
  i64 u = r.num, v = r.den;
  i64 p_prev = 1, q_prev = 0, p_prev2 = 0, q_prev2 = 1;
  while (v != 0) {
    i64 a = u / v;
    if ((u % v != 0) && ((u < 0) != (v < 0))) --a;
    i64 rem = u - a * v;
    i64 p_cur = a * p_prev + p_prev2, q_cur = a * q_prev + q_prev2;
    i64 eps = p_cur * q_prev - p_prev * q_cur;
    Poly Q = P.substitute(eps * p_cur, p_prev, eps * q_cur, q_prev);
    s.add_manin_symbol(Q, eps * q_cur, q_prev, coeff, acc);
    p_prev2 = p_prev;
    q_prev2 = q_prev;
    p_prev = p_cur;
    q_prev = q_cur;
    u = v;
    v = rem;
  }
}

}  // namespace

void ManinSpace::add_path(const Poly& P, const Cusp& alpha, const Cusp& beta, const Rational& coeff, QVector& acc) const {
  if (alpha == beta) return;
  add_path_from_infinity(*this, P, beta, coeff, acc);
  add_path_from_infinity(*this, P, alpha, -coeff, acc);
}

QVector ManinSpace::cuspidal_coordinates(const QVector& ambient) const {
  auto c = cuspidal_.coordinates(ambient);
  if (!c) throw linalg::NotInvariantError("result leaves cuspidal subspace");
  return *c;
}

ojson ManinSpace::to_json() const {
  ojson j;
  j["schema"] = "heckenew.space/1";
  j["format_version"] = kFormatVersion;
  j["level"] = level_;
  j["weight"] = weight_;
  j["free"] = free_;
  ojson rel = ojson::array();
  for (const auto& row : gen_to_free_) {
    ojson r = ojson::array();
    for (const auto& [c, v] : row) r.push_back(ojson::array({c, v.get_str()}));
    rel.push_back(std::move(r));
  }
  j["generator_images"] = std::move(rel);
  ojson cusps = ojson::array();
  for (const auto& c : cusps_) cusps.push_back(ojson::array({c.num, c.den}));
  j["cusps"] = std::move(cusps);
  auto matrix_json = [](const QMatrix& m) {
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      ojson r = ojson::array();
      for (std::size_t k = 0; k < m.cols(); ++k) r.push_back(m(i, k).get_str());
      rows.push_back(std::move(r));
    }
    return rows;
  };
  j["boundary"] = matrix_json(boundary_);
  j["cuspidal_basis"] = matrix_json(cuspidal_.basis());
  return j;
}

ManinSpace ManinSpace::from_json(const ojson& j) {
  if (j.at("format_version").get<int>() != kFormatVersion) throw std::runtime_error("space cache format version mismatch");
  ManinSpace s(j.at("level").get<i64>(), j.at("weight").get<int>(), true);
  s.free_ = j.at("free").get<std::vector<std::size_t>>();
  for (const auto& row : j.at("generator_images")) {
    std::vector<std::pair<std::size_t, Rational>> r;
    for (const auto& e : row) r.emplace_back(e.at(0).get<std::size_t>(), Rational(e.at(1).get<std::string>()));
    s.gen_to_free_.push_back(std::move(r));
  }
  if (s.gen_to_free_.size() != s.p1_.size() * static_cast<std::size_t>(s.weight_ - 1))
    throw std::runtime_error("space cache generator count mismatch");
  for (const auto& c : j.at("cusps")) s.cusps_.push_back({c.at(0).get<i64>(), c.at(1).get<i64>()});
  auto read_matrix = [](const ojson& rows, std::size_t cols) {
    QMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t k = 0; k < cols; ++k) {
        m(i, k) = Rational(rows.at(i).at(k).get<std::string>());
        m(i, k).canonicalize();
      }
    return m;
  };
  s.boundary_ = read_matrix(j.at("boundary"), s.free_.size());
  QMatrix basis = read_matrix(j.at("cuspidal_basis"), s.free_.size());
  s.cuspidal_ = basis.rows() == 0 ? Subspace::zero(s.free_.size()) : Subspace::span(basis);
  if (s.cuspidal_.dim() != basis.rows()) throw std::runtime_error("space cache cuspidal basis is degenerate");
  return s;
}

ManinSpace build_manin_space(i64 level, int weight) { return ManinSpace(level, weight); }

QVector path_to_symbols(const ManinSpace& space, const Poly& P, const Cusp& alpha, const Cusp& beta) {
  QVector acc(space.ambient_dim());
  space.add_path(P, alpha, beta, Rational(1), acc);
  return acc;
}

QVector path_to_symbols(const ManinSpace& space, const Cusp& alpha, const Cusp& beta) {
  return path_to_symbols(space, Poly::monomial(space.weight() - 2, space.weight() - 2), alpha, beta);
}

QMatrix apply_terms(const ManinSpace& src, const ManinSpace& dst, const std::vector<std::pair<Rational, IntMatrix2>>& terms) {
  if (src.weight() != dst.weight()) throw std::invalid_argument("apply_terms: weight mismatch");
  const int deg = src.weight() - 2;
  const std::size_t n_src = src.cuspidal_dim();
  QMatrix out(dst.cuspidal_dim(), n_src);
  if (n_src == 0) return out;

  std::vector<QVector> images(src.ambient_dim());
  std::vector<bool> have(src.ambient_dim(), false);
  auto image_of = [&](std::size_t j) -> const QVector& {
    if (have[j]) return images[j];
    std::size_t g = src.free_generators()[j];
    int i = src.generator_monomial(g);
    IntMatrix2 lift = src.generator_lift(g);
    QVector acc(dst.ambient_dim());
    for (const auto& [coeff, h] : terms) {
      IntMatrix2 m = h * lift;
      Poly P = Poly::monomial(deg, i).substitute(m.d, -m.b, -m.c, m.a);
      dst.add_path(P, Cusp::make(m.b, m.d), Cusp::make(m.a, m.c), coeff, acc);
    }
    images[j] = std::move(acc);
    have[j] = true;
    return images[j];
  };

  for (std::size_t col = 0; col < n_src; ++col) {
    QVector b = src.cuspidal_basis_vector(col);
    QVector acc(dst.ambient_dim());
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (sgn(b[j]) == 0) continue;
      const QVector& im = image_of(j);
      for (std::size_t k = 0; k < im.size(); ++k)
        if (sgn(im[k]) != 0) acc[k] += b[j] * im[k];
    }
    QVector coords = dst.cuspidal_coordinates(acc);
    for (std::size_t r = 0; r < coords.size(); ++r) out(r, col) = coords[r];
  }
  return out;
}

QMatrix act(const ManinSpace& space, const OperatorSpec& spec) {
  spec.validate();
  std::vector<std::pair<Rational, IntMatrix2>> scaled;
  for (const auto& [c, m] : spec.terms) {
    mpz_class denom;
    mpz_ui_pow_ui(denom.get_mpz_t(), static_cast<unsigned long>(m.det()), static_cast<unsigned long>(space.half_weight() - 1));
    Rational s(c / Rational(denom));
    scaled.emplace_back(s, m);
  }
  return apply_terms(space, space, scaled);
}

OperatorSpec spec_U(i64 p) {
  OperatorSpec s;
  s.description = "U_" + std::to_string(p);
  for (i64 t = 0; t < p; ++t) s.terms.emplace_back(Rational(1), IntMatrix2{1, t, 0, p});
  return s;
}

OperatorSpec spec_T(i64 q) {
  OperatorSpec s = spec_U(q);
  s.description = "T_" + std::to_string(q);
  s.terms.emplace_back(Rational(1), IntMatrix2{q, 0, 0, 1});
  return s;
}

QMatrix hecke_T(const ManinSpace& space, i64 q) {
  if (!is_prime(q) || space.level() % q == 0) throw std::invalid_argument("T_q needs a prime q not dividing N");
  return apply_terms(space, space, spec_T(q).terms);
}

QMatrix hecke_U(const ManinSpace& space, i64 p) {
  if (!is_prime(p) || space.level() % p != 0) throw std::invalid_argument("U_p needs a prime p dividing N");
  return apply_terms(space, space, spec_U(p).terms);
}

QMatrix star_involution(const ManinSpace& space) {
  return apply_terms(space, space, {{Rational(1), IntMatrix2{-1, 0, 0, 1}}});
}

i64 gamma0_index(i64 n) {
  i64 r = n;
  for (i64 p : prime_divisors(n)) r = r / p * (p + 1);
  return r;
}

std::vector<IntMatrix2> gamma0_coset_reps(i64 m, i64 n) {
  if (m < 1 || n % m != 0) throw std::invalid_argument("gamma0_coset_reps: M must divide N");
  std::vector<IntMatrix2> reps;
  const P1List points(n);
  for (const auto& pt : points.points())
    if (pt.c % m == 0) reps.push_back(lift_to_sl2z(pt.c, pt.d, n));
  if (static_cast<i64>(reps.size()) != gamma0_index(n) / gamma0_index(m)) throw std::logic_error("coset count mismatch");
  return reps;
}

std::vector<IntMatrix2> upper_coset_reps(i64 m, i64 d) {
  if (m < 1 || d < 1) throw std::invalid_argument("upper_coset_reps: bad arguments");
  std::vector<IntMatrix2> reps;
  const i64 shared = gcd(m, d);
  const P1List points(d);
  for (const auto& pt : points.points()) {
    if (gcd(pt.c, shared) != 1) continue;
    bool found = false;
    for (i64 s = 0; s < 2000 && !found; ++s)
      for (i64 t = 0; t < 2000 && !found; ++t) {
        i64 a = pt.c + d * s, b = pt.d + d * t;
        if (gcd(a, b) != 1 || gcd(a, m) != 1) continue;
        i64 x, y;
        if (xgcd(a, b * m, x, y) != 1) continue;
        reps.push_back({a, b, -y * m, x});
        found = true;
      }
    if (!found) throw std::logic_error("upper_coset_reps: no lift found");
  }
  if (static_cast<i64>(reps.size()) != gamma0_index(d * m) / gamma0_index(m)) throw std::logic_error("coset count mismatch");
  return reps;
}

QMatrix degeneracy_down(const ManinSpace& space_n, const ManinSpace& space_m, i64 e) {
  const i64 n = space_n.level(), m = space_m.level();
  if (n % m != 0 || e < 1 || (n / m) % e != 0) throw std::invalid_argument("degeneracy_down: divisibility violated");
  return apply_terms(space_n, space_m, {{Rational(1), IntMatrix2{e, 0, 0, 1}}});
}

QMatrix degeneracy_up(const ManinSpace& space_m, const ManinSpace& space_n, i64 d) {
  const i64 n = space_n.level(), m = space_m.level();
  if (n % m != 0 || d < 1 || (n / m) % d != 0) throw std::invalid_argument("degeneracy_up: divisibility violated");
  const IntMatrix2 alpha{1, 0, 0, d};
  std::vector<std::pair<Rational, IntMatrix2>> terms;
  for (const auto& outer : gamma0_coset_reps(d * m, n))
    for (const auto& inner : upper_coset_reps(m, d)) terms.emplace_back(Rational(1), outer * alpha * inner);
  return apply_terms(space_m, space_n, terms);
}

i64 cusp_count(i64 n) {
  i64 c = 0;
  for (i64 d : divisors(n)) c += euler_phi(gcd(d, n / d));
  return c;
}

i64 dim_formula_oracle(i64 n, int w) {
  if (w < 2 || w % 2 != 0) throw std::invalid_argument("weight must be even and at least 2");
  i64 mu = gamma0_index(n);
  i64 nu2 = 1, nu3 = 1;
  if (n % 4 == 0) nu2 = 0;
  else
    for (i64 p : prime_divisors(n)) nu2 *= 1 + kronecker(-4, p);
  if (n % 9 == 0) nu3 = 0;
  else
    for (i64 p : prime_divisors(n)) nu3 *= 1 + kronecker(-3, p);
  i64 c = cusp_count(n);
  i64 twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * c;
  if (twelve_g % 12 != 0) throw std::logic_error("genus formula is not integral");
  i64 g = twelve_g / 12;
  if (w == 2) return g;
  return (w - 1) * (g - 1) + (w / 2 - 1) * c + nu2 * (w / 4) + nu3 * (w / 3);
}

i64 dim_new_oracle(i64 n, int w) {
  i64 total = dim_formula_oracle(n, w);
  for (i64 m : divisors(n)) {
    if (m == n) continue;
    total -= static_cast<i64>(divisors(n / m).size()) * dim_new_oracle(m, w);
  }
  return total;
}

}  // namespace heckenew::modsym
