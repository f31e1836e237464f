#include "heckenew/newform_ops.hpp"

#include <map>
#include <stdexcept>

namespace heckenew::newform {

using linalg::column_space;
using linalg::eigenspace;
using linalg::image;
using linalg::intersect;
using linalg::kernel;
using linalg::QVector;
using modsym::degeneracy_up;

namespace {

Rational rpow(i64 base, int e) {
  mpz_class b;
  mpz_ui_pow_ui(b.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational(1) / Rational(b) : Rational(b);
}

QMatrix power(const QMatrix& m, int e) {
  QMatrix out = QMatrix::identity(m.rows());
  for (int i = 0; i < e; ++i) out = out * m;
  return out;
}

QMatrix shift(const QMatrix& m, const Rational& lambda) { return m - QMatrix::identity(m.rows()).scaled(lambda); }

// Exact prime power q = p^n with q | level and gcd(q, level / q) = 1.
std::pair<i64, int> exact_prime_power(i64 level, i64 q) {
  if (q < 2 || level % q != 0) throw std::invalid_argument("q must be an exact prime-power divisor of N");
  auto f = factor(q);
  if (f.size() != 1 || gcd(q, level / q) != 1) throw std::invalid_argument("q must be an exact prime-power divisor of N");
  return f.front();
}

OperatorHandle handle(const ManinSpace& space, std::string name, ojson params, QMatrix m, std::size_t terms) {
  OperatorHandle h;
  h.name = std::move(name);
  h.level = space.level();
  h.weight = space.weight();
  h.params = std::move(params);
  h.matrix = std::move(m);
  h.terms = terms;
  return h;
}

ojson inputs_json(i64 level, int weight, const std::vector<i64>& primes) {
  ojson j;
  j["N"] = level;
  j["w"] = weight;
  j["primes"] = primes;
  return j;
}

CheckReport subspace_report(std::string id, ojson inputs, const Subspace& lhs, const Subspace& rhs) {
  CheckReport r;
  r.id = std::move(id);
  r.inputs = std::move(inputs);
  r.lhs_dim = lhs.dim();
  r.rhs_dim = rhs.dim();
  r.pass = linalg::equal(lhs, rhs);
  if (!r.pass) r.witness = linalg::symmetric_difference_witness(lhs, rhs);
  return r;
}

// Passes when `big` contains `small`.
CheckReport containment_report(std::string id, ojson inputs, const Subspace& big, const Subspace& small) {
  CheckReport r;
  r.id = std::move(id);
  r.inputs = std::move(inputs);
  r.lhs_dim = small.dim();
  r.rhs_dim = big.dim();
  r.pass = linalg::contains(big, small);
  if (!r.pass)
    for (std::size_t i = 0; i < small.dim(); ++i)
      if (!big.contains(small.basis_vector(i))) {
        r.witness.push_back(small.basis_vector(i));
        break;
      }
  return r;
}

CheckReport matrix_report(std::string id, ojson inputs, const QMatrix& a, const QMatrix& b) {
  CheckReport r;
  r.id = std::move(id);
  r.inputs = std::move(inputs);
  r.lhs_dim = a.cols();
  r.rhs_dim = b.cols();
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    r.pass = false;
    r.details["error"] = "shape mismatch";
    return r;
  }
  r.pass = a == b;
  if (!r.pass) {
    QMatrix diff = a - b;
    for (std::size_t c = 0; c < diff.cols(); ++c) {
      QVector col = diff.column(c);
      bool zero = true;
      for (const auto& x : col) zero = zero && sgn(x) == 0;
      if (!zero) {
        r.witness.push_back(std::move(col));
        break;
      }
    }
  }
  return r;
}

CheckReport zero_report(std::string id, ojson inputs, const QMatrix& a) {
  return matrix_report(std::move(id), std::move(inputs), a, QMatrix(a.rows(), a.cols()));
}

Subspace star_plus_space(const ManinSpace& space) { return eigenspace(modsym::star_involution(space), Rational(1)); }

i64 smallest_prime_not_dividing(i64 n) {
  for (i64 q = 2;; ++q)
    if (is_prime(q) && n % q != 0) return q;
}

}  // namespace

AtkinLehnerParams AtkinLehnerParams::make(i64 level, i64 q) {
  auto [p, n] = exact_prime_power(level, q);
  const i64 mq = level / q;
  AtkinLehnerParams al{level, q, p, n, 0, -1};
  if (mq > 1) {
    al.beta = inverse_mod(mod(q, mq), mq);
    al.gamma = (q * al.beta - 1) / mq;
  }
  return al;
}

AtkinLehnerParams AtkinLehnerParams::make(i64 level, i64 q, i64 beta) {
  auto [p, n] = exact_prime_power(level, q);
  const i64 mq = level / q;
  if ((q * beta - 1) % mq != 0) throw std::invalid_argument("beta does not satisfy q*beta = 1 mod N/q");
  AtkinLehnerParams al{level, q, p, n, beta, (q * beta - 1) / mq};
  if (al.matrix().det() != q) throw std::logic_error("Atkin-Lehner matrix has wrong determinant");
  return al;
}

IntMatrix2 coset_matrix_A(i64 s, int j, i64 p, int n, i64 m) {
  if (!is_prime(p) || j < 1 || j > n - 1 || m < 1 || gcd(p, m) != 1 || gcd(s, p) != 1)
    throw std::invalid_argument("coset_matrix_A: parameters out of range");
  const i64 f = ipow(p, j) * m;
  const i64 e = ipow(p, n - j) - s * m;
  i64 a = inverse_mod(mod(e, f), f);
  if (e < 0 && a != 0) a -= f;
  const i64 num = a * e - 1;
  if (num % f != 0) throw std::logic_error("coset_matrix_A: no integral solution");
  IntMatrix2 out{a, num / f, f, e};
  if (out.det() != 1) throw std::logic_error("coset_matrix_A: determinant is not 1");
  return out;
}

OperatorHandle compose(const OperatorHandle& outer, const OperatorHandle& inner, const std::string& name) {
  if (outer.level != inner.level || outer.weight != inner.weight) throw std::invalid_argument("compose: level or weight mismatch");
  OperatorHandle h;
  h.name = name;
  h.level = outer.level;
  h.weight = outer.weight;
  h.params["outer"] = outer.name;
  h.params["inner"] = inner.name;
  h.matrix = inner.matrix * outer.matrix;
  return h;
}

std::pair<int, i64> split_prime(i64 n, i64 p) {
  int e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return {e, n};
}

OperatorSpec spec_W(i64 level, i64 q) {
  OperatorSpec s;
  s.description = "W_" + std::to_string(q);
  s.terms.emplace_back(Rational(1), AtkinLehnerParams::make(level, q).matrix());
  return s;
}

OperatorSpec spec_Utilde(i64 p) {
  OperatorSpec s = modsym::spec_U(p);
  s.description = "Utilde_" + std::to_string(p);
  return s;
}

OperatorSpec spec_L(i64 level, i64 p, int j) {
  auto [n, m] = split_prime(level, p);
  if (!is_prime(p) || n < 2 || j < 1 || j > n - 1) throw std::invalid_argument("L_j needs p^n || N with n >= 2 and 1 <= j <= n-1");
  OperatorSpec s;
  s.description = "L_" + std::to_string(j);
  const i64 mod_s = ipow(p, n - j);
  for (i64 u = 1; u < mod_s; ++u)
    if (u % p != 0) s.terms.emplace_back(Rational(1), coset_matrix_A(u, j, p, n, m));
  return s;
}

OperatorSpec spec_S(i64 level, i64 p, int r) {
  auto [n, m] = split_prime(level, p);
  if (!is_prime(p) || n < 2 || r < 1 || r > n) throw std::invalid_argument("S_{p^n,r} needs p^n || N with n >= 2 and 1 <= r <= n");
  OperatorSpec s;
  s.description = "S_" + std::to_string(ipow(p, n)) + "," + std::to_string(r);
  s.terms.emplace_back(Rational(1), IntMatrix2{1, 0, 0, 1});
  for (int j = r; j <= n - 1; ++j)
    for (auto& t : spec_L(level, p, j).terms) s.terms.push_back(t);
  return s;
}

OperatorHandle build_W(const ManinSpace& space, const AtkinLehnerParams& al) {
  if (al.level != space.level()) throw std::invalid_argument("build_W: level mismatch");
  OperatorSpec s;
  s.description = "W_" + std::to_string(al.q);
  s.terms.emplace_back(Rational(1), al.matrix());
  ojson params;
  params["q"] = al.q;
  params["beta"] = al.beta;
  params["gamma"] = al.gamma;
  return handle(space, "W_Q", params, modsym::act(space, s), 1);
}

OperatorHandle build_W(const ManinSpace& space, i64 q) { return build_W(space, AtkinLehnerParams::make(space.level(), q)); }

OperatorHandle build_Utilde(const ManinSpace& space, i64 p) {
  if (!is_prime(p) || space.level() % p != 0) throw std::invalid_argument("Utilde_p needs a prime p dividing N");
  OperatorSpec s = spec_Utilde(p);
  return handle(space, "Utilde_p", ojson{{"p", p}}, modsym::act(space, s), s.size());
}

OperatorHandle build_Q(const ManinSpace& space, i64 p, QVariant variant) {
  const i64 level = space.level();
  if (!is_prime(p)) throw std::invalid_argument("Q needs a prime p");
  auto [n, m] = split_prime(level, p);
  (void)m;
  const bool single = variant == QVariant::Qp || variant == QVariant::Qp_prime;
  if (single && n != 1) throw std::invalid_argument("Q_p needs p || N");
  if (!single && n < 2) throw std::invalid_argument("Q_{p^n} needs p^n || N with n >= 2");
  if ((variant == QVariant::Qp2 || variant == QVariant::Qp2_prime) && n != 2) throw std::invalid_argument("Q_{p^2} needs p^2 || N");

  const i64 q = ipow(p, n);
  OperatorHandle w = build_W(space, q);
  OperatorHandle u = build_Utilde(space, p);
  // Form operator Utilde^n o W: symbol matrix W * Utilde^n.
  QMatrix mq = w.matrix * power(u.matrix, n);
  const bool primed = variant == QVariant::Qp_prime || variant == QVariant::Qp2_prime;
  if (primed) mq = w.matrix * mq * w.matrix;
  static const char* names[] = {"Q_p", "Q_p_prime", "Q_pn", "Q_pn", "Q_pn_prime"};
  ojson params{{"p", p}, {"n", n}};
  return handle(space, names[static_cast<int>(variant)], params, std::move(mq), 0);
}

OperatorHandle build_L(const ManinSpace& space, i64 p, int j) {
  OperatorSpec s = spec_L(space.level(), p, j);
  return handle(space, "L_j", ojson{{"p", p}, {"j", j}}, modsym::act(space, s), s.size());
}

OperatorHandle build_S(const ManinSpace& space, i64 p, int r, bool primed) {
  OperatorSpec s = spec_S(space.level(), p, r);
  QMatrix m = modsym::act(space, s);
  if (primed) {
    auto [n, rest] = split_prime(space.level(), p);
    (void)rest;
    OperatorHandle w = build_W(space, ipow(p, n));
    m = w.matrix * m * w.matrix;
  }
  return handle(space, primed ? "S_pn_r_prime" : "S_pn_r", ojson{{"p", p}, {"r", r}}, std::move(m), s.size());
}

OperatorHandle build_Rp_squared(const ManinSpace& space, i64 p) {
  if (!is_prime(p) || p == 2 || space.level() % (p * p) != 0) throw std::invalid_argument("R_p^2 needs an odd prime p with p^2 | N");
  OperatorSpec d;
  d.description = "D_" + std::to_string(p);
  for (i64 l = 1; l < p; ++l) d.terms.emplace_back(Rational(kronecker(l, p)), IntMatrix2{p, l, 0, p});
  QMatrix dm = modsym::act(space, d);
  Rational scale = Rational(1) / Rational(kronecker(-1, p) * p);
  return handle(space, "R_p_sq", ojson{{"p", p}}, (dm * dm).scaled(scale), d.size());
}

OperatorHandle build_Rchi_squared(const ManinSpace& space) {
  if (space.level() % 16 != 0) throw std::invalid_argument("R_chi^2 needs 16 | N");
  OperatorSpec e;
  e.description = "E_chi";
  e.terms.emplace_back(Rational(1), IntMatrix2{4, 1, 0, 4});
  e.terms.emplace_back(Rational(-1), IntMatrix2{4, 3, 0, 4});
  QMatrix em = modsym::act(space, e);
  return handle(space, "R_chi_sq", ojson::object(), (em * em).scaled(linalg::make_rational(-1, 4)), e.size());
}

OperatorHandle build_T(const ManinSpace& space, i64 q) {
  return handle(space, "T_q", ojson{{"q", q}}, modsym::hecke_T(space, q), static_cast<std::size_t>(q + 1));
}

Subspace new_symbol_space(SpaceCache& cache, i64 level, int weight) {
  auto space = cache.get(level, weight);
  Subspace out = Subspace::full(space->cuspidal_dim());
  if (out.dim() == 0) return out;
  for (i64 p : prime_divisors(level)) {
    auto lower = cache.get(level / p, weight);
    if (lower->cuspidal_dim() == 0) continue;
    QMatrix d1 = modsym::degeneracy_down(*space, *lower, 1);
    QMatrix dp = modsym::degeneracy_down(*space, *lower, p);
    out = intersect(out, kernel(linalg::vstack(d1, dp)));
  }
  return out;
}

Subspace old_summand(SpaceCache& cache, i64 level, int weight, i64 m, i64 d) {
  if (m < 1 || d < 1 || level % (d * m) != 0 || m == level) throw std::invalid_argument("old_summand: need dM | N and M != N");
  auto space = cache.get(level, weight);
  auto lower = cache.get(m, weight);
  if (lower->cuspidal_dim() == 0) return Subspace::zero(space->cuspidal_dim());
  return image(degeneracy_up(*lower, *space, d), new_symbol_space(cache, m, weight));
}

i64 new_dim_bookkeeping(SpaceCache& cache, i64 level, int weight) {
  std::map<i64, i64> memo;
  for (i64 m : divisors(level)) {  // ascending, so lower levels are ready
    i64 v = static_cast<i64>(cache.get(m, weight)->cuspidal_dim());
    for (i64 l : divisors(m))
      if (l != m) v -= static_cast<i64>(divisors(m / l).size()) * memo.at(l);
    memo[m] = v;
  }
  return memo.at(level);
}

std::string theorem_name(Theorem t) {
  switch (t) {
    case Theorem::T1: return "T1";
    case Theorem::T2: return "T2";
    case Theorem::T2prime: return "T2prime";
    case Theorem::T3: return "T3";
    case Theorem::T5: return "T5";
  }
  return "?";
}

bool theorem_applies(Theorem t, i64 level) {
  if (level < 1) return false;
  auto f = factor(level);
  switch (t) {
    case Theorem::T1: return is_square_free(level);
    case Theorem::T2:
    case Theorem::T2prime: {
      bool has_square = false;
      for (auto [p, e] : f) {
        if (e > 2) return false;
        has_square = has_square || e == 2;
      }
      return has_square;
    }
    case Theorem::T3: return true;
    case Theorem::T5: return valuation(level, 2) >= 4;
  }
  return false;
}

namespace {

struct Condition {
  std::string op;
  i64 p;
  Rational eigenvalue;
  Subspace space;
};

void add_condition(std::vector<Condition>& conds, const OperatorHandle& h, i64 p, const Rational& lambda) {
  conds.push_back({h.name, p, lambda, eigenspace(h.matrix, lambda)});
}

void add_q_pair(std::vector<Condition>& conds, const ManinSpace& space, i64 p) {
  add_condition(conds, build_Q(space, p, QVariant::Qp), p, Rational(-1));
  add_condition(conds, build_Q(space, p, QVariant::Qp_prime), p, Rational(-1));
}

}  // namespace

CheckReport check_theorem(SpaceCache& cache, i64 level, int weight, Theorem which, const CheckOptions& opts) {
  if (!theorem_applies(which, level))
    throw ShapeError("level " + std::to_string(level) + " does not have the shape required by " + theorem_name(which));
  auto space = cache.get(level, weight);
  const auto f = factor(level);

  std::vector<Condition> conds;
  if (space->cuspidal_dim() > 0) {
    for (auto [p, e] : f) {
      switch (which) {
        case Theorem::T1: add_q_pair(conds, *space, p); break;
        case Theorem::T2:
          if (e == 1) add_q_pair(conds, *space, p);
          else {
            add_condition(conds, build_Q(*space, p, QVariant::Qp2), p, Rational(0));
            add_condition(conds, build_Q(*space, p, QVariant::Qp2_prime), p, Rational(0));
          }
          break;
        case Theorem::T2prime:
        case Theorem::T3:
          if (e == 1) add_q_pair(conds, *space, p);
          else {
            add_condition(conds, build_S(*space, p, e - 1, false), p, Rational(0));
            add_condition(conds, build_S(*space, p, e - 1, true), p, Rational(0));
          }
          break;
        case Theorem::T5:
          if (e == 1) add_q_pair(conds, *space, p);
          else {
            if (p != 2) add_condition(conds, build_Rp_squared(*space, p), p, Rational(1));
            add_condition(conds, build_S(*space, p, e - 1, false), p, Rational(0));
          }
          break;
      }
    }
    if (which == Theorem::T5) add_condition(conds, build_Rchi_squared(*space), 2, Rational(1));
  }

  Subspace lhs = Subspace::full(space->cuspidal_dim());
  for (const auto& c : conds) lhs = intersect(lhs, c.space);
  Subspace rhs = new_symbol_space(cache, level, weight);
  i64 oracle = 2 * modsym::dim_new_oracle(level, weight);
  if (opts.star_plus) {
    Subspace plus = star_plus_space(*space);
    lhs = intersect(lhs, plus);
    rhs = intersect(rhs, plus);
    oracle /= 2;
  }

  std::vector<i64> primes;
  for (auto [p, e] : f) primes.push_back(p);
  ojson inputs = inputs_json(level, weight, primes);
  inputs["theorem"] = theorem_name(which);
  inputs["star_plus"] = opts.star_plus;
  CheckReport r = subspace_report("theorem_" + theorem_name(which), inputs, lhs, rhs);

  ojson cj = ojson::array();
  for (const auto& c : conds)
    cj.push_back({{"op", c.op}, {"p", c.p}, {"eigenvalue", rational_to_json(c.eigenvalue)}, {"dim", c.space.dim()}});
  r.details["conditions"] = cj;
  r.details["cuspidal_dim"] = space->cuspidal_dim();
  r.details["new_dim_oracle"] = oracle;
  i64 book = new_dim_bookkeeping(cache, level, weight);
  if (opts.star_plus) book /= 2;
  r.details["new_dim_bookkeeping"] = book;
  const bool dims_ok = static_cast<i64>(rhs.dim()) == oracle && book == oracle;
  r.details["oracle_agrees"] = dims_ok;
  r.pass = r.pass && dims_ok;
  return r;
}

std::vector<CheckReport> check_operator_identities(SpaceCache& cache, i64 level, int weight) {
  std::vector<CheckReport> out;
  auto space = cache.get(level, weight);
  const auto f = factor(level);
  const i64 tq = smallest_prime_not_dividing(level);
  const QMatrix t = modsym::hecke_T(*space, tq);
  const QMatrix star = modsym::star_involution(*space);

  std::map<i64, std::vector<OperatorHandle>> by_prime;
  for (auto [p, n] : f) {
    const i64 q = ipow(p, n);
    ojson in = inputs_json(level, weight, {p});
    in["q"] = q;
    OperatorHandle w = build_W(*space, q);
    out.push_back(matrix_report("W_squared_identity", in, w.matrix * w.matrix, QMatrix::identity(w.dim())));
    OperatorHandle u = build_Utilde(*space, p);
    CheckReport uc;
    uc.id = "Utilde_term_count";
    uc.inputs = in;
    uc.pass = u.terms == static_cast<std::size_t>(p);
    uc.details["terms"] = u.terms;
    out.push_back(uc);
    auto& ops = by_prime[p];
    ops.push_back(w);
    if (n == 1) {
      for (auto v : {QVariant::Qp, QVariant::Qp_prime}) {
        OperatorHandle qh = build_Q(*space, p, v);
        QMatrix poly = shift(qh.matrix, Rational(p)) * shift(qh.matrix, Rational(-1));
        out.push_back(zero_report(qh.name + "_quadratic", in, poly));
        ops.push_back(qh);
      }
    } else {
      OperatorHandle qh = build_Q(*space, p, QVariant::Qpn);
      QMatrix poly = qh.matrix * shift(qh.matrix, Rational(q)) * shift(qh.matrix, Rational(-ipow(p, n - 1)));
      out.push_back(zero_report("Q_pn_cubic", in, poly));
      ops.push_back(qh);
      for (int j = 1; j <= n - 1; ++j) {
        OperatorHandle l = build_L(*space, p, j);
        CheckReport lc;
        lc.id = "L_term_count";
        lc.inputs = in;
        lc.inputs["j"] = j;
        lc.pass = static_cast<i64>(l.terms) == euler_phi(ipow(p, n - j));
        lc.details["terms"] = l.terms;
        out.push_back(lc);
      }
      for (int r = 1; r <= n - 1; ++r) {
        for (bool primed : {false, true}) {
          OperatorHandle s = build_S(*space, p, r, primed);
          ojson sin = in;
          sin["r"] = r;
          QMatrix poly = s.matrix * shift(s.matrix, Rational(ipow(p, n - r)));
          out.push_back(zero_report(s.name + "_quadratic", sin, poly));
          if (!primed) {
            CheckReport sc;
            sc.id = "S_term_count";
            sc.inputs = sin;
            sc.pass = static_cast<i64>(s.terms) == ipow(p, n - r);
            sc.details["terms"] = s.terms;
            out.push_back(sc);
          }
          ops.push_back(std::move(s));
        }
      }
      if (p != 2) ops.push_back(build_Rp_squared(*space, p));
    }
    if (p == 2 && n >= 4) ops.push_back(build_Rchi_squared(*space));
  }

  // Every operator commutes with T_q (q not dividing N) and with star.
  for (const auto& [p, ops] : by_prime)
    for (const auto& h : ops) {
      ojson in = inputs_json(level, weight, {p});
      in["op"] = h.name;
      in["params"] = h.params;
      in["q"] = tq;
      out.push_back(matrix_report("commutes_with_T_q", in, h.matrix * t, t * h.matrix));
      out.push_back(matrix_report("commutes_with_star", in, h.matrix * star, star * h.matrix));
    }
  // Operators attached to distinct primes commute.
  for (auto a = by_prime.begin(); a != by_prime.end(); ++a)
    for (auto b = std::next(a); b != by_prime.end(); ++b)
      for (const auto& x : a->second)
        for (const auto& y : b->second) {
          if (x.name == "R_chi_sq" || y.name == "R_chi_sq" || x.name == "R_p_sq" || y.name == "R_p_sq") continue;
          ojson in = inputs_json(level, weight, {a->first, b->first});
          in["ops"] = {x.name, y.name};
          in["params"] = {x.params, y.params};
          out.push_back(matrix_report("cross_prime_commute", in, x.matrix * y.matrix, y.matrix * x.matrix));
        }
  return out;
}

std::vector<CheckReport> check_lemma_suite(SpaceCache& cache, i64 level, int weight) {
  std::vector<CheckReport> out;
  auto space = cache.get(level, weight);
  const int k = space->half_weight();

  for (auto [p, n] : factor(level)) {
    ojson in = inputs_json(level, weight, {p});
    if (n == 1) {
      auto lower = cache.get(level / p, weight);
      const QMatrix b1 = degeneracy_up(*lower, *space, 1);
      const QMatrix psi = degeneracy_up(*lower, *space, p);
      const QMatrix tp = lower->cuspidal_dim() > 0 ? modsym::hecke_T(*lower, p) : QMatrix(0, 0);
      const QMatrix qp = build_Q(*space, p, QVariant::Qp).matrix;
      const QMatrix qpp = build_Q(*space, p, QVariant::Qp_prime).matrix;
      const QMatrix w = build_W(*space, p).matrix;
      const Subspace im1 = column_space(b1), imp = column_space(psi);
      const Subspace xp = linalg::sum(im1, imp);

      out.push_back(matrix_report("Qp_scalar_on_lower_level_image", in, qp * b1, b1.scaled(Rational(p))));
      out.push_back(matrix_report("Qp_on_p_shifted_image", in, qp * psi, b1 * tp - psi));
      out.push_back(containment_report("Qp_stabilizes_Xp", in, xp, image(qp, xp)));
      QMatrix minus = psi - (b1 * tp).scaled(Rational(1) / Rational(p + 1));
      out.push_back(subspace_report("Qp_minus_one_eigenspace_in_Xp", in, intersect(eigenspace(qp, Rational(-1)), xp), column_space(minus)));
      out.push_back(subspace_report("Qp_p_eigenspace_in_Xp", in, intersect(eigenspace(qp, Rational(p)), xp), im1));
      out.push_back(matrix_report("W_maps_lower_image_to_shift", in, w * b1, psi.scaled(rpow(p, 1 - k))));
      out.push_back(matrix_report("W_maps_shift_to_lower_image", in, w * psi, b1.scaled(rpow(p, k - 1))));
      out.push_back(containment_report("Qp_prime_stabilizes_Xp", in, xp, image(qpp, xp)));
      out.push_back(subspace_report("Qp_prime_p_eigenspace_in_Xp", in, intersect(eigenspace(qpp, Rational(p)), xp), imp));
      continue;
    }

    const i64 m = level / ipow(p, n);
    const QMatrix w = build_W(*space, ipow(p, n)).matrix;
    const Subspace nw = new_symbol_space(cache, level, weight);
    for (int r = 1; r <= n; ++r) {
      ojson rin = in;
      rin["r"] = r;
      const i64 mid_level = ipow(p, r) * m;
      auto mid = cache.get(mid_level, weight);
      const QMatrix s = build_S(*space, p, r, false).matrix;
      const QMatrix sp = build_S(*space, p, r, true).matrix;
      const Rational lam(ipow(p, n - r));
      const QMatrix b1 = degeneracy_up(*mid, *space, 1);
      const QMatrix bs = degeneracy_up(*mid, *space, ipow(p, n - r));
      out.push_back(subspace_report("S_top_eigenspace_is_lower_level", rin, eigenspace(s, lam), column_space(b1)));
      out.push_back(subspace_report("S_prime_top_eigenspace_is_shift", rin, eigenspace(sp, lam), column_space(bs)));
      out.push_back(subspace_report("W_maps_lower_level_onto_shift", rin, image(w, column_space(b1)), column_space(bs)));
      if (r < n) {
        const Subspace mid_new = new_symbol_space(cache, mid_level, weight);
        out.push_back(subspace_report("W_maps_lower_new_onto_shifted_new", rin, image(w, image(b1, mid_new)), image(bs, mid_new)));
      }
      for (int alpha = r + 1; alpha <= n; ++alpha) {
        ojson ain = rin;
        ain["alpha"] = alpha;
        const i64 al = ipow(p, alpha) * m;
        auto sa = cache.get(al, weight);
        Subspace up = alpha == n ? nw : image(degeneracy_up(*sa, *space, 1), new_symbol_space(cache, al, weight));
        out.push_back(containment_report("S_kills_higher_new_images", ain, kernel(s), up));
      }
    }
    // W sends the p^r shift of level m onto the p^(n-r) shift.
    if (m >= 1) {
      auto base = cache.get(m, weight);
      for (int r = 0; r <= n; ++r) {
        ojson rin = in;
        rin["r"] = r;
        const Subspace from = column_space(degeneracy_up(*base, *space, ipow(p, r)));
        const Subspace to = column_space(degeneracy_up(*base, *space, ipow(p, n - r)));
        out.push_back(subspace_report("W_swaps_base_shifts", rin, image(w, from), to));
      }
    }
    {
      const QMatrix s = build_S(*space, p, n - 1, false).matrix;
      const QMatrix sp = build_S(*space, p, n - 1, true).matrix;
      out.push_back(containment_report("new_in_kernel_of_S_and_S_prime", in, intersect(kernel(s), kernel(sp)), nw));
    }
    if (n == 2) {
      const QMatrix q2 = build_Q(*space, p, QVariant::Qp2_prime).matrix;
      auto mid = cache.get(p * m, weight);
      auto base = cache.get(m, weight);
      const Subspace vp = column_space(degeneracy_up(*mid, *space, p));
      const QMatrix bpp = degeneracy_up(*base, *space, p * p);
      const Subspace vx = linalg::sum(column_space(degeneracy_up(*base, *space, p)), column_space(bpp));
      out.push_back(containment_report("Qp2_prime_stabilizes_p_shift", in, vp, image(q2, vp)));
      out.push_back(containment_report("Qp2_prime_stabilizes_shifted_Xp", in, vx, image(q2, vx)));
      QMatrix quad = shift(q2, Rational(p * p)) * shift(q2, Rational(-p));
      out.push_back(zero_report("Qp2_prime_quadratic_on_p_shift", in, quad * vp.basis().transpose()));
      out.push_back(matrix_report("Qp2_prime_on_p2_shift", in, q2 * bpp, bpp.scaled(Rational(p * p))));
      const Subspace mid_new = new_symbol_space(cache, p * m, weight);
      out.push_back(containment_report("Qp2_prime_minus_p_on_shifted_new", in, eigenspace(q2, Rational(-p)),
                                       image(degeneracy_up(*mid, *space, p), mid_new)));
      for (i64 mp : divisors(m))
        for (i64 q : divisors(m / mp)) {
          if (q == 1) continue;
          ojson qin = in;
          qin["q"] = q;
          qin["M_prime"] = mp;
          auto lev = cache.get(p * mp, weight);
          Subspace img = image(degeneracy_up(*lev, *space, p * q), new_symbol_space(cache, p * mp, weight));
          out.push_back(containment_report("Qp2_prime_minus_p_on_pq_shift", qin, eigenspace(q2, Rational(-p)), img));
        }
    }
  }
  return out;
}

CheckReport check_old_decomposition(SpaceCache& cache, i64 level, int weight) {
  auto space = cache.get(level, weight);
  const std::size_t dim = space->cuspidal_dim();
  std::vector<QVector> vecs;
  std::size_t total = 0;
  ojson parts = ojson::array();
  Subspace nw = new_symbol_space(cache, level, weight);
  for (std::size_t i = 0; i < nw.dim(); ++i) vecs.push_back(nw.basis_vector(i));
  total += nw.dim();
  parts.push_back({{"M", level}, {"d", 1}, {"dim", nw.dim()}});
  for (i64 m : divisors(level)) {
    if (m == level) continue;
    for (i64 d : divisors(level / m)) {
      Subspace s = old_summand(cache, level, weight, m, d);
      for (std::size_t i = 0; i < s.dim(); ++i) vecs.push_back(s.basis_vector(i));
      total += s.dim();
      if (s.dim() > 0) parts.push_back({{"M", m}, {"d", d}, {"dim", s.dim()}});
    }
  }
  std::size_t rk = vecs.empty() ? 0 : linalg::rank(QMatrix::from_rows(vecs, dim));
  CheckReport r;
  r.id = "old_new_direct_sum";
  r.inputs = inputs_json(level, weight, prime_divisors(level));
  r.lhs_dim = total;
  r.rhs_dim = dim;
  r.pass = rk == total && total == dim;
  r.details["summands"] = parts;
  r.details["rank"] = rk;
  return r;
}

namespace {

void section6_square_free(SpaceCache& cache, i64 level, int weight, const CheckOptions& opts, std::vector<CheckReport>& out) {
  auto space = cache.get(level, weight);
  const std::size_t dim = space->cuspidal_dim();
  const auto primes = prime_divisors(level);
  std::map<i64, Subspace> minus, p_eig, p_eig_prime;
  for (i64 p : primes) {
    const QMatrix q = build_Q(*space, p, QVariant::Qp).matrix;
    const QMatrix qp = build_Q(*space, p, QVariant::Qp_prime).matrix;
    minus.emplace(p, intersect(eigenspace(q, Rational(-1)), eigenspace(qp, Rational(-1))));
    p_eig.emplace(p, eigenspace(q, Rational(p)));
    p_eig_prime.emplace(p, eigenspace(qp, Rational(p)));
  }
  Subspace plus = opts.star_plus ? star_plus_space(*space) : Subspace::full(dim);

  std::vector<QVector> all;
  std::size_t total = 0;
  for (i64 m : divisors(level))
    for (i64 mp : divisors(level / m)) {
      Subspace sig = plus;
      for (i64 p : primes) {
        if (m % p == 0) sig = intersect(sig, minus.at(p));
        else if (mp % p == 0) sig = intersect(sig, p_eig_prime.at(p));
        else sig = intersect(sig, p_eig.at(p));
      }
      Subspace expected = Subspace::zero(dim);
      if (m != level || mp != 1) {
        expected = old_summand(cache, level, weight, m, mp);
      } else {
        expected = new_symbol_space(cache, level, weight);
      }
      expected = intersect(expected, plus);
      int which = m == 1 ? (mp == 1 ? 1 : 3) : (mp == 1 ? 2 : 4);
      ojson in = inputs_json(level, weight, primes);
      in["M"] = m;
      in["M_prime"] = mp;
      in["case"] = which;
      in["star_plus"] = opts.star_plus;
      out.push_back(subspace_report("old_space_signature", in, sig, expected));
      for (std::size_t i = 0; i < sig.dim(); ++i) all.push_back(sig.basis_vector(i));
      total += sig.dim();
    }
  CheckReport r;
  r.id = "signature_direct_sum";
  r.inputs = inputs_json(level, weight, primes);
  r.inputs["star_plus"] = opts.star_plus;
  std::size_t rk = all.empty() ? 0 : linalg::rank(QMatrix::from_rows(all, dim));
  r.lhs_dim = total;
  r.rhs_dim = plus.dim();
  r.pass = rk == total && total == plus.dim();
  r.details["rank"] = rk;
  out.push_back(r);
}

void section6_inductive(SpaceCache& cache, i64 level, int weight, const CheckOptions& opts, std::vector<CheckReport>& out) {
  if (is_square_free(level)) {
    section6_square_free(cache, level, weight, opts, out);
    return;
  }
  auto space = cache.get(level, weight);
  const std::size_t dim = space->cuspidal_dim();
  Subspace plus = opts.star_plus ? star_plus_space(*space) : Subspace::full(dim);
  i64 next = level;
  for (auto [p, n] : factor(level)) {
    if (n < 2) continue;
    ojson in = inputs_json(level, weight, {p});
    in["star_plus"] = opts.star_plus;
    auto lower = cache.get(level / p, weight);
    const QMatrix s = build_S(*space, p, n - 1, false).matrix;
    const QMatrix sp = build_S(*space, p, n - 1, true).matrix;
    out.push_back(subspace_report("S_p_eigenspace_is_level_N_over_p", in, intersect(eigenspace(s, Rational(p)), plus),
                                  intersect(column_space(degeneracy_up(*lower, *space, 1)), plus)));
    out.push_back(subspace_report("S_prime_p_eigenspace_is_p_shift", in, intersect(eigenspace(sp, Rational(p)), plus),
                                  intersect(column_space(degeneracy_up(*lower, *space, p)), plus)));
    if (next == level) next = level / p;
  }
  section6_inductive(cache, next, weight, opts, out);
}

}  // namespace

std::vector<CheckReport> check_section6(SpaceCache& cache, i64 level, int weight, const CheckOptions& opts) {
  std::vector<CheckReport> out;
  section6_inductive(cache, level, weight, opts, out);
  return out;
}

}  // namespace heckenew::newform
