#include "heckenew/local_hecke.hpp"

#include <functional>
#include <sstream>
#include <stdexcept>

namespace heckenew::local {

using linalg::QMatrix;
using linalg::Rational;
using linalg::Subspace;

void LocalParams::validate() const {
  if (!is_prime(p)) throw std::invalid_argument("p must be prime");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (n > 20 || index() > kMaxCosets) throw std::invalid_argument("coset count exceeds the configured bound");
}

i64 ResidueMatrix::det() const { return mod(a * d - b * c, m); }

ResidueMatrix ResidueMatrix::operator*(const ResidueMatrix& o) const {
  return {mod(a * o.a + b * o.c, m), mod(a * o.b + b * o.d, m), mod(c * o.a + d * o.c, m), mod(c * o.b + d * o.d, m), m};
}

ResidueMatrix ResidueMatrix::inverse() const {
  i64 inv = inverse_mod(det(), m);
  return {mod(d * inv, m), mod(-b * inv, m), mod(-c * inv, m), mod(a * inv, m), m};
}

ResidueMatrix x_elem(i64 t, i64 m) { return {1, mod(t, m), 0, 1, m}; }
ResidueMatrix y_elem(i64 t, i64 m) { return {1, 0, mod(t, m), 1, m}; }
ResidueMatrix w_elem(i64 t, i64 m) { return {0, mod(-1, m), mod(t, m), 0, m}; }
ResidueMatrix d_elem(i64 t, i64 m) { return {1, 0, 0, mod(t, m), m}; }

HeckeElement HeckeElement::operator+(const HeckeElement& o) const {
  HeckeElement r = *this;
  for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += o.coeffs[i];
  return r;
}

HeckeElement HeckeElement::operator-(const HeckeElement& o) const { return *this + o * -1; }

HeckeElement HeckeElement::operator*(i64 s) const {
  HeckeElement r = *this;
  for (auto& x : r.coeffs) x *= s;
  return r;
}

bool HeckeElement::is_zero() const {
  for (auto x : coeffs)
    if (x != 0) return false;
  return true;
}

std::string HeckeElement::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < coeffs.size(); ++i) os << (i ? ", " : "") << coeffs[i];
  os << "]";
  return os.str();
}

Label CosetModel::classify(const ResidueMatrix& g) const {
  i64 c = mod(g.c, g.m);
  if (c == 0) return 0;
  int v = valuation(c, params.p);
  return v == 0 ? 1 : 1 + v;
}

ResidueMatrix CosetModel::class_representative(Label l) const {
  i64 q = params.modulus();
  if (l == 0) return {1, 0, 0, 1, q};
  if (l == 1) return w_elem(1, q);
  return y_elem(ipow(params.p, l - 1), q);
}

HeckeElement CosetModel::zero() const { return {std::vector<i64>(num_classes(), 0)}; }

HeckeElement CosetModel::basis(Label l) const {
  HeckeElement e = zero();
  e.coeffs.at(static_cast<std::size_t>(l)) = 1;
  return e;
}

HeckeElement CosetModel::V(int r) const {
  if (r < 1 || r > params.n - 1) throw std::invalid_argument("V_r index out of range");
  return basis(1 + r);
}

HeckeElement CosetModel::Y(int r) const {
  if (r < 1 || r > params.n) throw std::invalid_argument("Y_r index out of range");
  HeckeElement e = identity();
  for (int j = r; j <= params.n - 1; ++j) e = e + V(j);
  return e;
}

CosetModel build_coset_model(const LocalParams& params) {
  params.validate();
  const i64 q = params.modulus();
  CosetModel model{params, P1List(q), {}, {}, {}};
  for (const auto& pt : model.points.points()) {
    ResidueMatrix g = gcd(pt.d, params.p) == 1 ? ResidueMatrix{1, 0, pt.c, pt.d, q} : ResidueMatrix{0, q - 1, pt.c, pt.d, q};
    model.right_cosets.push_back(g);
    model.left_cosets.push_back(g.inverse());
    model.double_coset_label.push_back(model.classify(g));
  }
  return model;
}

namespace {

void check_same_shape(const HeckeElement& f, const HeckeElement& g, std::size_t n) {
  if (f.coeffs.size() != n || g.coeffs.size() != n) throw std::invalid_argument("Hecke element length mismatch");
}

}  // namespace

HeckeElement convolve(const HeckeElement& f, const HeckeElement& g, const CosetModel& model) {
  check_same_shape(f, g, model.num_classes());
  HeckeElement out = model.zero();
  for (std::size_t cls = 0; cls < model.num_classes(); ++cls) {
    ResidueMatrix h = model.class_representative(static_cast<Label>(cls));
    i64 acc = 0;
    for (const auto& alpha : model.left_cosets) {
      i64 fa = f.coeffs[model.classify(alpha)];
      if (fa == 0) continue;
      acc += fa * g.coeffs[model.classify(alpha.inverse() * h)];
    }
    out.coeffs[cls] = acc;
  }
  return out;
}

HeckeElement brute_force_convolve(const HeckeElement& f, const HeckeElement& g, const LocalParams& params) {
  params.validate();
  const i64 q = params.modulus();
  const i64 order = q * q * q * q / (params.p * params.p * params.p * params.p) * (params.p * params.p - 1) * (params.p * params.p - params.p);
  if (order > kMaxGroupOrder) throw std::invalid_argument("group order exceeds the enumeration bound");
  CosetModel model{params, P1List(1), {}, {}, {}};
  check_same_shape(f, g, static_cast<std::size_t>(params.n) + 1);

  std::vector<ResidueMatrix> group;
  i64 k0 = 0;
  for (i64 a = 0; a < q; ++a)
    for (i64 b = 0; b < q; ++b)
      for (i64 c = 0; c < q; ++c)
        for (i64 d = 0; d < q; ++d) {
          if (gcd(mod(a * d - b * c, q), params.p) != 1) continue;
          group.push_back({a, b, c, d, q});
          if (c == 0) ++k0;
        }
  if (static_cast<i64>(group.size()) != order) throw std::logic_error("group enumeration count mismatch");

  HeckeElement out = model.zero();
  for (std::size_t cls = 0; cls < out.coeffs.size(); ++cls) {
    ResidueMatrix h = model.class_representative(static_cast<Label>(cls));
    i64 acc = 0;
    for (const auto& x : group) {
      i64 fx = f.coeffs[model.classify(x)];
      if (fx == 0) continue;
      acc += fx * g.coeffs[model.classify(x.inverse() * h)];
    }
    if (acc % k0 != 0) throw std::logic_error("non-integral convolution coefficient");
    out.coeffs[cls] = acc / k0;
  }
  return out;
}

std::vector<std::vector<HeckeElement>> structure_table(const CosetModel& model) {
  std::vector<std::vector<HeckeElement>> t(model.num_classes());
  for (std::size_t i = 0; i < model.num_classes(); ++i)
    for (std::size_t j = 0; j < model.num_classes(); ++j)
      t[i].push_back(convolve(model.basis(static_cast<Label>(i)), model.basis(static_cast<Label>(j)), model));
  return t;
}

namespace {

struct RelationLog {
  ojson entries = ojson::array();
  bool all = true;

  void add(const std::string& name, ojson params, const HeckeElement& lhs, const HeckeElement& rhs) {
    bool ok = lhs == rhs;
    all = all && ok;
    ojson e;
    e["relation"] = name;
    e["params"] = std::move(params);
    e["lhs"] = lhs.coeffs;
    e["rhs"] = rhs.coeffs;
    e["pass"] = ok;
    entries.push_back(std::move(e));
  }
};

}  // namespace

CheckReport verify_local_relations(const LocalParams& params) {
  CosetModel model = build_coset_model(params);
  const i64 p = params.p;
  const int n = params.n;
  auto mul = [&](const HeckeElement& a, const HeckeElement& b) { return convolve(a, b, model); };
  auto pw = [&](int e) { return ipow(p, e); };
  const HeckeElement I = model.identity(), U0 = model.U0();
  RelationLog log;

  if (n == 1) {
    log.add("U0*U0 = (p-1)U0 + p", ojson::object(), mul(U0, U0), U0 * (p - 1) + I * p);
    log.add("(U0-p)(U0+1) = 0", ojson::object(), mul(U0 - I * p, U0 + I), model.zero());
  } else {
    for (int r = 1; r <= n - 1; ++r) {
      HeckeElement Vr = model.V(r);
      log.add("V_r*V_r = p^(n-r-1)(p-1)Y_(r+1) + p^(n-r-1)(p-2)V_r", {{"r", r}}, mul(Vr, Vr),
              model.Y(r + 1) * (pw(n - r - 1) * (p - 1)) + Vr * (pw(n - r - 1) * (p - 2)));
      for (int j = r + 1; j <= n - 1; ++j) {
        HeckeElement Vj = model.V(j);
        log.add("V_r*V_j = (p-1)p^(n-j-1)V_r", {{"r", r}, {"j", j}}, mul(Vr, Vj), Vr * ((p - 1) * pw(n - j - 1)));
        log.add("V_j*V_r = (p-1)p^(n-j-1)V_r", {{"r", r}, {"j", j}}, mul(Vj, Vr), Vr * ((p - 1) * pw(n - j - 1)));
      }
      HeckeElement Yr1 = model.Y(r + 1);
      log.add("V_r*Y_(r+1) = p^(n-r-1)V_r", {{"r", r}}, mul(Vr, Yr1), Vr * pw(n - r - 1));
      log.add("Y_(r+1)*V_r = p^(n-r-1)V_r", {{"r", r}}, mul(Yr1, Vr), Vr * pw(n - r - 1));
      log.add("(V_r - p^(n-r-1)(p-1))(V_r + Y_(r+1)) = 0", {{"r", r}},
              mul(Vr - I * (pw(n - r - 1) * (p - 1)), Vr + Yr1), model.zero());
    }
    for (int r = 0; r <= n - 1; ++r) {
      HeckeElement Y = model.Y(n - r);
      log.add("Y_(n-r)^2 = p^r Y_(n-r)", {{"r", r}}, mul(Y, Y), Y * pw(r));
    }
    for (int r = 1; r <= n; ++r)
      for (int l = 1; l <= r; ++l) {
        HeckeElement Yr = model.Y(r), Yl = model.Y(l);
        log.add("Y_r*Y_l = p^(n-r)Y_l", {{"r", r}, {"l", l}}, mul(Yr, Yl), Yl * pw(n - r));
        log.add("Y_l*Y_r = p^(n-r)Y_l", {{"r", r}, {"l", l}}, mul(Yl, Yr), Yl * pw(n - r));
      }
    log.add("U0*U0 = p^(n-1)(p-1)U0 + p^n Y_1", ojson::object(), mul(U0, U0), U0 * (pw(n - 1) * (p - 1)) + model.Y(1) * pw(n));
    for (int r = 1; r <= n; ++r) {
      log.add("U0*Y_r = p^(n-r)U0", {{"r", r}}, mul(U0, model.Y(r)), U0 * pw(n - r));
      log.add("Y_r*U0 = p^(n-r)U0", {{"r", r}}, mul(model.Y(r), U0), U0 * pw(n - r));
    }
    log.add("U0(U0 - p^n)(U0 + p^(n-1)) = 0", ojson::object(), mul(mul(U0, U0 - I * pw(n)), U0 + I * pw(n - 1)),
            model.zero());
  }
  auto table = structure_table(model);
  for (std::size_t i = 0; i < model.num_classes(); ++i)
    for (std::size_t j = i + 1; j < model.num_classes(); ++j)
      log.add("commutativity", {{"i", i}, {"j", j}}, table[i][j], table[j][i]);

  CheckReport rep;
  rep.id = "local_relations";
  rep.inputs = {{"p", p}, {"n", n}};
  rep.pass = log.all;
  rep.details["relations"] = std::move(log.entries);
  return rep;
}

namespace {

i64 eigenvalue_of(const HeckeElement& image, const HeckeElement& v, const std::string& what) {
  std::size_t k = 0;
  while (k < v.coeffs.size() && v.coeffs[k] == 0) ++k;
  if (k == v.coeffs.size()) throw std::logic_error("zero eigenvector candidate");
  if (image.coeffs[k] % v.coeffs[k] != 0) throw std::logic_error(what + " is not an integral eigenvector");
  i64 lambda = image.coeffs[k] / v.coeffs[k];
  if (!(image == v * lambda)) throw std::logic_error(what + " is not an eigenvector");
  return lambda;
}

std::vector<std::pair<std::string, HeckeElement>> eigen_vectors(const CosetModel& model) {
  const i64 p = model.params.p;
  const int n = model.params.n;
  std::vector<std::pair<std::string, HeckeElement>> out;
  out.emplace_back("v1", model.U0() + model.Y(1));
  out.emplace_back("v2", model.U0() - model.Y(1) * p);
  for (int k = 1; k <= n - 1; ++k) out.emplace_back("w" + std::to_string(k), model.Y(k) - model.Y(k + 1) * p);
  return out;
}

}  // namespace

std::vector<EigenRow> eigenvector_table(const LocalParams& params) {
  if (params.n < 2) throw std::invalid_argument("eigenvector table needs n >= 2");
  CosetModel model = build_coset_model(params);
  std::vector<EigenRow> rows;
  for (const auto& [name, v] : eigen_vectors(model)) {
    EigenRow row{name, v, 0, {}, {}};
    row.u0 = eigenvalue_of(convolve(model.U0(), v, model), v, name);
    for (int r = 1; r <= params.n; ++r) row.y.push_back(eigenvalue_of(convolve(model.Y(r), v, model), v, name));
    for (int r = 1; r <= params.n - 1; ++r) row.v.push_back(eigenvalue_of(convolve(model.V(r), v, model), v, name));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<EigenRow> expected_eigenvector_table(const LocalParams& params) {
  if (params.n < 2) throw std::invalid_argument("eigenvector table needs n >= 2");
  CosetModel model = build_coset_model(params);
  const i64 p = params.p;
  const int n = params.n;
  std::vector<EigenRow> rows;
  for (const auto& [name, v] : eigen_vectors(model)) {
    EigenRow row{name, v, 0, {}, {}};
    int k = name[0] == 'w' ? std::stoi(name.substr(1)) : 0;
    row.u0 = name == "v1" ? ipow(p, n) : name == "v2" ? -ipow(p, n - 1) : 0;
    for (int r = 1; r <= n; ++r) row.y.push_back(r <= k ? 0 : ipow(p, n - r));
    for (int r = 1; r <= n - 1; ++r) {
      if (r < k) row.v.push_back(0);
      else if (r == k) row.v.push_back(-ipow(p, n - r - 1));
      else row.v.push_back(ipow(p, n - r - 1) * (p - 1));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

QMatrix pi_L_matrix(const CosetModel& model, const HeckeElement& f) {
  const std::size_t D = model.right_cosets.size();
  QMatrix m(D, D);
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j)
      m(i, j) = f.coeffs[model.classify(model.right_cosets[i] * model.right_cosets[j].inverse())];
  return m;
}

i64 pi_L_trace(const LocalParams& params, const HeckeElement& f) {
  CosetModel model = build_coset_model(params);
  QMatrix m = pi_L_matrix(model, f);
  Rational t = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t.get_num().get_si();
}

namespace {

// Permutation matrix of pi_R(k): (pi_R(k) phi)(K0 x) = phi(K0 x k).
QMatrix pi_R_matrix(const CosetModel& model, const ResidueMatrix& k) {
  const std::size_t D = model.right_cosets.size();
  QMatrix m(D, D);
  for (std::size_t i = 0; i < D; ++i) {
    ResidueMatrix xk = model.right_cosets[i] * k;
    m(i, model.points.index(xk.c, xk.d)) = 1;
  }
  return m;
}

std::vector<i64> unit_generators(const LocalParams& params) {
  if (params.p == 2) return {params.modulus() - 1, 5 % params.modulus()};
  return {primitive_root_prime_power(params.p, params.n)};
}

Subspace orbit_closure(const linalg::QVector& v, const std::vector<QMatrix>& gens) {
  Subspace s = Subspace::span(v.size(), {v});
  while (true) {
    std::vector<linalg::QVector> vecs;
    for (std::size_t i = 0; i < s.dim(); ++i) {
      vecs.push_back(s.basis_vector(i));
      for (const auto& g : gens) vecs.push_back(g * s.basis_vector(i));
    }
    Subspace next = Subspace::span(v.size(), vecs);
    if (next.dim() == s.dim()) return s;
    s = next;
  }
}

}  // namespace

Decomposition induced_decomposition(const LocalParams& params) {
  CosetModel model = build_coset_model(params);
  const i64 p = params.p, q = params.modulus();
  const int n = params.n;
  const std::size_t D = model.right_cosets.size();

  std::vector<QMatrix> k_gens{pi_R_matrix(model, x_elem(1, q)), pi_R_matrix(model, y_elem(1, q))};
  for (i64 u : unit_generators(params)) k_gens.push_back(pi_R_matrix(model, d_elem(u, q)));

  auto fixed_generators = [&](int m) {
    std::vector<QMatrix> g{pi_R_matrix(model, x_elem(1, q)), pi_R_matrix(model, y_elem(ipow(p, m), q))};
    for (i64 u : unit_generators(params)) {
      g.push_back(pi_R_matrix(model, d_elem(u, q)));
      g.push_back(pi_R_matrix(model, ResidueMatrix{u, 0, 0, 1, q}));
    }
    return g;
  };

  std::vector<std::pair<std::string, HeckeElement>> vecs;
  vecs.emplace_back("S1", model.U0() + model.Y(1));
  vecs.emplace_back("S2", model.U0() - model.Y(1) * p);
  for (int k = 1; k <= n - 1; ++k) vecs.emplace_back("T" + std::to_string(k), model.Y(k) - model.Y(k + 1) * p);

  Decomposition out;
  Subspace total = Subspace::zero(D);
  std::vector<std::vector<QMatrix>> fixed_gens;
  for (int m = 0; m <= n; ++m) fixed_gens.push_back(fixed_generators(m));

  for (std::size_t idx = 0; idx < vecs.size(); ++idx) {
    const auto& [name, h] = vecs[idx];
    linalg::QVector phi(D);
    for (std::size_t i = 0; i < D; ++i) phi[i] = h.coeffs[model.double_coset_label[i]];
    Subspace comp = orbit_closure(phi, k_gens);
    Component c;
    c.name = name;
    c.dim = comp.dim();
    c.expected_dim = idx == 0 ? 1 : idx == 1 ? static_cast<std::size_t>(p) : static_cast<std::size_t>(ipow(p, static_cast<int>(idx) - 2) * (p * p - 1));
    for (int m = 0; m <= n; ++m) {
      QMatrix stacked(0, D);
      for (const auto& g : fixed_gens[m]) stacked = linalg::vstack(stacked, g - QMatrix::identity(D));
      c.fixed_dims.push_back(linalg::intersect(comp, linalg::kernel(stacked)).dim());
    }
    out.components.push_back(std::move(c));
    out.total_dim += comp.dim();
    total = linalg::sum(total, comp);
  }
  out.direct = total.dim() == out.total_dim && out.total_dim == D;

  // Trace system: pi_L(U0), pi_L(V_r) have trace zero, dimensions sum to [K : K0].
  const std::size_t k = vecs.size();
  QMatrix system(k, k + 1);
  for (std::size_t i = 0; i < k; ++i) {
    const HeckeElement& v = vecs[i].second;
    system(0, i) = eigenvalue_of(convolve(model.U0(), v, model), v, vecs[i].first);
    for (int r = 1; r <= n - 1; ++r)
      system(static_cast<std::size_t>(r), i) = eigenvalue_of(convolve(model.V(r), v, model), v, vecs[i].first);
    system(k - 1, i) = 1;
  }
  system(k - 1, k) = -static_cast<long>(D);
  Subspace sol = linalg::kernel(system);
  if (sol.dim() == 1 && sgn(sol.basis()(0, k)) != 0) {
    linalg::QVector v = sol.basis_vector(0);
    for (std::size_t i = 0; i < k; ++i) out.solved_dims.push_back(v[i] / v[k]);
  }
  return out;
}

ojson eigen_table_to_json(const LocalParams& params, const std::vector<EigenRow>& rows) {
  ojson out;
  out["p"] = params.p;
  out["n"] = params.n;
  ojson cols = ojson::array({"U0"});
  for (int r = 1; r <= params.n; ++r) cols.push_back("Y" + std::to_string(r));
  for (int r = 1; r <= params.n - 1; ++r) cols.push_back("V" + std::to_string(r));
  out["columns"] = cols;
  ojson rs = ojson::array();
  for (const auto& row : rows) {
    ojson values = ojson::array({row.u0});
    for (auto y : row.y) values.push_back(y);
    for (auto v : row.v) values.push_back(v);
    rs.push_back({{"vector", row.name}, {"coeffs", row.vector.coeffs}, {"eigenvalues", values}});
  }
  out["rows"] = rs;
  return out;
}

ojson decomposition_to_json(const LocalParams& params, const Decomposition& d) {
  ojson out;
  out["p"] = params.p;
  out["n"] = params.n;
  out["total_dim"] = d.total_dim;
  out["direct"] = d.direct;
  ojson comps = ojson::array();
  for (const auto& c : d.components)
    comps.push_back({{"name", c.name}, {"dim", c.dim}, {"expected_dim", c.expected_dim}, {"fixed_dims", c.fixed_dims}});
  out["components"] = comps;
  ojson solved = ojson::array();
  for (const auto& x : d.solved_dims) solved.push_back(rational_to_json(x));
  out["solved_dims"] = solved;
  return out;
}

}  // namespace heckenew::local
