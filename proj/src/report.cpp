#include "heckenew/report.hpp"

namespace heckenew {

namespace {

ojson integer_to_json(const mpz_class& z) {
  if (z.fits_slong_p()) return ojson(z.get_si());
  return ojson(z.get_str());
}

}  // namespace

ojson rational_to_json(const linalg::Rational& q) {
  return ojson::array({integer_to_json(q.get_num()), integer_to_json(q.get_den())});
}

ojson vector_to_json(const linalg::QVector& v) {
  ojson out = ojson::array();
  for (const auto& x : v) out.push_back(rational_to_json(x));
  return out;
}

ojson CheckReport::to_json() const {
  ojson j;
  j["id"] = id;
  j["inputs"] = inputs;
  j["lhs_dim"] = lhs_dim ? ojson(*lhs_dim) : ojson(nullptr);
  j["rhs_dim"] = rhs_dim ? ojson(*rhs_dim) : ojson(nullptr);
  j["pass"] = pass;
  j["details"] = details;
  ojson w = ojson::array();
  for (const auto& v : witness) w.push_back(vector_to_json(v));
  j["witness"] = w;
  return j;
}

bool all_pass(const std::vector<CheckReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

}  // namespace heckenew
