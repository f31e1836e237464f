#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "heckenew/exact_linalg.hpp"

namespace heckenew {

using ojson = nlohmann::ordered_json;

ojson rational_to_json(const linalg::Rational& q);
ojson vector_to_json(const linalg::QVector& v);

struct CheckReport {
  std::string id;
  ojson inputs = ojson::object();
  std::optional<std::size_t> lhs_dim;
  std::optional<std::size_t> rhs_dim;
  bool pass = false;
  std::vector<linalg::QVector> witness;
  ojson details = ojson::object();

  ojson to_json() const;
};

bool all_pass(const std::vector<CheckReport>& reports);

}  // namespace heckenew
