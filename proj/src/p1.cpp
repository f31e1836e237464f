#include "heckenew/p1.hpp"

#include <stdexcept>

namespace heckenew {

P1List::P1List(i64 n) : n_(n) {
  if (n < 1) throw std::invalid_argument("P1 modulus must be positive");
  std::vector<i64> units;
  for (i64 u = 0; u < n; ++u)
    if (gcd(u, n) == 1) units.push_back(u);
  if (n == 1) units = {0};
  table_.assign(static_cast<std::size_t>(n * n), -1);
  for (i64 c = 0; c < n; ++c)
    for (i64 d = 0; d < n; ++d) {
      if (gcd(gcd(c, d), n) != 1 || table_[c * n + d] >= 0) continue;
      int idx = static_cast<int>(points_.size());
      points_.push_back({c, d});
      for (i64 u : units) table_[(u * c % n) * n + u * d % n] = idx;
    }
}

std::size_t P1List::index(i64 c, i64 d) const {
  i64 cm = mod(c, n_), dm = mod(d, n_);
  int idx = table_[cm * n_ + dm];
  if (idx < 0) throw std::invalid_argument("P1 point with gcd(c, d, N) != 1");
  return static_cast<std::size_t>(idx);
}

std::vector<P1Point> p1_list(i64 n) { return P1List(n).points(); }

P1Point p1_normalize(i64 c, i64 d, i64 n) { return P1List(n).normalize(c, d); }

}  // namespace heckenew
