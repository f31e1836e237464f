#pragma once

#include <vector>

#include "heckenew/arith.hpp"

namespace heckenew {

struct P1Point {
  i64 c = 0;
  i64 d = 0;
  bool operator==(const P1Point&) const = default;
};

// P^1(Z/N), canonical representative = lexicographically smallest unit multiple.
class P1List {
 public:
  explicit P1List(i64 n);

  i64 modulus() const { return n_; }
  std::size_t size() const { return points_.size(); }
  const P1Point& point(std::size_t i) const { return points_[i]; }
  const std::vector<P1Point>& points() const { return points_; }

  // Index of the class of (c:d); throws if gcd(c, d, N) != 1.
  std::size_t index(i64 c, i64 d) const;
  P1Point normalize(i64 c, i64 d) const { return points_[index(c, d)]; }

 private:
  i64 n_;
  std::vector<P1Point> points_;
  std::vector<int> table_;
};

std::vector<P1Point> p1_list(i64 n);
P1Point p1_normalize(i64 c, i64 d, i64 n);

}  // namespace heckenew
