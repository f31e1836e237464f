#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace heckenew {

using i64 = std::int64_t;

i64 gcd(i64 a, i64 b);
i64 lcm(i64 a, i64 b);

// Returns g = gcd(a, b) >= 0 and sets x, y with a*x + b*y = g.
i64 xgcd(i64 a, i64 b, i64& x, i64& y);

i64 mod(i64 a, i64 m);
i64 inverse_mod(i64 a, i64 m);
i64 ipow(i64 base, int e);
int valuation(i64 n, i64 p);

bool is_prime(i64 n);
bool is_square_free(i64 n);
std::vector<std::pair<i64, int>> factor(i64 n);
std::vector<i64> prime_divisors(i64 n);
std::vector<i64> divisors(i64 n);
i64 euler_phi(i64 n);

// Kronecker symbol (a|n) for n > 0.
int kronecker(i64 a, i64 n);

// Smallest generator of (Z/p^n)^* for odd prime p.
i64 primitive_root_prime_power(i64 p, int n);

}  // namespace heckenew
