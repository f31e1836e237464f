// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "heckenew/cli.hpp"
#include "heckenew/local_hecke.hpp"
#include "heckenew/modsym.hpp"
#include "heckenew/newform_ops.hpp"

using namespace heckenew;
namespace fs = std::filesystem;
namespace nf = heckenew::newform;

namespace {

// Collects failures for one criterion; prints the first few.
struct Ctx {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string tag(i64 n, int w) { return "N=" + std::to_string(n) + " w=" + std::to_string(w); }

// Independent dimension oracle for S_w(Gamma0(N)) from the genus formula.
i64 legendre_like(i64 a, i64 p) {
  // (a | p) for odd prime p via Euler's criterion
  i64 r = 1, base = ((a % p) + p) % p, e = (p - 1) / 2;
  while (e > 0) {
    if (e & 1) r = r * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return r == p - 1 ? -1 : r;
}

std::vector<std::pair<i64, int>> factor(i64 n) {
  std::vector<std::pair<i64, int>> out;
  for (i64 p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) n /= p, ++e;
      out.emplace_back(p, e);
    }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

i64 euler_phi(i64 n) {
  i64 r = n;
  for (auto [p, e] : factor(n)) r = r / p * (p - 1);
  return r;
}

i64 genus_dim(i64 N, int w) {
  auto f = factor(N);
  i64 mu = N;
  for (auto [p, e] : f) mu = mu / p * (p + 1);
  i64 nu2 = N % 4 == 0 ? 0 : 1, nu3 = N % 9 == 0 ? 0 : 1;
  for (auto [p, e] : f) {
    if (p != 2) nu2 *= 1 + legendre_like(-1, p);
    if (p == 2) nu3 = 0;  // (-3 | 2) = -1
    else if (p != 3) nu3 *= 1 + legendre_like(-3, p);
  }
  i64 cusps = 0;
  for (i64 d = 1; d <= N; ++d)
    if (N % d == 0) cusps += euler_phi(std::gcd(d, N / d));
  // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 c
  i64 g12 = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps;
  i64 g = g12 / 12;
  if (w == 2) return g;
  return (w - 1) * (g - 1) + (w / 2 - 1) * cusps + nu2 * (w / 4) + nu3 * (w / 3);
}

// New dimension by inverting the old-space count: sum over M | N of b(N/M) dim S(M).
i64 genus_new_dim(i64 N, int w) {
  i64 total = 0;
  for (i64 m = 1; m <= N; ++m) {
    if (N % m != 0) continue;
    i64 b = 1;
    for (auto [p, e] : factor(N / m)) b *= e == 1 ? -2 : e == 2 ? 1 : 0;
    total += b * genus_dim(m, w);
  }
  return total;
}

bool run_reports(Ctx& c, const std::vector<CheckReport>& reports, const std::string& where) {
  bool ok = true;
  for (const auto& r : reports)
    if (!r.pass) {
      ok = false;
      c.expect(false, where + " " + r.id + " " + r.inputs.dump());
    }
  return ok;
}

const std::vector<i64> t1_w2 = {14, 15, 21, 22, 26, 30, 33, 34, 35, 38, 39, 42, 46, 51, 55, 57, 58, 62, 65, 66, 69, 70, 77, 78};
const std::vector<i64> t1_w4 = {14, 15, 21, 26};
const std::vector<i64> t2_w2 = {20, 45, 50, 52, 75, 98, 63};
const std::vector<i64> t3_w2 = {8, 16, 27, 24, 48, 54, 72, 80, 100};
const std::vector<i64> t5_w2 = {16, 48, 80, 144};
const std::vector<i64> lemma_w2 = {22, 33, 20, 45, 50, 8, 16, 24, 48};
const std::vector<i64> sec6_w2 = {22, 26, 33, 34, 38, 46, 66};
const std::vector<local::LocalParams> local_grid = {{2, 2}, {3, 2}, {5, 2}, {2, 3}, {3, 3}, {2, 4}};

void theorem_level(Ctx& c, SpaceCache& cache, i64 N, int w, nf::Theorem t) {
  CheckReport r = nf::check_theorem(cache, N, w, t);
  const i64 want = 2 * genus_new_dim(N, w);
  c.expect(r.pass, nf::theorem_name(t) + " " + tag(N, w));
  c.expect(r.lhs_dim && static_cast<i64>(*r.lhs_dim) == want,
           nf::theorem_name(t) + " " + tag(N, w) + " dim vs genus oracle " + std::to_string(want));
}

}  // namespace

int main() {
  SpaceCache cache;
  int failed = 0;

  auto criterion = [&](int id, const std::string& desc, double limit_s, const std::function<void(Ctx&)>& body) {
    Ctx c;
    auto t0 = std::chrono::steady_clock::now();
    try {
      body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > limit_s) c.expect(false, "runtime " + std::to_string(s) + "s over " + std::to_string(limit_s) + "s");
    const bool pass = c.failures.empty();
    if (!pass) ++failed;
    std::printf("criterion %2d: %s %s (%.2fs)\n", id, pass ? "PASS" : "FAIL", desc.c_str(), s);
    for (std::size_t i = 0; i < c.failures.size() && i < 5; ++i) std::printf("    %s\n", c.failures[i].c_str());
    std::fflush(stdout);
  };

  criterion(1, "local relations on the (p,n) grid and U0^2 at n=1", 60, [&](Ctx& c) {
    for (const auto& params : local_grid) {
      auto t0 = std::chrono::steady_clock::now();
      CheckReport r = local::verify_local_relations(params);
      double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      c.expect(r.pass, "relations p=" + std::to_string(params.p) + " n=" + std::to_string(params.n));
      c.expect(s < 10, "relations slower than 10s at p=" + std::to_string(params.p));
    }
    for (i64 p : {2, 3, 5, 7}) {
      local::CosetModel m = local::build_coset_model({p, 1});
      c.expect(local::convolve(m.U0(), m.U0(), m) == m.U0() * (p - 1) + m.identity() * p,
               "U0^2 = (p-1)U0 + p at p=" + std::to_string(p));
      c.expect(local::verify_local_relations({p, 1}).pass, "n=1 report at p=" + std::to_string(p));
    }
  });

  criterion(2, "convolution agrees with full group enumeration", 60, [&](Ctx& c) {
    for (local::LocalParams params : {local::LocalParams{2, 2}, local::LocalParams{2, 3}, local::LocalParams{3, 2}}) {
      local::CosetModel m = local::build_coset_model(params);
      for (std::size_t a = 0; a < m.num_classes(); ++a)
        for (std::size_t b = 0; b < m.num_classes(); ++b) {
          auto f = m.basis(static_cast<local::Label>(a)), g = m.basis(static_cast<local::Label>(b));
          c.expect(local::convolve(f, g, m) == local::brute_force_convolve(f, g, params),
                   "pair " + std::to_string(a) + "," + std::to_string(b) + " p=" + std::to_string(params.p));
        }
    }
  });

  criterion(3, "eigenvalue table matches the closed form", 60, [&](Ctx& c) {
    for (const auto& params : local_grid) {
      const i64 p = params.p;
      const int n = params.n;
      auto rows = local::eigenvector_table(params);
      c.expect(rows.size() == static_cast<std::size_t>(n) + 1, "row count");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        // rows: v1, v2, w_1..w_{n-1}; column Y_r is p^(n-r) except zeros below the w_k diagonal
        const int k = i < 2 ? 0 : static_cast<int>(i) - 1;
        const i64 u0 = i == 0 ? ipow(p, n) : i == 1 ? -ipow(p, n - 1) : 0;
        std::vector<i64> y;
        for (int r = 1; r <= n; ++r) y.push_back(r <= k ? 0 : ipow(p, n - r));
        // V_r = Y_r - Y_(r+1) as Hecke elements
        std::vector<i64> v;
        for (int r = 1; r <= n - 1; ++r) v.push_back(y[r - 1] - y[r]);
        const std::string at = rows[i].name + " p=" + std::to_string(p) + " n=" + std::to_string(n);
        c.expect(rows[i].u0 == u0, "U0 " + at);
        c.expect(rows[i].y == y, "Y " + at);
        c.expect(rows[i].v == v, "V " + at);
      }
    }
  });

  criterion(4, "induced decomposition, traces and fixed dimensions", 60, [&](Ctx& c) {
    for (const auto& params : local_grid) {
      const i64 p = params.p;
      const int n = params.n;
      const std::string at = " p=" + std::to_string(p) + " n=" + std::to_string(n);
      auto d = local::induced_decomposition(params);
      std::vector<std::size_t> want = {1, static_cast<std::size_t>(p)};
      for (int k = 1; k <= n - 1; ++k) want.push_back(static_cast<std::size_t>(ipow(p, k - 1) * (p * p - 1)));
      std::vector<std::size_t> got;
      std::size_t sum = 0;
      for (const auto& comp : d.components) got.push_back(comp.dim), sum += comp.dim;
      c.expect(got == want, "component dims" + at);
      c.expect(d.direct, "direct sum" + at);
      c.expect(sum == static_cast<std::size_t>(ipow(p, n - 1) * (p + 1)) && d.total_dim == sum, "total dim" + at);
      local::CosetModel m = local::build_coset_model(params);
      c.expect(local::pi_L_trace(params, m.U0()) == 0, "trace U0" + at);
      for (int r = 1; r < n; ++r) c.expect(local::pi_L_trace(params, m.V(r)) == 0, "trace V" + std::to_string(r) + at);
      if (!d.components.empty()) {
        const auto& top = d.components.back();
        c.expect(top.fixed_dims.size() == static_cast<std::size_t>(n) + 1, "fixed dims size" + at);
        if (top.fixed_dims.size() == static_cast<std::size_t>(n) + 1) {
          c.expect(top.fixed_dims[n] == 1, "top component K0(p^n)-fixed" + at);
          c.expect(top.fixed_dims[n - 1] == 0, "top component K0(p^(n-1))-fixed" + at);
        }
      }
    }
  });

  criterion(5, "cuspidal dimensions against the genus formula", 120, [&](Ctx& c) {
    c.expect(genus_dim(11, 2) == 1 && genus_dim(22, 2) == 2 && genus_dim(37, 2) == 2, "genus oracle spot values");
    for (i64 N = 1; N <= 100; ++N) {
      auto s = cache.get(N, 2);
      c.expect(static_cast<i64>(s->cuspidal_dim()) == 2 * genus_dim(N, 2), "cuspidal " + tag(N, 2));
      c.expect(modsym::dim_formula_oracle(N, 2) == genus_dim(N, 2), "library oracle " + tag(N, 2));
    }
    for (i64 N = 1; N <= 40; ++N) {
      auto s = cache.get(N, 4);
      c.expect(static_cast<i64>(s->cuspidal_dim()) == 2 * genus_dim(N, 4), "cuspidal " + tag(N, 4));
    }
    c.expect(cache.get(11, 2)->cuspidal_dim() == 2 && cache.get(22, 2)->cuspidal_dim() == 4 &&
                 cache.get(37, 2)->cuspidal_dim() == 4,
             "spot values 11, 22, 37");
  });

  std::set<std::pair<i64, int>> grid;
  for (i64 N : t1_w2) grid.insert({N, 2});
  for (i64 N : t1_w4) grid.insert({N, 4});
  for (const auto* v : {&t2_w2, &t3_w2, &t5_w2, &lemma_w2, &sec6_w2})
    for (i64 N : *v) grid.insert({N, 2});

  criterion(6, "operator identities on every grid level", 300, [&](Ctx& c) {
    std::set<std::string> seen;
    for (auto [N, w] : grid) {
      auto reports = nf::check_operator_identities(cache, N, w);
      run_reports(c, reports, tag(N, w));
      for (const auto& r : reports) seen.insert(r.id);
    }
    for (const char* id : {"W_squared_identity", "Q_p_quadratic", "Q_pn_cubic", "S_pn_r_quadratic", "cross_prime_commute"})
      c.expect(seen.count(id) == 1, std::string("identity never exercised: ") + id);
  });

  criterion(7, "square-free levels: new space is the -1 eigenspace intersection", 300, [&](Ctx& c) {
    for (i64 N : t1_w2) theorem_level(c, cache, N, 2, nf::Theorem::T1);
    for (i64 N : t1_w4) theorem_level(c, cache, N, 4, nf::Theorem::T1);
  });

  criterion(8, "squared-prime levels: both intersections agree with the new space", 300, [&](Ctx& c) {
    for (i64 N : t2_w2) {
      CheckReport a = nf::check_theorem(cache, N, 2, nf::Theorem::T2);
      CheckReport b = nf::check_theorem(cache, N, 2, nf::Theorem::T2prime);
      const i64 want = 2 * genus_new_dim(N, 2);
      c.expect(a.pass, "T2 " + tag(N, 2));
      c.expect(b.pass, "T2prime " + tag(N, 2));
      // both are exact equalities with the same new space, so they agree with each other
      c.expect(a.lhs_dim == b.lhs_dim && a.rhs_dim == b.rhs_dim, "T2 vs T2prime dims " + tag(N, 2));
      c.expect(a.lhs_dim && static_cast<i64>(*a.lhs_dim) == want, "T2 dim vs genus oracle " + tag(N, 2));
      c.expect(static_cast<i64>(nf::new_symbol_space(cache, N, 2).dim()) == want, "new space dim " + tag(N, 2));
    }
  });

  criterion(9, "general levels: S-kernel characterization", 300,
            [&](Ctx& c) { for (i64 N : t3_w2) theorem_level(c, cache, N, 2, nf::Theorem::T3); });

  criterion(10, "high 2-power levels with squared twists", 300,
            [&](Ctx& c) { for (i64 N : t5_w2) theorem_level(c, cache, N, 2, nf::Theorem::T5); });

  criterion(11, "lemma suite on transferred images", 300, [&](Ctx& c) {
    std::set<std::string> seen;
    for (i64 N : lemma_w2) {
      auto reports = nf::check_lemma_suite(cache, N, 2);
      c.expect(!reports.empty(), "no lemma checks at " + tag(N, 2));
      run_reports(c, reports, tag(N, 2));
      for (const auto& r : reports) seen.insert(r.id);
    }
    for (const char* id : {"Qp_scalar_on_lower_level_image", "Qp_stabilizes_Xp", "W_maps_lower_image_to_shift",
                           "S_top_eigenspace_is_lower_level", "new_in_kernel_of_S_and_S_prime", "Qp2_prime_stabilizes_p_shift"})
      c.expect(seen.count(id) == 1, std::string("lemma never exercised: ") + id);
  });

  criterion(12, "old-space signatures and direct sum", 300, [&](Ctx& c) {
    std::set<int> cases;
    for (i64 N : sec6_w2) {
      auto reports = nf::check_section6(cache, N, 2);
      run_reports(c, reports, tag(N, 2));
      bool direct = false;
      for (const auto& r : reports) {
        if (r.id == "old_space_signature") cases.insert(r.inputs["case"].get<int>());
        if (r.id == "signature_direct_sum") direct = r.pass;
      }
      c.expect(direct, "direct sum missing or failing at " + tag(N, 2));
    }
    c.expect(cases == std::set<int>{1, 2, 3, 4}, "not all four signature cases exercised");
  });

  criterion(13, "cold and warm cache runs give byte-identical JSON", 300, [&](Ctx& c) {
    const std::string base = "heckenew_acceptance_" + std::to_string(::getpid());
    const fs::path d1 = fs::temp_directory_path() / (base + "_a"), d2 = fs::temp_directory_path() / (base + "_b");
    fs::remove_all(d1);
    fs::remove_all(d2);
    auto run = [&](const fs::path& dir, i64 N, const std::string& what) {
      cli::CliConfig cfg;
      cfg.cache_dir = dir;
      std::ostringstream out, err;
      int code = cli::cmd_check(cfg, N, 2, what, out, err);
      c.expect(code == 0, "exit code " + std::to_string(code) + " for " + what + " at N=" + std::to_string(N));
      return out.str();
    };
    for (auto [N, what] : std::vector<std::pair<i64, std::string>>{{33, "T1"}, {45, "auto"}, {48, "lemmas"}, {66, "section6"}}) {
      const std::string cold = run(d1, N, what);
      const std::string warm = run(d1, N, what);
      const std::string other = run(d2, N, what);
      c.expect(!cold.empty() && cold == warm, "cold vs warm at N=" + std::to_string(N));
      c.expect(cold == other, "separate cache dirs at N=" + std::to_string(N));
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
  });

  std::printf("%s: %d of 13 criteria failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
