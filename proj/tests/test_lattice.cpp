#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mdfem/lattice.hpp"

using namespace mdfem;

namespace {

// Formal Laurent division oracle: first `terms` coefficients w_1, w_2, ... of
// the expansion of k(x) q(x) / p(x), by coefficient-vector long division.
std::vector<int> laurent_oracle(std::uint64_t k, std::uint64_t q, std::uint64_t p, int terms) {
  auto degree_of = [](const std::vector<int>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i >= 0; --i)
      if (v[i]) return i;
    return -1;
  };
  // numerator = k*q, shifted by x^terms so the wanted coefficients become
  // nonnegative powers of the quotient
  std::vector<int> num(200, 0), den(200, 0);
  for (int i = 0; i < 64; ++i)
    if ((k >> i) & 1)
      for (int j = 0; j < 64; ++j)
        if ((q >> j) & 1) num[i + j + terms] ^= 1;
  for (int i = 0; i < 64; ++i)
    if ((p >> i) & 1) den[i] = 1;
  const int dd = degree_of(den);
  std::vector<int> quot(200, 0);
  int dn = degree_of(num);
  while (dn >= dd) {
    quot[dn - dd] ^= 1;
    for (int i = 0; i <= dd; ++i) num[dn - dd + i] ^= den[i];
    dn = degree_of(num);
  }
  std::vector<int> w(terms + 1, 0);
  for (int i = 1; i <= terms; ++i) w[i] = quot[terms - i];
  return w;
}

// wal_k(y) for dyadic y via explicit digit arrays.
int walsh_oracle(std::uint64_t k, Dyadic y) {
  int parity = 0;
  for (int i = 1; i <= y.bits; ++i) {
    const int digit = (y.num >> (y.bits - i)) & 1;
    const int kappa = (k >> (i - 1)) & 1;
    parity ^= digit & kappa;
  }
  return parity ? -1 : 1;
}

LatticeConfig random_config(int m, int d, std::mt19937_64& rng) {
  LatticeConfig cfg;
  cfg.m = m;
  cfg.d = d;
  cfg.modulus = smallest_irreducible(m);
  std::uniform_int_distribution<std::uint64_t> dist(1, (std::uint64_t(1) << m) - 1);
  for (int j = 0; j < d; ++j) cfg.gen.push_back(Gf2Poly(dist(rng)));
  return cfg;
}

double direct_dual_sum(const LatticeConfig& cfg, int alpha, int kbits) {
  // plain truncated sum over all k with components < 2^kbits
  const std::uint64_t lim = std::uint64_t(1) << kbits;
  std::vector<std::uint64_t> k(cfg.d, 0);
  double acc = 0.0;
  while (true) {
    bool zero = true;
    for (auto v : k) zero &= v == 0;
    if (!zero && dual_membership(cfg, k)) {
      std::uint64_t mu = 0;
      for (auto v : k) mu += mu_alpha(v, 1);
      acc += std::ldexp(1.0, -static_cast<int>(alpha * mu));
    }
    int j = 0;
    while (j < cfg.d && ++k[j] == lim) k[j++] = 0;
    if (j == cfg.d) break;
  }
  return acc;
}

double dual_tail_bound(int d, int alpha, int kbits) {
  const double x = std::ldexp(1.0, 1 - alpha);
  const double sigma_all = 1.0 + 0.5 * x / (1.0 - x);
  const double sigma_tail = 0.5 * std::pow(x, kbits + 1) / (1.0 - x);
  return d * sigma_tail * std::pow(sigma_all, d - 1);
}

}  // namespace

TEST_CASE("theta_m basics and Laurent oracle") {
  const Gf2Poly p(0b111);  // x^2+x+1
  CHECK(theta_m(Gf2Poly(0), Gf2Poly(1), p, 2) == Dyadic{0, 2});

  // k=1, q=1, p=x^2+x+1, m=2 against the oracle
  const auto w = laurent_oracle(1, 1, 0b111, 2);
  std::uint64_t expect = 0;
  for (int i = 1; i <= 2; ++i) expect |= std::uint64_t(w[i]) << (2 - i);
  CHECK(theta_num(Gf2Poly(1), Gf2Poly(1), p, 2) == expect);

  // wider sweep at several moduli
  for (int m : {1, 2, 3, 5}) {
    const Gf2Poly mod = smallest_irreducible(m);
    for (std::uint64_t k = 0; k < (std::uint64_t(1) << m); ++k)
      for (std::uint64_t q = 1; q < (std::uint64_t(1) << m); ++q) {
        const auto wo = laurent_oracle(k, q, mod.coeffs, m);
        std::uint64_t e = 0;
        for (int i = 1; i <= m; ++i) e |= std::uint64_t(wo[i]) << (m - i);
        CHECK(theta_num(Gf2Poly(k), Gf2Poly(q), mod, m) == e);
      }
  }
}

TEST_CASE("lattice points: origin, m=1 grid, dyadic range") {
  LatticeConfig cfg{1, 1, Gf2Poly(0b11), {Gf2Poly(1)}};
  const auto pts = lattice_points(cfg);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0][0] == Dyadic{0, 1});
  CHECK(pts[1][0] == Dyadic{1, 1});  // 1/2

  std::mt19937_64 rng(11);
  const auto cfg2 = random_config(4, 3, rng);
  for (const auto& pt : lattice_points(cfg2))
    for (const auto& c : pt) {
      CHECK(c.bits == 4);
      CHECK(c.num < 16);  // multiples of 2^-m in [0,1)
    }
}

TEST_CASE("digit interlacing definition cases") {
  const Dyadic half{1, 1};
  const Dyadic zero{0, 1};
  std::vector<Dyadic> b1{half, half};
  CHECK(interlace_digits(b1, 2) == Dyadic{0b11, 2});  // 3/4
  std::vector<Dyadic> b2{half, zero};
  CHECK(interlace_digits(b2, 2) == Dyadic{0b10, 2});  // 1/2
}

TEST_CASE("interlacing matches the digit-array oracle") {
  std::mt19937_64 rng(17);
  for (int alpha : {2, 3})
    for (int m : {1, 3, 6}) {
      std::uniform_int_distribution<std::uint64_t> dist(0, (std::uint64_t(1) << m) - 1);
      for (int rep = 0; rep < 200; ++rep) {
        std::vector<Dyadic> block(alpha);
        for (auto& y : block) y = Dyadic{dist(rng), m};
        const Dyadic out = interlace_digits(block, alpha);
        // oracle: interleave explicit digit arrays
        std::vector<int> digits(alpha * m, 0);
        for (int i = 1; i <= m; ++i)
          for (int j = 1; j <= alpha; ++j)
            digits[alpha * (i - 1) + j - 1] = (block[j - 1].num >> (m - i)) & 1;
        std::uint64_t expect = 0;
        for (int t = 0; t < alpha * m; ++t)
          expect |= std::uint64_t(digits[t]) << (alpha * m - 1 - t);
        CHECK(out == Dyadic{expect, alpha * m});
      }
    }
}

TEST_CASE("interlaced point sets: count, origin, consistency with blockwise oracle") {
  for (int alpha : {2, 3})
    for (int s : {1, 2, 3})
      for (int m : {2, 4}) {
        const auto rule = cbc_construct(m, s, alpha);
        const auto pts = interlace_points(rule);
        const auto base = lattice_points(rule.lattice);
        REQUIRE(pts.size() == rule.n());
        for (int j = 0; j < s; ++j) CHECK(pts[0][j] == Dyadic{0, alpha * m});
        for (std::size_t i = 0; i < pts.size(); ++i)
          for (int j = 0; j < s; ++j) {
            std::vector<Dyadic> block(base[i].begin() + j * alpha,
                                      base[i].begin() + (j + 1) * alpha);
            CHECK(pts[i][j] == interlace_digits(block, alpha));
          }
      }
}

TEST_CASE("mu_alpha definition values") {
  CHECK(mu_alpha(5, 1) == 3);   // 101b, top position 3
  CHECK(mu_alpha(6, 2) == 5);   // 110b, positions 3+2
  CHECK(mu_alpha(0, 1) == 0);
  CHECK(mu_alpha(0, 3) == 0);
  CHECK(mu_alpha(0b1011011, 3) == 7 + 5 + 4);
  CHECK(mu_alpha(0b101, 5) == 3 + 1);  // fewer digits than alpha
}

TEST_CASE("dual membership basics") {
  std::mt19937_64 rng(5);
  const auto cfg = random_config(3, 2, rng);
  std::vector<std::uint64_t> zero(2, 0);
  CHECK(dual_membership(cfg, zero));
  std::vector<std::uint64_t> shifted{std::uint64_t(1) << 3, 0};  // tr_m kills digits >= m
  CHECK(dual_membership(cfg, shifted));
  std::vector<std::uint64_t> wrong_dim(3, 0);
  CHECK_THROWS(dual_membership(cfg, wrong_dim));
}

TEST_CASE("character property: exact 0/1 Walsh sums (small sweep)") {
  std::mt19937_64 rng(23);
  for (int m : {2, 3})
    for (int s : {1, 2}) {
      const auto cfg = random_config(m, s, rng);
      const auto pts = lattice_points(cfg);
      const std::uint64_t lim = std::uint64_t(1) << (2 * m);
      std::vector<std::uint64_t> k(s, 0);
      while (true) {
        long sum = 0;
        for (const auto& pt : pts) {
          int w = 1;
          for (int j = 0; j < s; ++j) w *= walsh_oracle(k[j], pt[j]);
          sum += w;
        }
        const bool dual = dual_membership(cfg, k);
        CHECK(sum == (dual ? long(pts.size()) : 0));
        int j = 0;
        while (j < s && ++k[j] == lim) k[j++] = 0;
        if (j == s) break;
      }
    }
}

TEST_CASE("quality_E equals truncated direct dual sum within tail bound") {
  std::mt19937_64 rng(29);
  struct Case { int m, d, kbits; };
  const Case cases[] = {{1, 1, 8}, {2, 1, 8}, {3, 1, 12}, {4, 1, 16},
                        {2, 2, 8}, {3, 2, 8}, {2, 3, 6},  {3, 3, 6},
                        {2, 4, 6}, {4, 2, 8}, {4, 4, 5}};
  for (const auto& c : cases)
    for (int alpha : {2, 3}) {
      const auto cfg = random_config(c.m, c.d, rng);
      const double closed = quality_E(cfg, alpha);
      CHECK(closed >= 0.0);
      const double direct = direct_dual_sum(cfg, alpha, c.kbits);
      const double tail = dual_tail_bound(c.d, alpha, c.kbits);
      CHECK(std::abs(closed - direct) <= tail + 1e-11 * std::max(1.0, closed));
    }
}

TEST_CASE("full dyadic grid in s=1: closed form vs direct sum") {
  // q = 1: dual = multiples of 2^m, so the direct sum telescopes cleanly
  for (int m : {1, 2, 3, 4}) {
    LatticeConfig cfg{m, 1, smallest_irreducible(m), {Gf2Poly(1)}};
    for (int alpha : {2, 3}) {
      const double closed = quality_E(cfg, alpha);
      const double direct = direct_dual_sum(cfg, alpha, 4 * m > 20 ? 20 : 4 * m);
      const double tail = dual_tail_bound(1, alpha, 4 * m > 20 ? 20 : 4 * m);
      CHECK(std::abs(closed - direct) <= tail + 1e-12);
      // exact value: 2^(-alpha m) * sum_{a>=1} 2^((1-alpha)a - 1)
      const double x = std::ldexp(1.0, 1 - alpha);
      const double exact = std::ldexp(0.5 * x / (1.0 - x), -alpha * m);
      CHECK(closed == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("CBC equals exhaustive minimizer for m=3, s=1, alpha=2") {
  const auto rule = cbc_construct(3, 1, 2);
  const Gf2Poly p = smallest_irreducible(3);
  double best = 1e300;
  std::vector<Gf2Poly> bestq;
  for (std::uint64_t q1 = 1; q1 < 8; ++q1)
    for (std::uint64_t q2 = 1; q2 < 8; ++q2) {
      LatticeConfig cfg{3, 2, p, {Gf2Poly(q1), Gf2Poly(q2)}};
      const double E = quality_E(cfg, 2);
      if (E < best - 1e-15) {
        best = E;
        bestq = cfg.gen;
      }
    }
  REQUIRE(rule.lattice.gen.size() == 2);
  CHECK(rule.lattice.gen[0] == bestq[0]);
  CHECK(rule.lattice.gen[1] == bestq[1]);
  CHECK(quality_E(rule.lattice, 2) == doctest::Approx(best).epsilon(1e-13));
}

TEST_CASE("CBC output: components nonzero, in G_m, bound satisfied on a lambda grid") {
  for (int alpha : {2, 3})
    for (int s : {1, 2})
      for (int m : {3, 5, 7}) {
        const auto rule = cbc_construct(m, s, alpha);
        const int d = alpha * s;
        REQUIRE(static_cast<int>(rule.lattice.gen.size()) == d);
        for (const auto& q : rule.lattice.gen) {
          CHECK(!q.is_zero());
          CHECK(q.degree() < m);
        }
        const double E = quality_E(rule.lattice, alpha);
        for (int i = 0; i < 8; ++i) {
          const double lam = 1.0 + (alpha - 0.01 - 1.0) * i / 7.0;
          CHECK(E <= cbc_quality_bound(m, d, alpha, lam) * (1.0 + 1e-12));
        }
      }
}

TEST_CASE("wce bound values and monotonicity") {
  // s=1, alpha=2, lambda=1: Ctilde = 4*2*[(1.5)^2-1] = 10, bound at n=2 is 5
  CHECK(ctilde_constant(2, 1.0, 1) == doctest::Approx(10.0).epsilon(1e-13));
  const auto r1 = cbc_construct(1, 1, 2);
  CHECK(wce_bound(r1, 1.0) == doctest::Approx(5.0).epsilon(1e-13));

  double prev = 1e300;
  for (int m : {1, 2, 3, 4, 5}) {
    const auto r = cbc_construct(m, 1, 2);
    const double b = wce_bound(r, 1.0);
    CHECK(b < prev);
    prev = b;
  }

  // Ctilde is monotone increasing in lambda on a grid
  double prevc = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double lam = 1.0 + 0.9 * i / 7.0;
    const double c = ctilde_constant(2, lam, 2);
    CHECK(c >= prevc);
    prevc = c;
  }
  CHECK_THROWS(ctilde_constant(2, 2.0, 1));
  CHECK_THROWS(wce_bound(r1, 0.5));
}

TEST_CASE("serialization round trip and determinism") {
  const auto rule = cbc_construct(5, 2, 2);
  const std::string text = serialize_rule(rule);
  const auto back = parse_rule(text);
  CHECK(serialize_rule(back) == text);
  CHECK(back.lattice.modulus == rule.lattice.modulus);
  CHECK(back.lattice.gen == rule.lattice.gen);

  const auto rule2 = cbc_construct(5, 2, 2);
  CHECK(serialize_rule(rule2) == text);
  CHECK(interlace_points(rule2) == interlace_points(rule));
}
