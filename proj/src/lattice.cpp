#include "mdfem/lattice.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

#include "mdfem/quadrature.hpp"

namespace mdfem {

void LatticeConfig::validate() const {
  if (m < 1 || m > 32) throw std::invalid_argument("LatticeConfig: need 1 <= m <= 32");
  if (d < 1) throw std::invalid_argument("LatticeConfig: need d >= 1");
  if (modulus.degree() != m) throw std::invalid_argument("LatticeConfig: deg(modulus) != m");
  if (!gf2_is_irreducible(modulus)) throw std::invalid_argument("LatticeConfig: modulus not irreducible");
  if (static_cast<int>(gen.size()) != d) throw std::invalid_argument("LatticeConfig: gen size != d");
  for (const Gf2Poly& q : gen)
    if (q.degree() >= m) throw std::invalid_argument("LatticeConfig: generator degree >= m");
}

void InterlacedRule::validate() const {
  lattice.validate();
  if (alpha < 2) throw std::invalid_argument("InterlacedRule: alpha >= 2 required");
  if (s < 1) throw std::invalid_argument("InterlacedRule: s >= 1 required");
  if (lattice.d != alpha * s) throw std::invalid_argument("InterlacedRule: d != alpha*s");
  if (alpha * lattice.m > 63) throw std::invalid_argument("InterlacedRule: alpha*m exceeds bit budget");
}

std::uint64_t theta_num(Gf2Poly k, Gf2Poly q, Gf2Poly p, int m) {
  if (p.is_zero()) throw std::domain_error("theta_num: zero modulus");
  // Laurent digits w_1..w_m of (k q mod p)/p are the quotient of (r << m) / p.
  Gf2Poly r = gf2_mod(gf2_mul(k, q), p);
  Gf2Poly quot, rem;
  gf2_divmod(Gf2Poly(r.coeffs << m), p, quot, rem);
  return quot.coeffs;
}

Dyadic theta_m(Gf2Poly k, Gf2Poly q, Gf2Poly p, int m) {
  if (m < 1) throw std::invalid_argument("theta_m: m >= 1 required");
  return Dyadic{theta_num(k, q, p, m), m};
}

namespace detail {

void coordinate_column(Gf2Poly q, Gf2Poly p, int m, std::vector<std::uint32_t>& out) {
  // theta_num is GF(2)-linear in the bits of k: fill by doubling blocks.
  const std::size_t n = std::size_t(1) << m;
  out.assign(n, 0);
  for (int b = 0; b < m; ++b) {
    const std::uint32_t v =
        static_cast<std::uint32_t>(theta_num(Gf2Poly(std::uint64_t(1) << b), q, p, m));
    const std::size_t blk = std::size_t(1) << b;
    for (std::size_t i = 0; i < blk; ++i) out[blk + i] = out[i] ^ v;
  }
}

std::vector<double> walsh_kernel_table(int m, int alpha) {
  // omega(y) for y = num/2^m with t = m - bitlen(num) leading zero digits:
  //   omega(0) = 1 + x / (2 (1-x))
  //   omega(y) = 1 + (x + ... + x^t)/2 - x^(t+1)/2,   x = 2^(1-alpha).
  const double x = std::ldexp(1.0, 1 - alpha);
  std::vector<double> tab(m + 1);
  tab[0] = 1.0 + x / (2.0 * (1.0 - x));
  for (int a = 1; a <= m; ++a) {
    const int t = m - a;
    double geo = 0.0, xp = 1.0;
    for (int i = 1; i <= t + 1; ++i) {
      xp *= x;
      if (i <= t) geo += xp;
    }
    tab[a] = 1.0 + 0.5 * geo - 0.5 * xp;
  }
  return tab;
}

}  // namespace detail

std::vector<std::vector<Dyadic>> lattice_points(const LatticeConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n();
  std::vector<std::vector<Dyadic>> pts(n, std::vector<Dyadic>(cfg.d));
  std::vector<std::uint32_t> col;
  for (int j = 0; j < cfg.d; ++j) {
    detail::coordinate_column(cfg.gen[j], cfg.modulus, cfg.m, col);
    for (std::size_t i = 0; i < n; ++i) pts[i][j] = Dyadic{col[i], cfg.m};
  }
  return pts;
}

Dyadic interlace_digits(std::span<const Dyadic> block, int alpha) {
  if (static_cast<int>(block.size()) != alpha)
    throw std::invalid_argument("interlace_digits: block size != alpha");
  const int m = block[0].bits;
  for (const Dyadic& y : block)
    if (y.bits != m) throw std::invalid_argument("interlace_digits: mixed digit counts");
  if (alpha * m > 63) throw std::overflow_error("interlace_digits: alpha*m exceeds bit budget");
  std::uint64_t out = 0;
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= alpha; ++j) {
      const std::uint64_t bit = (block[j - 1].num >> (m - i)) & 1u;
      out |= bit << (alpha * m - (alpha * (i - 1) + j));
    }
  return Dyadic{out, alpha * m};
}

std::vector<std::vector<Dyadic>> interlace_points(const InterlacedRule& rule) {
  rule.validate();
  const auto base = lattice_points(rule.lattice);
  const std::size_t n = base.size();
  std::vector<std::vector<Dyadic>> pts(n, std::vector<Dyadic>(rule.s));
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < rule.s; ++j) {
      std::span<const Dyadic> block(base[i].data() + j * rule.alpha, rule.alpha);
      pts[i][j] = interlace_digits(block, rule.alpha);
    }
  return pts;
}

std::uint64_t mu_alpha(std::uint64_t k, int alpha) {
  if (alpha < 1) throw std::invalid_argument("mu_alpha: alpha >= 1 required");
  std::uint64_t total = 0;
  int taken = 0;
  while (k != 0 && taken < alpha) {
    const int pos = std::bit_width(k);  // 1-based index of the leading digit
    total += static_cast<std::uint64_t>(pos);
    k ^= std::uint64_t(1) << (pos - 1);
    ++taken;
  }
  return total;
}

bool dual_membership(const LatticeConfig& cfg, std::span<const std::uint64_t> k) {
  if (static_cast<int>(k.size()) != cfg.d)
    throw std::invalid_argument("dual_membership: dimension mismatch");
  const std::uint64_t mask = (std::uint64_t(1) << cfg.m) - 1;
  Gf2Poly acc(0);
  for (int j = 0; j < cfg.d; ++j)
    acc = gf2_add(acc, gf2_mul(Gf2Poly(k[j] & mask), cfg.gen[j]));
  return gf2_mod(acc, cfg.modulus).is_zero();
}

double quality_E(const LatticeConfig& cfg, int alpha) {
  if (alpha < 2) throw std::invalid_argument("quality_E: alpha >= 2 required");
  cfg.validate();
  const std::size_t n = cfg.n();
  const auto tab = detail::walsh_kernel_table(cfg.m, alpha);

  // Work with psi = omega - 1 and keep per-point products in the form
  // prod-1 to avoid cancellation when the final mean is close to 1.
  std::vector<double> pm1(n, 0.0);
  std::vector<std::uint32_t> col;
  for (int j = 0; j < cfg.d; ++j) {
    detail::coordinate_column(cfg.gen[j], cfg.modulus, cfg.m, col);
    for (std::size_t i = 0; i < n; ++i) {
      const double psi = tab[std::bit_width(col[i])] - 1.0;
      pm1[i] += psi + pm1[i] * psi;
    }
  }
  return pairwise_sum(pm1) / static_cast<double>(n);
}

double cbc_quality_bound(int m, int d, int alpha, double lambda) {
  if (!(lambda >= 1.0 && lambda < alpha))
    throw std::invalid_argument("cbc_quality_bound: lambda in [1,alpha) required");
  const double n1 = std::pow(2.0, m) - 1.0;
  const double base = 1.0 + 1.0 / (std::pow(2.0, double(alpha) / lambda) - 2.0);
  return std::pow(2.0 / n1, lambda) * std::pow(std::pow(base, d) - 1.0, lambda);
}

InterlacedRule cbc_construct(int m, int s, int alpha) {
  if (m < 1 || s < 1 || alpha < 2) throw std::invalid_argument("cbc_construct: bad sizes");
  if (alpha * m > 63 || m > 32) throw std::overflow_error("cbc_construct: bit budget exceeded");
  const int d = alpha * s;
  const Gf2Poly p = smallest_irreducible(m);
  const std::size_t n = std::size_t(1) << m;
  const auto tab = detail::walsh_kernel_table(m, alpha);

  std::vector<double> psi_of(n);  // psi by numerator value is cheaper via column
  std::vector<double> pm1(n, 0.0);
  std::vector<std::uint32_t> col, best_col;
  std::vector<Gf2Poly> gen;
  gen.reserve(d);

  for (int dim = 0; dim < d; ++dim) {
    double best_score = 0.0;
    std::uint64_t best_q = 0;
    for (std::uint64_t qb = 1; qb < n; ++qb) {
      detail::coordinate_column(Gf2Poly(qb), p, m, col);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double psi = tab[std::bit_width(col[i])] - 1.0;
        acc += pm1[i] + psi + pm1[i] * psi;
      }
      if (best_q == 0 || acc < best_score) {
        best_score = acc;
        best_q = qb;
        best_col.swap(col);
      }
    }
    gen.push_back(Gf2Poly(best_q));
    for (std::size_t i = 0; i < n; ++i) {
      const double psi = tab[std::bit_width(best_col[i])] - 1.0;
      pm1[i] += psi + pm1[i] * psi;
    }
  }

  InterlacedRule rule{LatticeConfig{m, d, p, std::move(gen)}, alpha, s};
  rule.validate();
  return rule;
}

double ctilde_constant(int alpha, double lambda, int s) {
  if (!(lambda >= 1.0 && lambda < alpha))
    throw std::invalid_argument("ctilde_constant: lambda in [1,alpha) required");
  const double inner = 1.0 + 1.0 / (std::pow(2.0, double(alpha) / lambda) - 2.0);
  return std::pow(4.0, lambda) * std::pow(2.0, 0.5 * alpha * (alpha - 1) * s) *
         std::pow(std::pow(inner, double(alpha) * s) - 1.0, lambda);
}

double wce_bound(const InterlacedRule& rule, double lambda) {
  return ctilde_constant(rule.alpha, lambda, rule.s) /
         std::pow(static_cast<double>(rule.n()), lambda);
}

std::string serialize_rule(const InterlacedRule& rule) {
  std::ostringstream os;
  os << rule.lattice.m << ' ' << rule.lattice.d << ' ' << rule.alpha << ' ' << std::hex
     << rule.lattice.modulus.coeffs;
  for (const Gf2Poly& q : rule.lattice.gen) os << ' ' << q.coeffs;
  os << '\n';
  return os.str();
}

InterlacedRule parse_rule(const std::string& text) {
  std::istringstream is(text);
  int m = 0, d = 0, alpha = 0;
  if (!(is >> std::dec >> m >> d >> alpha)) throw std::invalid_argument("parse_rule: bad header");
  std::uint64_t p = 0;
  if (!(is >> std::hex >> p)) throw std::invalid_argument("parse_rule: bad modulus");
  std::vector<Gf2Poly> gen(d);
  for (int j = 0; j < d; ++j) {
    std::uint64_t q = 0;
    if (!(is >> std::hex >> q)) throw std::invalid_argument("parse_rule: bad generator");
    gen[j] = Gf2Poly(q);
  }
  if (alpha < 2 || d % alpha != 0) throw std::invalid_argument("parse_rule: bad alpha/d");
  InterlacedRule rule{LatticeConfig{m, d, Gf2Poly(p), std::move(gen)}, alpha, d / alpha};
  rule.validate();
  return rule;
}

}  // namespace mdfem
