#include "mdfem/gf2.hpp"

#include <bit>
#include <stdexcept>

namespace mdfem {

int Gf2Poly::degree() const {
  return static_cast<int>(std::bit_width(coeffs)) - 1;
}

Gf2Poly gf2_add(Gf2Poly a, Gf2Poly b) { return Gf2Poly(a.coeffs ^ b.coeffs); }

Gf2Poly gf2_mul(Gf2Poly a, Gf2Poly b) {
  if (a.is_zero() || b.is_zero()) return Gf2Poly(0);
  if (a.degree() + b.degree() > 63)
    throw std::overflow_error("gf2_mul: product degree exceeds 63");
  std::uint64_t r = 0, x = a.coeffs, y = b.coeffs;
  while (y) {
    if (y & 1) r ^= x;
    x <<= 1;
    y >>= 1;
  }
  return Gf2Poly(r);
}

void gf2_divmod(Gf2Poly a, Gf2Poly b, Gf2Poly& quot, Gf2Poly& rem) {
  if (b.is_zero()) throw std::domain_error("gf2_divmod: division by zero polynomial");
  std::uint64_t q = 0, r = a.coeffs;
  const int db = b.degree();
  int dr = static_cast<int>(std::bit_width(r)) - 1;
  while (r != 0 && dr >= db) {
    const int sh = dr - db;
    q ^= std::uint64_t(1) << sh;
    r ^= b.coeffs << sh;
    dr = static_cast<int>(std::bit_width(r)) - 1;
  }
  quot = Gf2Poly(q);
  rem = Gf2Poly(r);
}

Gf2Poly gf2_mod(Gf2Poly a, Gf2Poly b) {
  Gf2Poly q, r;
  gf2_divmod(a, b, q, r);
  return r;
}

Gf2Poly gf2_gcd(Gf2Poly a, Gf2Poly b) {
  while (!b.is_zero()) {
    Gf2Poly r = gf2_mod(a, b);
    a = b;
    b = r;
  }
  return a;
}

Gf2Poly gf2_pow2_mod(int e, Gf2Poly p) {
  // repeated squaring of x modulo p
  Gf2Poly r = gf2_mod(Gf2Poly(0b10), p);
  for (int i = 0; i < e; ++i) r = gf2_mod(gf2_mul(r, r), p);
  return r;
}

bool gf2_is_irreducible(Gf2Poly p) {
  const int m = p.degree();
  if (m <= 0) return false;
  if (m == 1) return true;
  if (m > 32) throw std::domain_error("gf2_is_irreducible: degree > 32 unsupported");
  // Rabin: x^(2^m) == x (mod p) and gcd(x^(2^(m/l)) - x, p) == 1 for prime l | m.
  const Gf2Poly x(0b10);
  if (gf2_pow2_mod(m, p) != gf2_mod(x, p)) return false;
  int rest = m;
  for (int l = 2; l * l <= rest; ++l) {
    if (rest % l) continue;
    while (rest % l == 0) rest /= l;
    Gf2Poly g = gf2_gcd(gf2_add(gf2_pow2_mod(m / l, p), x), p);
    if (g.degree() != 0) return false;
  }
  if (rest > 1) {
    Gf2Poly g = gf2_gcd(gf2_add(gf2_pow2_mod(m / rest, p), x), p);
    if (g.degree() != 0) return false;
  }
  return true;
}

Gf2Poly smallest_irreducible(int m) {
  if (m < 1 || m > 32) throw std::domain_error("smallest_irreducible: need 1 <= m <= 32");
  const std::uint64_t lo = std::uint64_t(1) << m;
  for (std::uint64_t c = lo | 1; c < (lo << 1); c += 2) {
    Gf2Poly p(c);
    if (gf2_is_irreducible(p)) return p;
  }
  throw std::logic_error("smallest_irreducible: none found");
}

std::string gf2_to_string(Gf2Poly p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (int i = p.degree(); i >= 0; --i) {
    if (!((p.coeffs >> i) & 1)) continue;
    if (!out.empty()) out += "+";
    if (i == 0)
      out += "1";
    else if (i == 1)
      out += "x";
    else
      out += "x^" + std::to_string(i);
  }
  return out;
}

}  // namespace mdfem
