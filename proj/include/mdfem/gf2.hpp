#ifndef MDFEM_GF2_HPP
#define MDFEM_GF2_HPP

#include <cstdint>
#include <string>

namespace mdfem {

// Polynomial over GF(2), packed into a 64-bit mask: bit i holds the
// coefficient of x^i.  Degree is limited to 63; products that would
// exceed that throw.
struct Gf2Poly {
  std::uint64_t coeffs = 0;

  constexpr Gf2Poly() = default;
  constexpr explicit Gf2Poly(std::uint64_t mask) : coeffs(mask) {}

  bool is_zero() const { return coeffs == 0; }
  int degree() const;  // -1 for the zero polynomial

  friend bool operator==(const Gf2Poly&, const Gf2Poly&) = default;
};

Gf2Poly gf2_add(Gf2Poly a, Gf2Poly b);
Gf2Poly gf2_mul(Gf2Poly a, Gf2Poly b);           // throws on degree overflow
Gf2Poly gf2_mod(Gf2Poly a, Gf2Poly b);           // b != 0
void gf2_divmod(Gf2Poly a, Gf2Poly b, Gf2Poly& quot, Gf2Poly& rem);
Gf2Poly gf2_gcd(Gf2Poly a, Gf2Poly b);

// x^(2^e) mod p, used by the irreducibility test.
Gf2Poly gf2_pow2_mod(int e, Gf2Poly p);

// Rabin test; exact for degree <= 32.
bool gf2_is_irreducible(Gf2Poly p);

// Smallest (by bitmask) irreducible polynomial of degree m with nonzero
// constant term.  Moduli of polynomial lattice rules are drawn from here.
Gf2Poly smallest_irreducible(int m);

std::string gf2_to_string(Gf2Poly p);  // e.g. "x^3+x+1"

}  // namespace mdfem

#endif
