#ifndef MDFEM_LATTICE_HPP
#define MDFEM_LATTICE_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdfem/gf2.hpp"

namespace mdfem {

// Exact dyadic rational num / 2^bits in [0,1).  Lattice points are kept in
// this form so Walsh/character tests are exact; conversion to double happens
// at cubature time.
struct Dyadic {
  std::uint64_t num = 0;
  int bits = 0;

  double value() const { return std::ldexp(static_cast<double>(num), -bits); }
  friend bool operator==(const Dyadic&, const Dyadic&) = default;
};

// Polynomial lattice point set in base 2: n = 2^m points in [0,1)^d with
// coordinates theta_m(k(x) q_j(x) / p(x)).
struct LatticeConfig {
  int m = 0;                  // n = 2^m
  int d = 0;                  // dimension before interlacing
  Gf2Poly modulus;            // irreducible, degree m
  std::vector<Gf2Poly> gen;   // d entries, each of degree < m

  std::uint64_t n() const { return std::uint64_t(1) << m; }
  void validate() const;      // throws std::invalid_argument
};

// Interlaced polynomial lattice rule of order alpha: the underlying lattice
// has d = alpha*s dimensions and is digit-interlaced blockwise down to s.
struct InterlacedRule {
  LatticeConfig lattice;
  int alpha = 2;
  int s = 1;

  std::uint64_t n() const { return lattice.n(); }
  void validate() const;
};

// Numerator of theta_m(k q / p); the dyadic value is num / 2^m.
std::uint64_t theta_num(Gf2Poly k, Gf2Poly q, Gf2Poly p, int m);
Dyadic theta_m(Gf2Poly k, Gf2Poly q, Gf2Poly p, int m);

// All 2^m points, ordered by k = 0 .. 2^m-1.
std::vector<std::vector<Dyadic>> lattice_points(const LatticeConfig& cfg);
std::vector<std::vector<Dyadic>> interlace_points(const InterlacedRule& rule);

// Digit interlacing of alpha dyadic numbers with `bits` digits each.
Dyadic interlace_digits(std::span<const Dyadic> block, int alpha);

// Sum of the alpha most significant binary digit positions of k.
std::uint64_t mu_alpha(std::uint64_t k, int alpha);

// k is in the dual lattice iff sum_j tr_m(k_j) q_j == 0 (mod p).
bool dual_membership(const LatticeConfig& cfg, std::span<const std::uint64_t> k);

// E_d(q) = sum over nonzero dual k of 2^(-alpha mu_1(k)), evaluated through
// the closed-form Walsh kernel as a per-point product.
double quality_E(const LatticeConfig& cfg, int alpha);

// Prop-style bound on E_d for a CBC-constructed vector, any lambda in [1,alpha).
double cbc_quality_bound(int m, int d, int alpha, double lambda);

// Greedy per-dimension construction minimizing E_d; ties broken by smallest
// candidate bitmask.  Deterministic.
InterlacedRule cbc_construct(int m, int s, int alpha);

// Ctilde_{alpha,lambda,s} and the worst-case error bound Ctilde / n^lambda
// for the unanchored Sobolev space on the unit cube.
double ctilde_constant(int alpha, double lambda, int s);
double wce_bound(const InterlacedRule& rule, double lambda);

// Text format "m d alpha p q_1 ... q_d" with polynomials as hex bitmasks.
std::string serialize_rule(const InterlacedRule& rule);
InterlacedRule parse_rule(const std::string& text);

namespace detail {
// omega(y) = sum_{k>=0} 2^(-alpha mu_1(k)) wal_k(y) for dyadic y with m
// digits, tabulated by the numerator bit length (index 0 = numerator 0).
std::vector<double> walsh_kernel_table(int m, int alpha);
// All n coordinate numerators for one generator, in k order.
void coordinate_column(Gf2Poly q, Gf2Poly p, int m, std::vector<std::uint32_t>& out);
}  // namespace detail

}  // namespace mdfem

#endif
