#ifndef MDFEM_RANDOMFIELD_HPP
#define MDFEM_RANDOMFIELD_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mdfem {

// Sorted set of distinct positive dimension indices.
using IndexSet = std::vector<int>;

void validate_index_set(const IndexSet& u);

enum class PhiFamily { Sine, HaarLike };
enum class BFamily { PowerLaw, Geometric };

// Lognormal diffusion coefficient a(x, y_v) = exp(sum_{j in v} y_j phi_j(x))
// on D = (0,1) with closed-form basis families:
//   sine:      phi_j(x) = c j^(-sigma) sin(j pi x)
//   haar-like: phi_j(x) = c j^(-sigma) h_j(x), h_j the L^inf-normalized Haar
//              wavelet indexed breadth-first
// and weights b_j = j^(-b_exponent) (power law) or 2^(-j) (geometric).
struct FieldSpec {
  PhiFamily family = PhiFamily::Sine;
  double c = 0.25;
  double sigma = 3.0;
  BFamily b_family = BFamily::PowerLaw;
  double b_exponent = 3.0;
  int jmax = 64;  // head length for diagnostics

  double phi(int j, double x) const;
  double b(int j) const;
  // sup_x |phi_j(x)| for the family.
  double phi_sup(int j) const;
  // Analytic bound on sum_{j > jhead} sup_x |phi_j(x)|.
  double phi_tail_bound(int jhead) const;

  void validate() const;
};

// Evaluate a(x, y_v): v and y aligned, cost O(|v|).
// Throws if the exponent magnitude exceeds 700.
double eval_a(const FieldSpec& spec, double x, const IndexSet& v, std::span<const double> y);

// Admissibility constant: sup over a dense grid (>= 4096 points) of
// sum_{j<=jmax} |phi_j(x)| plus the family's analytic tail bound.
double kappa(const FieldSpec& spec);

struct SummabilityReport {
  bool summable = false;
  double partial_sum = 0.0;  // sum_{j<=jmax} b_j^pstar
};

// {b_j} in l^pstar by the closed-form family criterion.
SummabilityReport check_summability(const FieldSpec& spec, double pstar);

// Head/tail sums of b_j and b_j^2 (exact via closed forms where available,
// zeta tail bounds otherwise); used by the norm-bound diagnostics.
double b_sum(const FieldSpec& spec);
double b_sum_squares(const FieldSpec& spec);

}  // namespace mdfem

#endif
