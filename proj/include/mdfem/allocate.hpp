#ifndef MDFEM_ALLOCATE_HPP
#define MDFEM_ALLOCATE_HPP

#include <string>
#include <vector>

#include "mdfem/mdm.hpp"

namespace mdfem {

// Rate parameters derived from the sparsity and approximation exponents.
struct RateParams {
  double pstar = 0.0;
  double tau = 2.0;
  double dprime = 1.0;
  double lambda = 1.0;   // (1-p*) / (p* (1 + d'/tau))
  int alpha = 2;         // floor(lambda) + 1
  double alpha1 = 1.25;  // alpha/2 + 1/4
};

// Rejects the first-order branch (lambda < 1).
RateParams derive_rates(double pstar, double tau, double dprime);

enum class ConstantsMode { Theoretical, Practical };

struct Allocation {
  struct Entry {
    IndexSet u;
    double a_u = 0.0;       // gamma_u 2^lambda C_(alpha,lambda,|u|) |u|^(alpha1 |u|)
    double pounds_u = 1.0;  // 2^|u| |u|, with 1 for the empty set
    double k_u = 0.0;       // continuous Lagrange solution
    double n_u = 1.0;       // largest power of two <= max(1, floor(k_u))
    int m_u = 0;            // log2(n_u)
    double h_u = 1.0;       // rounded down to 1/elements
    int elements = 1;
    double T_u = 2.0;       // 2 + 2 sqrt(lambda ln n_u)
  };
  std::vector<Entry> entries;
  double epsilon = 0.0;
  double B = 0.0;
  double K_eps = 0.0;
  double xi = 0.0;  // Lagrange multiplier
  // (1 + lambda d'/tau) sum a_u k_u^-lambda relative to eps/2, pre-rounding.
  double constraint_residual = 0.0;
  // sum over u of (a_u k_u^-lambda + 2^|u| h_u^tau) with rounded h_u.
  double error_certificate = 0.0;
};

// Lagrange-multiplier allocation of cubature sizes and mesh widths over the
// active set.  In Practical mode C_(alpha,lambda,s) inside a_u is replaced by
// c_practical^s.
Allocation allocate(const RateParams& r, const ActiveSet& aset, const Weights& w, double epsilon,
                    ConstantsMode mode, double c_practical = 1.0);

// Model cost sum_u n_u h_u^-d' pounds_u.
double cost_of(const Allocation& alloc, double dprime);

struct CostExponents {
  double a_mdfem = 0.0;
  double a_qmcfem = 0.0;
  bool higher_order_branch = false;  // p* <= 1/(2 + d'/tau)
  bool qmcfem_low_pstar = false;     // p* <= 2/3 branch of the QMCFEM exponent
};
CostExponents exponents(double pstar, double tau, double dprime);

// CSV rows "u;n_u;h_u;T_u;a_u".
std::string allocation_csv(const Allocation& alloc);

}  // namespace mdfem

#endif
