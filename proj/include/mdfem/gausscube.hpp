#ifndef MDFEM_GAUSSCUBE_HPP
#define MDFEM_GAUSSCUBE_HPP

#include <functional>
#include <span>
#include <vector>

#include "mdfem/lattice.hpp"

namespace mdfem {

// Standard normal density.
double gauss_density(double y);

struct KernelParams {
  int alpha = 2;  // smoothness order >= 1
};

// Anchored Gaussian Sobolev kernel
//   K(x,y) = sum_{tau=1}^{alpha-1} x^tau y^tau / (tau!)^2
//          + 1{xy>0} int_0^{min(|x|,|y|)} (|x|-t)^(a-1) (|y|-t)^(a-1) / ((a-1)!)^2 / rho(t) dt.
double kernel_eval(KernelParams p, double x, double y);

// M = int_R sqrt(K(y,y)) rho(y) dy, adaptive quadrature on |y| <= 40.
// Cached per alpha; tolerance 1e-9.
double kernel_constant_M(int alpha);

// The closed-form estimate from the proof of the M bound; its maximum over
// integer alpha sits at alpha = 3 and stays below 2.767.
double kernel_constant_M_estimate(int alpha);

struct BoundConstants {
  double C1 = 0;         // embedding constant, I0(1/2) variant
  double C1_alt = 0;     // same expression with I0(1/4); the source is
                         // inconsistent between the two, so both are reported
  double C_diamond = 0;  // Hermite-moment constant behind C1
  double C3 = 0;         // box-truncation constant
  double C4 = 0;         // cubature constant
  double Ctilde = 0;     // unit-cube worst-case-error constant
  double C_full = 0;     // C_{alpha,lambda,s}
  double M = 0;
};
BoundConstants bound_constants(int alpha, double lambda, int s);

// T = 2 + 2 sqrt(lambda ln n).
double truncation_T(double n, double lambda);

// Diagnostics from the parametric-regularity bounds: C_kappa = 1/(1-delta)
// with delta = min(1-1e-6, 1.01 kappa alpha / ln 2), and
// C_kappa' = sqrt(C_kappa) exp(sum_j [(kappa b_j)^2 + 2 kappa b_j/sqrt(2 pi)]).
double norm_bound_Ckappa(double kappa, int alpha, double* delta_out = nullptr);
double norm_bound_CkappaPrime(double kappa, int alpha, double sum_b, double sum_b2);

// Truncated-and-mapped QMC cubature over R^s with Gaussian weight.  Nodes are
// the interlaced lattice points mapped by T(y) = 2T y - T; weights are
// (2T)^s rho(node) / n.
class GaussCubature {
 public:
  GaussCubature(InterlacedRule rule, double lambda);

  const InterlacedRule& rule() const { return rule_; }
  double lambda() const { return lambda_; }
  double T() const { return T_; }
  std::uint64_t n() const { return rule_.n(); }
  int s() const { return rule_.s; }

  // Node i as a span of s coordinates in [-T,T].
  std::span<const double> node(std::size_t i) const { return {nodes_.data() + i * rule_.s, static_cast<std::size_t>(rule_.s)}; }
  double weight(std::size_t i) const { return weights_[i]; }

  // Q(F) = sum_i w_i F(node_i), deterministic pairwise reduction.
  double integrate(const std::function<double(std::span<const double>)>& F) const;

  // C_{alpha,lambda,s} (ln n)^{(alpha/2+1/4)s} n^{-lambda} * norm.
  double error_bound(double norm) const;

 private:
  InterlacedRule rule_;
  double lambda_;
  double T_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace mdfem

#endif
