#ifndef MDFEM_QUADRATURE_HPP
#define MDFEM_QUADRATURE_HPP

#include <functional>
#include <span>
#include <vector>

namespace mdfem {

// Deterministic pairwise summation (fixed reduction tree).
double pairwise_sum(std::span<const double> xs);

struct QuadNodes {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre nodes/weights on [-1,1]; cached per npoints.
const QuadNodes& gauss_legendre(int npoints);

// Gauss-Hermite for the weight exp(-y^2/2)/sqrt(2 pi): integrates
// int f(y) rho(y) dy = sum w_i f(x_i).  Cached per npoints.
const QuadNodes& gauss_hermite_prob(int npoints);

// Composite Gauss-Legendre on [a,b] with dyadic refinement until the value
// stabilizes to rel_tol (plus a tiny absolute floor).  Deterministic.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int gl_points = 12);

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace mdfem

#endif
