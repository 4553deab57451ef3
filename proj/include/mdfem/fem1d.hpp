#ifndef MDFEM_FEM1D_HPP
#define MDFEM_FEM1D_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mdfem {

// Uniform mesh on (0,1) with Lagrange elements of degree r.
struct Mesh {
  int elements = 1;
  int degree = 1;

  double h() const { return 1.0 / elements; }
  int free_nodes() const { return degree * elements - 1; }
  void validate() const;
};

// -(a u')' = f on (0,1), u(0) = u(1) = 0, G(v) = int g v dx.
struct FemProblem {
  std::function<double(double)> coefficient;
  std::function<double(double)> source;
  std::function<double(double)> functional;
};

// Galerkin solve with per-element Gauss-Legendre quadrature of r+2 points and
// a banded Cholesky factorization.  Returns the free-node coefficients in
// global node order.  Throws if the system loses positive definiteness
// (signals a <= 0 at a quadrature node).
std::vector<double> assemble_solve(const FemProblem& p, const Mesh& mesh);

// int g u^h dx with the same quadrature order.
double apply_G(const FemProblem& p, std::span<const double> sol, const Mesh& mesh);

// The global quadrature grid of a mesh (elements x (r+2) points, element
// major).  Coefficient fields can be sampled on it once and reused across
// many solves on the same mesh.
std::vector<double> quadrature_grid(const Mesh& mesh);

// Same solve/functional with all fields pre-sampled on quadrature_grid(mesh).
std::vector<double> assemble_solve_sampled(std::span<const double> a_q,
                                           std::span<const double> f_q, const Mesh& mesh);
double apply_G_sampled(std::span<const double> g_q, std::span<const double> sol,
                       const Mesh& mesh);

// Point evaluation of the FE solution.
double eval_solution(std::span<const double> sol, const Mesh& mesh, double x);

// Relative residual ||A u - b|| / ||b|| of the solved system (diagnostic).
double solve_residual(const FemProblem& p, std::span<const double> sol, const Mesh& mesh);

// (x, u^h(x)) samples as CSV text, for debugging.
std::string solution_csv(std::span<const double> sol, const Mesh& mesh, int samples);

}  // namespace mdfem

#endif
