#include <doctest.h>

#include <cmath>
#include <vector>

#include "mdfem/fem1d.hpp"
#include "mdfem/quadrature.hpp"

using namespace mdfem;

namespace {

const auto one = [](double) { return 1.0; };
const auto zero = [](double) { return 0.0; };

}  // namespace

TEST_CASE("P1 nodal exactness for a == 1, f == 1") {
  const Mesh mesh{8, 1};
  const FemProblem p{one, one, one};
  const auto sol = assemble_solve(p, mesh);
  REQUIRE(static_cast<int>(sol.size()) == mesh.free_nodes());
  for (int i = 0; i < mesh.free_nodes(); ++i) {
    const double x = (i + 1) * mesh.h();
    CHECK(sol[i] == doctest::Approx(0.5 * x * (1.0 - x)).epsilon(1e-13));
  }
}

TEST_CASE("zero source gives the zero solution") {
  const Mesh mesh{16, 2};
  const auto sol = assemble_solve(FemProblem{one, zero, one}, mesh);
  for (double v : sol) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("nonpositive coefficient is reported") {
  const Mesh mesh{8, 1};
  CHECK_THROWS(assemble_solve(FemProblem{[](double) { return -1.0; }, one, one}, mesh));
}

TEST_CASE("L2 error order 2 for r=1 on the manufactured sine solution") {
  // -u'' = pi^2 sin(pi x), u = sin(pi x)
  const FemProblem p{one, [](double x) { return M_PI * M_PI * std::sin(M_PI * x); }, one};
  std::vector<double> xs, ys;
  for (int k = 3; k <= 9; ++k) {
    const Mesh mesh{1 << k, 1};
    const auto sol = assemble_solve(p, mesh);
    // L2 error by composite quadrature over elements
    const QuadNodes& gl = gauss_legendre(5);
    double err2 = 0.0;
    for (int e = 0; e < mesh.elements; ++e)
      for (std::size_t q = 0; q < gl.x.size(); ++q) {
        const double x = (e + 0.5 * (gl.x[q] + 1.0)) * mesh.h();
        const double d = eval_solution(sol, mesh, x) - std::sin(M_PI * x);
        err2 += 0.5 * gl.w[q] * mesh.h() * d * d;
      }
    xs.push_back(double(k));
    ys.push_back(std::log2(std::sqrt(err2)));
  }
  const double order = -fit_slope(xs, ys);
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);
}

TEST_CASE("apply_G: analytic value for g == 1 on the parabola, zero for g == 0") {
  const Mesh mesh{32, 1};
  const FemProblem p{one, one, one};
  const auto sol = assemble_solve(p, mesh);
  // int_0^1 x(1-x)/2 dx = 1/12; P1 interpolates the parabola at nodes, the
  // quadrature of the piecewise-linear interpolant carries an O(h^2) defect
  CHECK(apply_G(p, sol, mesh) == doctest::Approx(1.0 / 12.0).epsilon(1e-3));
  const FemProblem p0{one, one, zero};
  CHECK(apply_G(p0, sol, mesh) == 0.0);
}

TEST_CASE("functional error order 2r via Richardson-extrapolated reference") {
  // variable coefficient, smooth g
  const FemProblem p{[](double x) { return 1.0 + 0.5 * x; },
                     [](double x) { return std::sin(M_PI * x); },
                     [](double x) { return std::cos(0.5 * M_PI * x); }};
  for (int r : {1, 2}) {
    // Richardson reference from the two finest meshes
    const Mesh fine1{1 << 10, r}, fine2{1 << 11, r};
    const double g1 = apply_G(p, assemble_solve(p, fine1), fine1);
    const double g2 = apply_G(p, assemble_solve(p, fine2), fine2);
    const double rate = std::pow(2.0, 2.0 * r);
    const double ref = g2 + (g2 - g1) / (rate - 1.0);

    std::vector<double> xs, ys;
    const int kmax = (r == 1) ? 8 : 6;
    for (int k = 3; k <= kmax; ++k) {
      const Mesh mesh{1 << k, r};
      const double g = apply_G(p, assemble_solve(p, mesh), mesh);
      xs.push_back(double(k));
      ys.push_back(std::log2(std::abs(g - ref)));
    }
    CHECK(-fit_slope(xs, ys) >= 2.0 * r - 0.3);
  }
}

TEST_CASE("monotone convergence of the functional error under refinement") {
  const FemProblem p{one, [](double x) { return M_PI * M_PI * std::sin(M_PI * x); }, one};
  const double exact = 2.0 / M_PI;  // int sin(pi x)
  double prev = 1e300;
  for (int k = 3; k <= 9; ++k) {
    const Mesh mesh{1 << k, 1};
    const double err = std::abs(apply_G(p, assemble_solve(p, mesh), mesh) - exact);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("discrete residual of the solved system") {
  const FemProblem p{[](double x) { return 2.0 + std::sin(3.0 * x); },
                     [](double x) { return 1.0 + x; }, one};
  for (int r : {1, 2, 3}) {
    const Mesh mesh{37, r};
    const auto sol = assemble_solve(p, mesh);
    CHECK(solve_residual(p, sol, mesh) <= 1e-12);
  }
}

TEST_CASE("solution CSV dump has header and samples") {
  const Mesh mesh{4, 1};
  const auto sol = assemble_solve(FemProblem{one, one, one}, mesh);
  const std::string csv = solution_csv(sol, mesh, 8);
  CHECK(csv.rfind("x;u\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
}
