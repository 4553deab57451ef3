#include "mdfem/fem1d.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mdfem/quadrature.hpp"

namespace mdfem {

void Mesh::validate() const {
  if (elements < 1) throw std::invalid_argument("Mesh: elements >= 1 required");
  if (degree < 1) throw std::invalid_argument("Mesh: degree >= 1 required");
  if (free_nodes() < 1) throw std::invalid_argument("Mesh: no interior degrees of freedom");
}

namespace {

// Lagrange shape functions on the reference element [0,1] with equispaced
// nodes xi_i = i/r, tabulated at the quadrature points.
struct RefElement {
  int r;
  std::vector<double> qx, qw;      // quadrature on [0,1]
  std::vector<double> N;           // N[q*(r+1)+a]
  std::vector<double> dN;          // dN[q*(r+1)+a]

  explicit RefElement(int degree) : r(degree) {
    const QuadNodes& gl = gauss_legendre(r + 2);
    const std::size_t nq = gl.x.size();
    qx.resize(nq);
    qw.resize(nq);
    for (std::size_t q = 0; q < nq; ++q) {
      qx[q] = 0.5 * (gl.x[q] + 1.0);
      qw[q] = 0.5 * gl.w[q];
    }
    N.resize(nq * (r + 1));
    dN.resize(nq * (r + 1));
    for (std::size_t q = 0; q < nq; ++q)
      for (int a = 0; a <= r; ++a) {
        N[q * (r + 1) + a] = shape(a, qx[q]);
        dN[q * (r + 1) + a] = shape_deriv(a, qx[q]);
      }
  }

  double node(int a) const { return double(a) / r; }

  double shape(int a, double xi) const {
    double v = 1.0;
    for (int b = 0; b <= r; ++b) {
      if (b == a) continue;
      v *= (xi - node(b)) / (node(a) - node(b));
    }
    return v;
  }

  double shape_deriv(int a, double xi) const {
    double v = 0.0;
    for (int c = 0; c <= r; ++c) {
      if (c == a) continue;
      double term = 1.0 / (node(a) - node(c));
      for (int b = 0; b <= r; ++b) {
        if (b == a || b == c) continue;
        term *= (xi - node(b)) / (node(a) - node(b));
      }
      v += term;
    }
    return v;
  }
};

// Symmetric banded matrix, lower storage: band[i*(bw+1)+b] = A(i, i-b).
struct BandMatrix {
  int n, bw;
  std::vector<double> a;
  BandMatrix(int n_, int bw_) : n(n_), bw(bw_), a(std::size_t(n_) * (bw_ + 1), 0.0) {}
  double& at(int i, int j) {  // requires i >= j, i-j <= bw
    return a[std::size_t(i) * (bw + 1) + (i - j)];
  }
  double get(int i, int j) const {
    if (i < j) std::swap(i, j);
    if (i - j > bw) return 0.0;
    return a[std::size_t(i) * (bw + 1) + (i - j)];
  }

  // In-place Cholesky; throws on nonpositive pivot.
  void factor() {
    for (int i = 0; i < n; ++i) {
      const int j0 = std::max(0, i - bw);
      for (int j = j0; j <= i; ++j) {
        double sum = get(i, j);
        const int k0 = std::max(j0, j - bw);
        for (int k = k0; k < j; ++k) sum -= get(i, k) * get(j, k);
        if (i == j) {
          if (!(sum > 0.0))
            throw std::runtime_error("fem1d: system not positive definite (coefficient <= 0?)");
          at(i, i) = std::sqrt(sum);
        } else {
          at(i, j) = sum / get(j, j);
        }
      }
    }
  }

  void solve(std::vector<double>& x) const {
    for (int i = 0; i < n; ++i) {
      double sum = x[i];
      for (int j = std::max(0, i - bw); j < i; ++j) sum -= get(i, j) * x[j];
      x[i] = sum / get(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      double sum = x[i];
      for (int j = i + 1; j <= std::min(n - 1, i + bw); ++j) sum -= get(j, i) * x[j];
      x[i] = sum / get(i, i);
    }
  }
};

void assemble_from_samples(std::span<const double> a_q, std::span<const double> f_q,
                           const Mesh& mesh, const RefElement& ref, BandMatrix& A,
                           std::vector<double>& rhs) {
  const int r = mesh.degree;
  const double h = mesh.h();
  const std::size_t nq = ref.qx.size();
  for (int e = 0; e < mesh.elements; ++e) {
    for (std::size_t q = 0; q < nq; ++q) {
      const std::size_t gq = e * nq + q;
      const double aq = a_q[gq] * ref.qw[q] / h;
      const double fq = f_q[gq] * ref.qw[q] * h;
      for (int a = 0; a <= r; ++a) {
        const int ga = e * r + a - 1;  // free-node index; -1 and top are Dirichlet
        if (ga < 0 || ga >= A.n) continue;
        rhs[ga] += fq * ref.N[q * (r + 1) + a];
        for (int b = 0; b <= r; ++b) {
          const int gb = e * r + b - 1;
          if (gb < 0 || gb >= A.n || gb > ga) continue;
          A.at(ga, gb) += aq * ref.dN[q * (r + 1) + a] * ref.dN[q * (r + 1) + b];
        }
      }
    }
  }
}

std::vector<double> sample_on_grid(const std::function<double(double)>& f, const Mesh& mesh,
                                   const RefElement& ref) {
  const std::size_t nq = ref.qx.size();
  std::vector<double> out(mesh.elements * nq);
  const double h = mesh.h();
  for (int e = 0; e < mesh.elements; ++e)
    for (std::size_t q = 0; q < nq; ++q) out[e * nq + q] = f((e + ref.qx[q]) * h);
  return out;
}

void assemble(const FemProblem& p, const Mesh& mesh, BandMatrix& A, std::vector<double>& rhs) {
  const RefElement ref(mesh.degree);
  assemble_from_samples(sample_on_grid(p.coefficient, mesh, ref),
                        sample_on_grid(p.source, mesh, ref), mesh, ref, A, rhs);
}

}  // namespace

std::vector<double> assemble_solve(const FemProblem& p, const Mesh& mesh) {
  mesh.validate();
  BandMatrix A(mesh.free_nodes(), mesh.degree);
  std::vector<double> rhs(mesh.free_nodes(), 0.0);
  assemble(p, mesh, A, rhs);
  A.factor();
  A.solve(rhs);
  return rhs;
}

double apply_G_sampled(std::span<const double> g_q, std::span<const double> sol,
                       const Mesh& mesh) {
  const RefElement ref(mesh.degree);
  const int r = mesh.degree;
  const double h = mesh.h();
  const std::size_t nq = ref.qx.size();
  std::vector<double> per_element(mesh.elements);
  for (int e = 0; e < mesh.elements; ++e) {
    double acc = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
      double uh = 0.0;
      for (int a = 0; a <= r; ++a) {
        const int ga = e * r + a - 1;
        if (ga < 0 || ga >= static_cast<int>(sol.size())) continue;
        uh += sol[ga] * ref.N[q * (r + 1) + a];
      }
      acc += ref.qw[q] * g_q[e * nq + q] * uh * h;
    }
    per_element[e] = acc;
  }
  return pairwise_sum(per_element);
}

double apply_G(const FemProblem& p, std::span<const double> sol, const Mesh& mesh) {
  const RefElement ref(mesh.degree);
  return apply_G_sampled(sample_on_grid(p.functional, mesh, ref), sol, mesh);
}

std::vector<double> quadrature_grid(const Mesh& mesh) {
  mesh.validate();
  const RefElement ref(mesh.degree);
  const std::size_t nq = ref.qx.size();
  std::vector<double> out(mesh.elements * nq);
  const double h = mesh.h();
  for (int e = 0; e < mesh.elements; ++e)
    for (std::size_t q = 0; q < nq; ++q) out[e * nq + q] = (e + ref.qx[q]) * h;
  return out;
}

std::vector<double> assemble_solve_sampled(std::span<const double> a_q,
                                           std::span<const double> f_q, const Mesh& mesh) {
  mesh.validate();
  const RefElement ref(mesh.degree);
  if (a_q.size() != ref.qx.size() * mesh.elements || f_q.size() != a_q.size())
    throw std::invalid_argument("assemble_solve_sampled: sample size mismatch");
  BandMatrix A(mesh.free_nodes(), mesh.degree);
  std::vector<double> rhs(mesh.free_nodes(), 0.0);
  assemble_from_samples(a_q, f_q, mesh, ref, A, rhs);
  A.factor();
  A.solve(rhs);
  return rhs;
}

double eval_solution(std::span<const double> sol, const Mesh& mesh, double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const int r = mesh.degree;
  const double h = mesh.h();
  int e = std::min(static_cast<int>(x / h), mesh.elements - 1);
  const double xi = (x - e * h) / h;
  const RefElement ref(r);
  double uh = 0.0;
  for (int a = 0; a <= r; ++a) {
    const int ga = e * r + a - 1;
    if (ga < 0 || ga >= static_cast<int>(sol.size())) continue;
    uh += sol[ga] * ref.shape(a, xi);
  }
  return uh;
}

double solve_residual(const FemProblem& p, std::span<const double> sol, const Mesh& mesh) {
  BandMatrix A(mesh.free_nodes(), mesh.degree);
  std::vector<double> rhs(mesh.free_nodes(), 0.0);
  assemble(p, mesh, A, rhs);
  double rnorm = 0.0, bnorm = 0.0;
  for (int i = 0; i < A.n; ++i) {
    double ax = 0.0;
    for (int j = std::max(0, i - A.bw); j <= std::min(A.n - 1, i + A.bw); ++j)
      ax += A.get(i, j) * sol[j];
    rnorm += (ax - rhs[i]) * (ax - rhs[i]);
    bnorm += rhs[i] * rhs[i];
  }
  return std::sqrt(rnorm) / std::sqrt(bnorm > 0.0 ? bnorm : 1.0);
}

std::string solution_csv(std::span<const double> sol, const Mesh& mesh, int samples) {
  std::ostringstream os;
  os.precision(17);
  os << "x;u\n";
  for (int i = 0; i <= samples; ++i) {
    const double x = double(i) / samples;
    os << x << ';' << eval_solution(sol, mesh, x) << '\n';
  }
  return os.str();
}

}  // namespace mdfem
