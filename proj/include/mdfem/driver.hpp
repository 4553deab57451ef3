#ifndef MDFEM_DRIVER_HPP
#define MDFEM_DRIVER_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mdfem/allocate.hpp"
#include "mdfem/fem1d.hpp"
#include "mdfem/gausscube.hpp"
#include "mdfem/mdm.hpp"
#include "mdfem/randomfield.hpp"

namespace mdfem {

// Full problem description: lognormal field, PDE data, functional, rates.
struct Problem {
  FieldSpec field;
  std::function<double(double)> source;      // f
  std::function<double(double)> functional;  // g
  int degree = 1;                            // FE polynomial degree r
  double tau = 2.0;
  double dprime = 1.0;
  double pstar = 0.38;

  void validate() const;  // r >= ceil(tau/2), field checks
};

// G(u_u^h)(y_u): alternating sum of 2^|u| FEM solves on the same mesh,
// subsets enumerated in Gray-code order.
double evaluate_Guu(const Problem& prob, const IndexSet& u, std::span<const double> y_u,
                    const Mesh& mesh);

struct MdfemRun {
  RateParams rates;
  double epsilon = 0.0;
  ActiveSet aset;
  Allocation alloc;
  double result = 0.0;
  double model_cost = 0.0;
  double truncation_certificate = 0.0;  // a-priori, scaled units
  double combined_certificate = 0.0;
  std::vector<double> contributions;  // aligned with alloc.entries
  std::uint64_t fem_solves = 0;
  double wall_ms = 0.0;
};

// Assemble the full estimate Q_eps(G(u)) from active set, allocation,
// per-subset cubature rules and FEM solves.
MdfemRun run(const Problem& prob, double epsilon, ConstantsMode mode, double c_practical = 1.0);

enum class RefMethod { Auto, GaussHermite, Qmc };

// s_ref-truncated reference expectation: tensor Gauss-Hermite with n_ref
// points per dimension (s_ref <= 5) or one large mapped interlaced rule with
// about n_ref points in total (s_ref <= 10).  Runs a self-consistency check
// at (h_ref/2, 2 n_ref) and returns the finer value; throws if the two
// differ by more than tol.
double reference(const Problem& prob, int s_ref, int n_ref, double h_ref,
                 RefMethod method = RefMethod::Auto, double tol = 1e-4);

// Per-u CSV "u;n_u;h_u;contribution;cost".
std::string run_csv(const MdfemRun& run, double dprime);

// JSON summary of a run.
std::string run_report(const MdfemRun& run);

// Deterministic parallel map: out[i] = fn(i), order-independent slots.
void parallel_map(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mdfem

#endif
