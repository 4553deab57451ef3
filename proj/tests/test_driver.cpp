#include <doctest.h>

#include <cmath>
#include <vector>

#include "mdfem/driver.hpp"
#include "mdfem/quadrature.hpp"

using namespace mdfem;

namespace {

Problem test_problem() {
  Problem p;
  p.field.family = PhiFamily::Sine;
  p.field.c = 0.25;
  p.field.sigma = 3.0;
  p.field.b_family = BFamily::PowerLaw;
  p.field.b_exponent = 3.0;
  p.field.jmax = 512;
  p.source = [](double) { return 1.0; };
  p.functional = [](double) { return 1.0; };
  p.degree = 1;
  p.tau = 2.0;
  p.dprime = 1.0;
  p.pstar = 0.38;
  return p;
}

double solve_G(const Problem& prob, const IndexSet& v, std::span<const double> y, const Mesh& mesh) {
  const FemProblem fp{
      [&](double x) { return eval_a(prob.field, x, v, y); }, prob.source, prob.functional};
  return apply_G(fp, assemble_solve(fp, mesh), mesh);
}

}  // namespace

TEST_CASE("evaluate_Guu: empty set is the single anchor solve") {
  const Problem prob = test_problem();
  const Mesh mesh{16, 1};
  const double got = evaluate_Guu(prob, {}, {}, mesh);
  CHECK(got == doctest::Approx(solve_G(prob, {}, {}, mesh)).epsilon(1e-14));
  // a == 1, f == 1, g == 1: G = int x(1-x)/2 = 1/12 up to the P1 defect
  CHECK(got == doctest::Approx(1.0 / 12.0).epsilon(1e-2));
}

TEST_CASE("evaluate_Guu: singleton equals the difference of two solves") {
  const Problem prob = test_problem();
  const Mesh mesh{32, 1};
  const IndexSet u{1};
  std::vector<double> y{1.3};
  const double got = evaluate_Guu(prob, u, y, mesh);
  const double direct = solve_G(prob, u, y, mesh) - solve_G(prob, {}, {}, mesh);
  CHECK(got == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("evaluate_Guu vanishes when the node has a zero coordinate") {
  const Problem prob = test_problem();
  const Mesh mesh{16, 1};
  const IndexSet u{1, 2};
  std::vector<double> y{0.9, 0.0};
  const double scale = std::abs(solve_G(prob, {}, {}, mesh));
  CHECK(std::abs(evaluate_Guu(prob, u, y, mesh)) <= 1e-10 * scale);
}

TEST_CASE("run with a huge epsilon collapses to one anchor solve") {
  const Problem prob = test_problem();
  const auto out = run(prob, 2.0e4, ConstantsMode::Practical);  // threshold >= 1 needs eps >= 2 sum_v (gamma M)^p*
  REQUIRE(out.aset.subsets.size() == 1);
  const Mesh mesh{std::max(out.alloc.entries[0].elements, 2), prob.degree};
  CHECK(out.result == doctest::Approx(solve_G(prob, {}, {}, mesh)).epsilon(1e-14));
  CHECK(out.fem_solves == 1);
  CHECK(out.model_cost == doctest::Approx(cost_of(out.alloc, prob.dprime)));
}

TEST_CASE("degenerate field (phi == 0) gives the deterministic answer at any epsilon") {
  Problem prob = test_problem();
  prob.field.c = 0.0;
  const FemProblem det{[](double) { return 1.0; }, prob.source, prob.functional};
  for (double eps : {1.0, 0.25}) {
    const auto out = run(prob, eps, ConstantsMode::Practical);
    // every non-anchor contribution vanishes; only mesh error remains
    const Mesh mesh{std::max(out.alloc.entries[0].elements, 2), prob.degree};
    const double direct = apply_G(det, assemble_solve(det, mesh), mesh);
    CHECK(out.result == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("MDM consistency: exact per-u tensor cubature telescopes (s = 3)") {
  const Problem prob = test_problem();
  const Mesh mesh{16, 1};
  const int s = 3, ngh = 8;
  const QuadNodes& gh = gauss_hermite_prob(ngh);

  // per-u Gauss-Hermite integrals of the anchored terms, summed over all u
  double mdm_total = 0.0;
  for (unsigned mask = 0; mask < (1u << s); ++mask) {
    IndexSet u;
    for (int j = 0; j < s; ++j)
      if (mask & (1u << j)) u.push_back(j + 1);
    const int card = static_cast<int>(u.size());
    double acc = 0.0;
    std::vector<std::size_t> idx(card, 0);
    while (true) {
      std::vector<double> y(card);
      double wgt = 1.0;
      for (int i = 0; i < card; ++i) {
        y[i] = gh.x[idx[i]];
        wgt *= gh.w[idx[i]];
      }
      acc += wgt * evaluate_Guu(prob, u, y, mesh);
      int i = 0;
      while (i < card && ++idx[i] == std::size_t(ngh)) idx[i++] = 0;
      if (i == card) break;
      if (card == 0) break;
    }
    if (card == 0) acc = evaluate_Guu(prob, u, {}, mesh);
    mdm_total += acc;
  }

  // s-truncated tensor expectation of the plain truncated solution
  const IndexSet full{1, 2, 3};
  double direct = 0.0;
  std::vector<std::size_t> idx(s, 0);
  while (true) {
    std::vector<double> y(s);
    double wgt = 1.0;
    for (int i = 0; i < s; ++i) {
      y[i] = gh.x[idx[i]];
      wgt *= gh.w[idx[i]];
    }
    direct += wgt * solve_G(prob, full, y, mesh);
    int i = 0;
    while (i < s && ++idx[i] == std::size_t(ngh)) idx[i++] = 0;
    if (i == s) break;
  }
  CHECK(mdm_total == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("reference: degenerate field equals the deterministic solve") {
  Problem prob = test_problem();
  prob.field.c = 0.0;
  const double ref = reference(prob, 3, 4, 1.0 / 64, RefMethod::GaussHermite, 1e-4);
  const Mesh mesh{128, 1};  // the self-consistency pass refines to h/2
  const FemProblem det{[](double) { return 1.0; }, prob.source, prob.functional};
  CHECK(ref == doctest::Approx(apply_G(det, assemble_solve(det, mesh), mesh)).epsilon(1e-12));
}

TEST_CASE("reference: Gauss-Hermite and QMC paths agree for a one-term field") {
  Problem prob = test_problem();
  prob.field.sigma = 8.0;  // concentrates the field on j = 1
  const double gh = reference(prob, 1, 48, 1.0 / 128, RefMethod::GaussHermite, 1e-4);
  const double qmc = reference(prob, 1, 1 << 12, 1.0 / 128, RefMethod::Qmc, 1e-4);
  CHECK(gh == doctest::Approx(qmc).epsilon(1e-6));
}

TEST_CASE("reference self-consistency guard trips on hopeless tolerances") {
  const Problem prob = test_problem();
  CHECK_THROWS(reference(prob, 2, 2, 0.25, RefMethod::GaussHermite, 1e-14));
}

TEST_CASE("runs are bit-identical across invocations") {
  const Problem prob = test_problem();
  const auto r1 = run(prob, 0.5, ConstantsMode::Practical);
  const auto r2 = run(prob, 0.5, ConstantsMode::Practical);
  CHECK(r1.result == r2.result);  // exact equality on purpose
  CHECK(r1.model_cost == r2.model_cost);
  CHECK(r1.contributions == r2.contributions);
  CHECK(run_csv(r1, prob.dprime) == run_csv(r2, prob.dprime));

  const double ref1 = reference(prob, 2, 8, 1.0 / 32, RefMethod::GaussHermite, 1e-3);
  const double ref2 = reference(prob, 2, 8, 1.0 / 32, RefMethod::GaussHermite, 1e-3);
  CHECK(ref1 == ref2);
}

TEST_CASE("run errors shrink with epsilon against the reference") {
  const Problem prob = test_problem();
  const double ref = reference(prob, 5, 6, 1.0 / 128, RefMethod::GaussHermite, 1e-5);
  const double e1 = std::abs(run(prob, 4.0, ConstantsMode::Practical).result - ref);
  const double e2 = std::abs(run(prob, 0.25, ConstantsMode::Practical).result - ref);
  CHECK(e2 <= e1 * 2.0);  // generous jitter allowance at unit-test scale
}

TEST_CASE("run report is JSON-shaped and carries the cost") {
  const Problem prob = test_problem();
  const auto out = run(prob, 1.0, ConstantsMode::Practical);
  const std::string rep = run_report(out);
  CHECK(rep.find("\"result\":") != std::string::npos);
  CHECK(rep.find("\"model_cost\":") != std::string::npos);
  const std::string csv = run_csv(out, prob.dprime);
  CHECK(csv.rfind("u;n_u;h_u;contribution;cost\n", 0) == 0);
}
