#include "mdfem/driver.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mdfem/quadrature.hpp"

namespace mdfem {

void Problem::validate() const {
  field.validate();
  if (degree < 1) throw std::invalid_argument("Problem: degree >= 1 required");
  if (!(tau > 0.0)) throw std::invalid_argument("Problem: tau > 0 required");
  if (degree < static_cast<int>(std::ceil(tau / 2.0 - 1e-12)))
    throw std::invalid_argument("Problem: degree r >= ceil(tau/2) required");
  if (!source || !functional) throw std::invalid_argument("Problem: source/functional not set");
}

void parallel_map(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (n < 64 || hw == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned workers = std::min<unsigned>(hw, 16);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct RuleKey {
  int m, s, alpha;
  bool operator<(const RuleKey& o) const {
    return std::tie(m, s, alpha) < std::tie(o.m, o.s, o.alpha);
  }
};

std::map<RuleKey, InterlacedRule> g_rule_cache;
std::mutex g_rule_mutex;

const InterlacedRule& cached_rule(int m, int s, int alpha) {
  std::lock_guard<std::mutex> lock(g_rule_mutex);
  const RuleKey key{m, s, alpha};
  auto it = g_rule_cache.find(key);
  if (it == g_rule_cache.end()) it = g_rule_cache.emplace(key, cbc_construct(m, s, alpha)).first;
  return it->second;
}

FemProblem make_fem_problem(const Problem& prob, const IndexSet& u, std::span<const double> y) {
  // Inactive coordinates are zero, so a(x, y_v) falls out of the full list.
  std::vector<double> yv(y.begin(), y.end());
  IndexSet uv = u;
  return FemProblem{
      [&prob, uv = std::move(uv), yv = std::move(yv)](double x) {
        return eval_a(prob.field, x, uv, yv);
      },
      prob.source, prob.functional};
}

double solve_and_apply(const Problem& prob, const IndexSet& u, std::span<const double> y,
                       const Mesh& mesh) {
  const FemProblem fp = make_fem_problem(prob, u, y);
  const auto sol = assemble_solve(fp, mesh);
  return apply_G(fp, sol, mesh);
}

// Everything that can be sampled once per mesh: quadrature grid, source,
// functional, and the basis functions of the active dimensions.  Repeated
// solves on the same mesh then cost no transcendental evaluations beyond the
// per-node exp tables.
struct MeshSamples {
  Mesh mesh;
  std::vector<double> f_q, g_q, ones;
  std::vector<double> phi;  // phi[i * Q + q] for dimension u[i]
  std::size_t Q = 0;

  MeshSamples(const Problem& prob, const Mesh& m, const IndexSet& u) : mesh(m) {
    const auto xq = quadrature_grid(mesh);
    Q = xq.size();
    f_q.resize(Q);
    g_q.resize(Q);
    ones.assign(Q, 1.0);
    for (std::size_t q = 0; q < Q; ++q) {
      f_q[q] = prob.source(xq[q]);
      g_q[q] = prob.functional(xq[q]);
    }
    phi.resize(u.size() * Q);
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t q = 0; q < Q; ++q) phi[i * Q + q] = prob.field.phi(u[i], xq[q]);
  }

  double solve_G(std::span<const double> a_q) const {
    const auto sol = assemble_solve_sampled(a_q, f_q, mesh);
    return apply_G_sampled(g_q, sol, mesh);
  }
};

// G(u_u^h) at one node via a Gray-code walk that keeps the sampled
// coefficient up to date with one multiplicative sweep per subset.
double guu_sampled(const MeshSamples& ms, std::span<const double> y_u, double anchor_G,
                   std::uint64_t* solves) {
  const int card = static_cast<int>(y_u.size());
  const std::size_t Q = ms.Q;
  std::vector<double> t_pos(card * Q), t_neg(card * Q);
  for (int i = 0; i < card; ++i)
    for (std::size_t q = 0; q < Q; ++q) {
      const double t = std::exp(y_u[i] * ms.phi[i * Q + q]);
      t_pos[i * Q + q] = t;
      t_neg[i * Q + q] = 1.0 / t;
    }
  std::vector<double> a_q(Q, 1.0);
  std::vector<double> terms;
  terms.reserve(std::size_t(1) << card);
  std::uint64_t gray = 0;
  for (std::uint64_t g = 0; g < (std::uint64_t(1) << card); ++g) {
    double G;
    if (g == 0) {
      G = anchor_G;
    } else {
      const std::uint64_t next = g ^ (g >> 1);
      const int flip = std::countr_zero(gray ^ next);
      gray = next;
      const double* t = ((gray >> flip) & 1) ? &t_pos[flip * Q] : &t_neg[flip * Q];
      for (std::size_t q = 0; q < Q; ++q) a_q[q] *= t[q];
      G = ms.solve_G(a_q);
      if (solves) ++*solves;
    }
    const int cv = std::popcount(gray);
    terms.push_back(((card - cv) % 2 == 0) ? G : -G);
  }
  return pairwise_sum(terms);
}

// Alternating Gray-code sum; the v = empty term can be supplied from a cache
// since it does not depend on the node.
double guu_impl(const Problem& prob, const IndexSet& u, std::span<const double> y_u,
                const Mesh& mesh, const double* anchor_G, std::uint64_t* solves) {
  const int card = static_cast<int>(u.size());
  if (card != static_cast<int>(y_u.size()))
    throw std::invalid_argument("evaluate_Guu: node size != |u|");
  if (card > 25) throw std::invalid_argument("evaluate_Guu: |u| too large");
  std::vector<double> point(card, 0.0);
  std::vector<double> terms;
  terms.reserve(std::size_t(1) << card);
  std::uint64_t gray = 0;
  for (std::uint64_t g = 0; g < (std::uint64_t(1) << card); ++g) {
    if (g > 0) {
      const std::uint64_t next = g ^ (g >> 1);
      const int flip = std::countr_zero(gray ^ next);
      gray = next;
      point[flip] = (gray >> flip) & 1 ? y_u[flip] : 0.0;
    }
    const int cv = std::popcount(gray);
    const double sign = ((card - cv) % 2 == 0) ? 1.0 : -1.0;
    double G;
    if (gray == 0 && anchor_G) {
      G = *anchor_G;
    } else {
      try {
        G = solve_and_apply(prob, u, point, mesh);
      } catch (const std::exception& e) {
        throw std::runtime_error("evaluate_Guu: FEM failure for u=" + index_set_label(u) +
                                 " subset mask=" + std::to_string(gray) + ": " + e.what());
      }
      if (solves) ++*solves;
    }
    terms.push_back(sign * G);
  }
  return pairwise_sum(terms);
}

}  // namespace

double evaluate_Guu(const Problem& prob, const IndexSet& u, std::span<const double> y_u,
                    const Mesh& mesh) {
  validate_index_set(u);
  return guu_impl(prob, u, y_u, mesh, nullptr, nullptr);
}

MdfemRun run(const Problem& prob, double epsilon, ConstantsMode mode, double c_practical) {
  const auto t0 = std::chrono::steady_clock::now();
  prob.validate();
  MdfemRun out;
  out.epsilon = epsilon;
  out.rates = derive_rates(prob.pstar, prob.tau, prob.dprime);

  const double kap = kappa(prob.field);
  if (!(kap < std::log(2.0) / out.rates.alpha))
    throw std::domain_error("run: admissibility failed (kappa >= ln2/alpha)");
  if (!check_summability(prob.field, prob.pstar).summable)
    throw std::domain_error("run: b sequence not p*-summable");

  const double M = kernel_constant_M(out.rates.alpha);
  const Weights w = Weights::from_field(prob.field, M);
  out.aset = build_active_set(w, epsilon, prob.pstar);
  out.alloc = allocate(out.rates, out.aset, w, epsilon, mode, c_practical);

  out.contributions.assign(out.alloc.entries.size(), 0.0);
  std::uint64_t solves = 0;
  for (std::size_t ei = 0; ei < out.alloc.entries.size(); ++ei) {
    const auto& entry = out.alloc.entries[ei];
    // refine below the allocation if needed to keep an interior node
    const int min_elems = prob.degree == 1 ? 2 : 1;
    const Mesh mesh{std::max(entry.elements, min_elems), prob.degree};
    if (entry.u.empty()) {
      out.contributions[ei] = solve_and_apply(prob, entry.u, {}, mesh);
      ++solves;
      continue;
    }
    if (entry.n_u < 2.0) continue;  // zero approximation for n_u in {0,1}
    if (entry.m_u > 20)
      throw std::runtime_error("run: cubature size guard exceeded (m_u > 20, CBC budget)");

    const int s = static_cast<int>(entry.u.size());
    const InterlacedRule& rule = cached_rule(entry.m_u, s, out.rates.alpha);
    const GaussCubature cub(rule, out.rates.lambda);

    const MeshSamples ms(prob, mesh, entry.u);
    const double anchor_G = ms.solve_G(ms.ones);
    ++solves;
    const std::size_t n = cub.n();
    std::vector<double> terms(n);
    std::vector<std::uint64_t> solve_counts(n, 0);
    parallel_map(n, [&](std::size_t i) {
      const double v = guu_sampled(ms, cub.node(i), anchor_G, &solve_counts[i]);
      if (!std::isfinite(v))
        throw std::runtime_error("run: non-finite contribution at node of u=" +
                                 index_set_label(entry.u));
      terms[i] = cub.weight(i) * v;
    });
    for (std::uint64_t c : solve_counts) solves += c;
    out.contributions[ei] = pairwise_sum(terms);
  }

  out.result = pairwise_sum(out.contributions);
  out.model_cost = cost_of(out.alloc, prob.dprime);
  out.truncation_certificate = out.aset.truncation_certificate();
  out.combined_certificate = out.alloc.error_certificate;
  out.fem_solves = solves;
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

namespace {

double full_solution_G(const MeshSamples& ms, std::span<const double> y) {
  const std::size_t Q = ms.Q;
  std::vector<double> a_q(Q);
  for (std::size_t q = 0; q < Q; ++q) {
    double z = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) z += y[i] * ms.phi[i * Q + q];
    a_q[q] = std::exp(z);
  }
  return ms.solve_G(a_q);
}

double reference_gh(const Problem& prob, int s_ref, int n_ref, const Mesh& mesh) {
  const QuadNodes& gh = gauss_hermite_prob(n_ref);
  IndexSet full(s_ref);
  for (int j = 0; j < s_ref; ++j) full[j] = j + 1;
  const MeshSamples ms(prob, mesh, full);
  std::size_t total = 1;
  for (int j = 0; j < s_ref; ++j) {
    total *= n_ref;
    if (total > (std::size_t(1) << 26)) throw std::runtime_error("reference: tensor grid too large");
  }
  std::vector<double> terms(total);
  parallel_map(total, [&](std::size_t flat) {
    std::vector<double> y(s_ref);
    double wgt = 1.0;
    std::size_t rest = flat;
    for (int j = 0; j < s_ref; ++j) {
      const std::size_t idx = rest % n_ref;
      rest /= n_ref;
      y[j] = gh.x[idx];
      wgt *= gh.w[idx];
    }
    terms[flat] = wgt * full_solution_G(ms, y);
  });
  return pairwise_sum(terms);
}

double reference_qmc(const Problem& prob, int s_ref, int n_ref, const Mesh& mesh) {
  int m = 1;
  while ((1 << m) < n_ref && m < 26) ++m;
  const InterlacedRule& rule = cached_rule(m, s_ref, 2);
  const GaussCubature cub(rule, 1.5);
  IndexSet full(s_ref);
  for (int j = 0; j < s_ref; ++j) full[j] = j + 1;
  const MeshSamples ms(prob, mesh, full);
  const std::size_t n = cub.n();
  std::vector<double> terms(n);
  parallel_map(n, [&](std::size_t i) {
    terms[i] = cub.weight(i) * full_solution_G(ms, cub.node(i));
  });
  return pairwise_sum(terms);
}

double reference_once(const Problem& prob, int s_ref, int n_ref, double h_ref, RefMethod method) {
  const int elements = std::max(1, static_cast<int>(std::lround(1.0 / h_ref)));
  const Mesh mesh{elements, prob.degree};
  if (method == RefMethod::Auto) method = (s_ref <= 5) ? RefMethod::GaussHermite : RefMethod::Qmc;
  if (method == RefMethod::GaussHermite) {
    if (s_ref > 5) throw std::invalid_argument("reference: Gauss-Hermite limited to s_ref <= 5");
    return reference_gh(prob, s_ref, n_ref, mesh);
  }
  if (s_ref > 10) throw std::invalid_argument("reference: s_ref <= 10 required");
  return reference_qmc(prob, s_ref, n_ref, mesh);
}

}  // namespace

double reference(const Problem& prob, int s_ref, int n_ref, double h_ref, RefMethod method,
                 double tol) {
  prob.validate();
  if (s_ref < 1 || s_ref > 10) throw std::invalid_argument("reference: s_ref in 1..10 required");
  const double coarse = reference_once(prob, s_ref, n_ref, h_ref, method);
  const double fine = reference_once(prob, s_ref, 2 * n_ref, 0.5 * h_ref, method);
  if (!(std::abs(coarse - fine) <= tol))
    throw std::runtime_error("reference: self-consistency failure (not converged)");
  return fine;
}

std::string run_csv(const MdfemRun& r, double dprime) {
  std::ostringstream os;
  os.precision(17);
  os << "u;n_u;h_u;contribution;cost\n";
  for (std::size_t i = 0; i < r.alloc.entries.size(); ++i) {
    const auto& a = r.alloc.entries[i];
    os << index_set_label(a.u) << ';' << a.n_u << ';' << a.h_u << ';' << r.contributions[i] << ';'
       << a.n_u * std::pow(double(a.elements), dprime) * a.pounds_u << '\n';
  }
  return os.str();
}

std::string run_report(const MdfemRun& r) {
  const auto st = superposition_stats(r.aset);
  std::ostringstream os;
  os.precision(17);
  os << "{\n";
  os << "  \"epsilon\": " << r.epsilon << ",\n";
  os << "  \"result\": " << r.result << ",\n";
  os << "  \"lambda\": " << r.rates.lambda << ",\n";
  os << "  \"alpha\": " << r.rates.alpha << ",\n";
  os << "  \"n_sets\": " << st.count << ",\n";
  os << "  \"max_cardinality\": " << st.max_cardinality << ",\n";
  os << "  \"model_cost\": " << r.model_cost << ",\n";
  os << "  \"truncation_certificate\": " << r.truncation_certificate << ",\n";
  os << "  \"combined_certificate\": " << r.combined_certificate << ",\n";
  os << "  \"fem_solves\": " << r.fem_solves << ",\n";
  os << "  \"wall_ms\": " << r.wall_ms << "\n";
  os << "}\n";
  return os.str();
}

}  // namespace mdfem
