#include "mdfem/allocate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mdfem/gausscube.hpp"

namespace mdfem {

RateParams derive_rates(double pstar, double tau, double dprime) {
  if (!(pstar > 0.0 && pstar < 1.0)) throw std::invalid_argument("derive_rates: pstar in (0,1)");
  if (!(tau > 0.0) || !(dprime > 0.0)) throw std::invalid_argument("derive_rates: tau, dprime > 0");
  RateParams r;
  r.pstar = pstar;
  r.tau = tau;
  r.dprime = dprime;
  r.lambda = (1.0 - pstar) / (pstar * (1.0 + dprime / tau));
  if (r.lambda < 1.0 - 1e-12)
    throw std::domain_error(
        "derive_rates: lambda < 1 (p* > 1/(2+d'/tau)); the randomized first-order branch is not "
        "implemented");
  r.lambda = std::max(r.lambda, 1.0);
  r.alpha = static_cast<int>(std::floor(r.lambda + 1e-12)) + 1;
  r.alpha1 = 0.5 * r.alpha + 0.25;
  return r;
}

namespace {

double pounds(const IndexSet& u) {
  if (u.empty()) return 1.0;  // a lone anchor solve still has unit cost
  return std::ldexp(double(u.size()), static_cast<int>(u.size()));
}

double constant_for(const RateParams& r, int card, ConstantsMode mode, double c_practical) {
  if (card == 0) return 1.0;
  if (mode == ConstantsMode::Practical) return std::pow(c_practical, card);
  return bound_constants(r.alpha, r.lambda, card).C_full;
}

}  // namespace

Allocation allocate(const RateParams& r, const ActiveSet& aset, const Weights& w, double epsilon,
                    ConstantsMode mode, double c_practical) {
  if (aset.subsets.empty()) throw std::invalid_argument("allocate: empty active set");
  if (!(epsilon > 0.0)) throw std::invalid_argument("allocate: epsilon > 0 required");
  Allocation out;
  out.epsilon = epsilon;
  const double tau = r.tau, dp = r.dprime, lam = r.lambda;
  const double expo = 1.0 / (tau + lam * (tau + dp));
  out.B = std::pow(std::pow(dp, dp) * std::pow(lam, tau + dp) / std::pow(tau, dp), expo);

  out.entries.reserve(aset.subsets.size());
  for (const auto& e : aset.subsets) {
    Allocation::Entry a;
    a.u = e.u;
    const int card = static_cast<int>(e.u.size());
    const double card_pow = (card == 0) ? 1.0 : std::pow(double(card), r.alpha1 * card);
    a.a_u = e.gamma_u * std::pow(2.0, lam) * constant_for(r, card, mode, c_practical) * card_pow;
    a.pounds_u = pounds(e.u);
    out.K_eps += std::pow(std::pow(a.a_u, tau) * std::pow(2.0, lam * card * dp) *
                              std::pow(a.pounds_u, lam * tau),
                          expo);
    out.entries.push_back(std::move(a));
  }

  const double S = std::pow(2.0 / epsilon * (1.0 + lam * dp / tau) * std::pow(out.B, -lam) * out.K_eps,
                            1.0 / lam);  // = xi^(tau * expo)
  out.xi = std::pow(S, 1.0 / (tau * expo));

  double constraint_sum = 0.0;
  for (auto& a : out.entries) {
    const int card = static_cast<int>(a.u.size());
    a.k_u = out.B * S *
            std::pow(std::pow(a.a_u, tau + dp) /
                         (std::pow(2.0, double(card) * dp) * std::pow(a.pounds_u, tau)),
                     expo);
    if (!std::isfinite(a.k_u)) throw std::overflow_error("allocate: k_u overflow");
    const double cont_h = std::pow(lam * dp / tau * a.a_u / std::ldexp(1.0, card), 1.0 / tau) *
                          std::pow(a.k_u, -lam / tau);
    constraint_sum += a.a_u * std::pow(a.k_u, -lam);

    if (a.u.empty()) {
      a.n_u = 1.0;  // exact anchor evaluation
      a.m_u = 0;
    } else {
      const double kfloor = std::max(1.0, std::floor(a.k_u));
      a.m_u = static_cast<int>(std::floor(std::log2(kfloor) + 1e-12));
      a.n_u = std::ldexp(1.0, a.m_u);
    }
    if (!(cont_h > 0.0)) throw std::runtime_error("allocate: nonpositive mesh width");
    const double elems = std::ceil(1.0 / cont_h - 1e-12);
    if (elems > 1e7) throw std::runtime_error("allocate: infeasible mesh (element guard exceeded)");
    a.elements = std::max(1, static_cast<int>(elems));
    a.h_u = 1.0 / a.elements;
    a.T_u = (a.n_u >= 2.0) ? truncation_T(a.n_u, lam) : 2.0;

    out.error_certificate +=
        a.a_u * std::pow(a.k_u, -lam) + std::ldexp(1.0, card) * std::pow(a.h_u, tau);
  }
  out.constraint_residual =
      (1.0 + lam * dp / tau) * constraint_sum / (0.5 * epsilon) - 1.0;
  return out;
}

double cost_of(const Allocation& alloc, double dprime) {
  double cost = 0.0;
  for (const auto& a : alloc.entries)
    cost += a.n_u * std::pow(double(a.elements), dprime) * a.pounds_u;
  return cost;
}

CostExponents exponents(double pstar, double tau, double dprime) {
  if (!(pstar > 0.0 && pstar < 1.0)) throw std::invalid_argument("exponents: pstar in (0,1)");
  CostExponents e;
  const double ratio = dprime / tau;
  e.a_mdfem = (pstar + ratio) / (1.0 - pstar);
  e.higher_order_branch = pstar <= 1.0 / (2.0 + ratio) + 1e-15;
  e.qmcfem_low_pstar = pstar <= 2.0 / 3.0 + 1e-15;
  const double fem_part = std::max(2.0 * pstar / (4.0 - pstar), ratio);
  e.a_qmcfem = (e.qmcfem_low_pstar ? 1.0 : 4.0 * pstar / (2.0 + pstar)) + fem_part;
  return e;
}

std::string allocation_csv(const Allocation& alloc) {
  std::ostringstream os;
  os.precision(17);
  os << "u;n_u;h_u;T_u;a_u\n";
  for (const auto& a : alloc.entries)
    os << index_set_label(a.u) << ';' << a.n_u << ';' << a.h_u << ';' << a.T_u << ';' << a.a_u
       << '\n';
  return os.str();
}

}  // namespace mdfem
