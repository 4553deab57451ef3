#include "mdfem/mdm.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

namespace mdfem {

double Weights::gamma(int j) const {
  if (j < 1) throw std::invalid_argument("Weights::gamma: j >= 1");
  switch (family) {
    case Family::PowerLaw:
      return scale * std::pow(double(j), -param);
    case Family::Geometric:
      return scale * std::pow(param, double(j));
    case Family::Single:
      return j == 1 ? scale : 0.0;
  }
  return 0.0;
}

double Weights::gamma_set(const IndexSet& u) const {
  double g = 1.0;
  for (int j : u) g *= gamma(j);
  return g;
}

double Weights::gammaM_set(const IndexSet& u) const {
  return gamma_set(u) * std::pow(M, double(u.size()));
}

Weights Weights::from_field(const FieldSpec& spec, double M) {
  Weights w;
  w.M = M;
  switch (spec.b_family) {
    case BFamily::PowerLaw:
      w.family = Family::PowerLaw;
      w.scale = std::sqrt(2.0);
      w.param = spec.b_exponent;
      break;
    case BFamily::Geometric:
      w.family = Family::Geometric;
      w.scale = std::sqrt(2.0);
      w.param = 0.5;
      break;
  }
  return w;
}

double anchored_terms(const std::function<double(std::span<const double>)>& F, const IndexSet& u,
                      std::span<const double> y) {
  validate_index_set(u);
  const int card = static_cast<int>(u.size());
  if (card != static_cast<int>(y.size()))
    throw std::invalid_argument("anchored_terms: y size != |u|");
  if (card > 30) throw std::invalid_argument("anchored_terms: |u| too large");
  std::vector<double> point(card, 0.0);
  const std::uint64_t count = std::uint64_t(1) << card;
  double acc = 0.0;
  std::uint64_t gray = 0;
  for (std::uint64_t g = 0; g < count; ++g) {
    if (g > 0) {
      const std::uint64_t next = g ^ (g >> 1);
      const int flip = std::countr_zero(gray ^ next);
      gray = next;
      point[flip] = (gray >> flip) & 1 ? y[flip] : 0.0;
    }
    const int cv = std::popcount(gray);
    const double sign = ((card - cv) % 2 == 0) ? 1.0 : -1.0;
    acc += sign * F(point);
  }
  return acc;
}

namespace {

// Terminating summability check for the infinite products below.
void require_summable(const Weights& w, double pstar) {
  switch (w.family) {
    case Weights::Family::PowerLaw:
      if (!(w.param * pstar > 1.0))
        throw std::domain_error("product_tail: divergent family (param * pstar <= 1)");
      break;
    case Weights::Family::Geometric:
      if (!(std::abs(w.param) < 1.0))
        throw std::domain_error("product_tail: divergent geometric family");
      break;
    case Weights::Family::Single:
      break;
  }
}

double log_product(const Weights& w, double expo) {
  // head by direct summation, then an analytic tail bound on
  // sum_{j>J} (gamma_j M)^expo which also bounds the log1p tail
  const int head = 200000;
  double acc = 0.0;
  for (int j = 1; j <= head; ++j) {
    const double inc = std::log1p(std::pow(w.gammaM(j), expo));
    acc += inc;
    if (inc < 1e-18) return acc;
  }
  switch (w.family) {
    case Weights::Family::PowerLaw: {
      const double q = w.param * expo;  // > 1 by the summability gate
      acc += std::pow(w.scale * w.M, expo) * std::pow(double(head), 1.0 - q) / (q - 1.0);
      break;
    }
    case Weights::Family::Geometric: {
      const double r = std::pow(std::abs(w.param), expo);
      acc += std::pow(w.scale * w.M, expo) * std::pow(r, head + 1) / (1.0 - r);
      break;
    }
    case Weights::Family::Single:
      break;
  }
  return acc;
}

}  // namespace

double product_tail(const Weights& w, double pstar) {
  if (!(pstar > 0.0 && pstar <= 1.0))
    throw std::invalid_argument("product_tail: pstar in (0,1] required");
  require_summable(w, pstar);
  return std::exp(log_product(w, pstar));
}

double product_total(const Weights& w) {
  require_summable(w, 1.0);
  return std::exp(log_product(w, 1.0));
}

namespace {

struct DfsState {
  const Weights* w;
  double threshold;
  int boost_top;                  // largest j with gamma_j M > 1 (0 if none)
  std::vector<double> boost;      // boost[j] = prod_{i=j..boost_top} gamma_i M, j = 1..boost_top
  std::vector<ActiveSet::Entry>* out;
  std::size_t visited = 0;

  double max_future(int j) const {
    if (j > boost_top) return 1.0;
    return boost[j];
  }

  void recurse(IndexSet& u, double prod_gamma, double prod_gammaM, int next) {
    if (++visited > 10000000)
      throw std::runtime_error("build_active_set: enumeration guard exceeded (1e7 candidates)");
    for (int j = next;; ++j) {
      const double gM = w->gammaM(j);
      const double child = prod_gammaM * gM;
      // child * max_future(j+1) = prod * boost[j] is nonincreasing in j, so
      // the first branch that cannot qualify ends the scan at this level.
      if (child * max_future(j + 1) <= threshold) break;
      u.push_back(j);
      const double child_gamma = prod_gamma * w->gamma(j);
      if (child > threshold) out->push_back({u, child_gamma, child});
      recurse(u, child_gamma, child, j + 1);
      u.pop_back();
    }
  }
};

}  // namespace

ActiveSet build_active_set(const Weights& w, double epsilon, double pstar) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_active_set: epsilon > 0 required");
  ActiveSet a;
  a.epsilon = epsilon;
  a.pstar = pstar;
  a.denom_sum = product_tail(w, pstar);
  a.total_sum = product_total(w);
  a.threshold = std::pow(0.5 * epsilon / a.denom_sum, 1.0 / (1.0 - pstar));

  a.subsets.push_back({IndexSet{}, 1.0, 1.0});  // the empty set always belongs
  if (a.threshold < 1.0) {
    DfsState st;
    st.w = &w;
    st.threshold = a.threshold;
    st.boost_top = 0;
    while (w.gammaM(st.boost_top + 1) > 1.0) {
      ++st.boost_top;
      if (st.boost_top > 64) throw std::runtime_error("build_active_set: too many gamma_j M > 1");
    }
    st.boost.assign(st.boost_top + 1, 1.0);
    for (int j = st.boost_top; j >= 1; --j)
      st.boost[j] = (j < st.boost_top ? st.boost[j + 1] : 1.0) * w.gammaM(j);
    st.out = &a.subsets;
    IndexSet u;
    st.recurse(u, 1.0, 1.0, 1);
  }

  for (const auto& e : a.subsets) a.in_set_sum += e.gammaM_u;
  return a;
}

SuperpositionStats superposition_stats(const ActiveSet& a) {
  SuperpositionStats st;
  st.count = a.subsets.size();
  for (const auto& e : a.subsets)
    st.max_cardinality = std::max(st.max_cardinality, static_cast<int>(e.u.size()));
  return st;
}

double cardinality_bound(const ActiveSet& a) {
  return std::pow(2.0 / a.epsilon, a.pstar / (1.0 - a.pstar)) *
         std::pow(a.denom_sum, 1.0 / (1.0 - a.pstar));
}

std::string index_set_label(const IndexSet& u) {
  if (u.empty()) return "{}";
  std::ostringstream os;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) os << ',';
    os << u[i];
  }
  return os.str();
}

std::string active_set_csv(const ActiveSet& a) {
  std::ostringstream os;
  os.precision(17);
  os << "u;gamma_u_M_u\n";
  for (const auto& e : a.subsets) os << index_set_label(e.u) << ';' << e.gammaM_u << '\n';
  return os.str();
}

}  // namespace mdfem
