#ifndef MDFEM_MDM_HPP
#define MDFEM_MDM_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mdfem/randomfield.hpp"

namespace mdfem {

// Product decomposition weights gamma_u = prod_{j in u} gamma_j together with
// the kernel constant M.  gamma_j comes from a closed-form monotone family so
// tails of the infinite products are certifiable.
struct Weights {
  enum class Family { PowerLaw, Geometric, Single };
  Family family = Family::PowerLaw;
  double scale = 1.0;   // PowerLaw: scale * j^-param ; Geometric: scale * param^j ;
                        // Single: scale for j = 1, zero beyond
  double param = 3.0;
  double M = 1.0;

  double gamma(int j) const;
  double gammaM(int j) const { return gamma(j) * M; }
  double gamma_set(const IndexSet& u) const;
  double gammaM_set(const IndexSet& u) const;

  // gamma_j = sqrt(2) b_j with the field's b-family.
  static Weights from_field(const FieldSpec& spec, double M);
};

// Alternating sum over all subsets v of u of F evaluated at y zero-padded
// outside v, enumerated in Gray-code order.  F receives a vector aligned
// with u (inactive coordinates set to zero).
double anchored_terms(const std::function<double(std::span<const double>)>& F, const IndexSet& u,
                      std::span<const double> y);

// sum over all finite v of (gamma_v M_v)^pstar as the infinite product
// prod_j (1 + (gamma_j M)^pstar), truncated when the log increment drops
// below 1e-16.  Throws on divergent families.
double product_tail(const Weights& w, double pstar);

// prod_j (1 + gamma_j M): total mass sum_u gamma_u M_u.
double product_total(const Weights& w);

struct ActiveSet {
  struct Entry {
    IndexSet u;
    double gamma_u = 1.0;
    double gammaM_u = 1.0;
  };
  std::vector<Entry> subsets;  // DFS (lexicographic) order; the empty set first
  double epsilon = 0.0;
  double pstar = 0.0;
  double threshold = 0.0;   // (eps/2 / denom_sum)^(1/(1-pstar))
  double denom_sum = 0.0;   // sum (gamma_v M_v)^pstar
  double total_sum = 0.0;   // sum over all u of gamma_u M_u
  double in_set_sum = 0.0;

  // Upper bound on sum_{u not in set} gamma_u M_u.
  double truncation_certificate() const { return total_sum - in_set_sum; }
};

// All u with gamma_u M_u > threshold, plus the empty set.  DFS with pruning;
// dimensions with gamma_j M > 1 are handled by a suffix-product boost bound.
ActiveSet build_active_set(const Weights& w, double epsilon, double pstar);

struct SuperpositionStats {
  std::size_t count = 0;
  int max_cardinality = 0;
};
SuperpositionStats superposition_stats(const ActiveSet& a);

// Prop-style cardinality bound (2/eps)^(p/(1-p)) (sum (gamma M)^p)^(1/(1-p)).
double cardinality_bound(const ActiveSet& a);

// CSV rows "u;gamma_u_M_u" with u as comma-joined indices.
std::string active_set_csv(const ActiveSet& a);

std::string index_set_label(const IndexSet& u);  // "{}" or "1,3,7"

}  // namespace mdfem

#endif
