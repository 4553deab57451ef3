#include "mdfem/randomfield.hpp"

#include <cmath>
#include <stdexcept>

namespace mdfem {

void validate_index_set(const IndexSet& u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < 1) throw std::invalid_argument("IndexSet: indices are positive");
    if (i > 0 && u[i] <= u[i - 1]) throw std::invalid_argument("IndexSet: strictly increasing required");
  }
}

void FieldSpec::validate() const {
  if (c < 0.0) throw std::invalid_argument("FieldSpec: c >= 0 required");
  if (jmax < 1) throw std::invalid_argument("FieldSpec: jmax >= 1 required");
  if (b_family == BFamily::PowerLaw && b_exponent < 0.0)
    throw std::invalid_argument("FieldSpec: b_exponent >= 0 required");
  if (family == PhiFamily::Sine && sigma <= 1.0)
    throw std::invalid_argument("FieldSpec: sine family needs sigma > 1 for a finite tail bound");
}

namespace {

// Breadth-first Haar index: j = 2^l + i with i in [0, 2^l); h_j is +1 on the
// left half of [i 2^-l, (i+1) 2^-l) and -1 on the right half.
double haar(int j, double x) {
  int level = 0;
  while ((2 << level) <= j) ++level;
  const int i = j - (1 << level);
  const double width = std::ldexp(1.0, -level);
  const double lo = i * width;
  if (x < lo || x >= lo + width) return 0.0;
  return (x < lo + 0.5 * width) ? 1.0 : -1.0;
}

}  // namespace

double FieldSpec::phi(int j, double x) const {
  const double envelope = c * std::pow(double(j), -sigma);
  switch (family) {
    case PhiFamily::Sine:
      return envelope * std::sin(j * M_PI * x);
    case PhiFamily::HaarLike:
      return envelope * haar(j, x);
  }
  return 0.0;
}

double FieldSpec::phi_sup(int j) const { return c * std::pow(double(j), -sigma); }

double FieldSpec::phi_tail_bound(int jhead) const {
  // sine: sum_{j>J} c j^-sigma <= c J^(1-sigma)/(sigma-1).
  // haar-like: at any x one index per level contributes; level l >= log2(J+1)
  // contributes at most c 2^(-l sigma), geometric in l.
  if (c == 0.0) return 0.0;
  switch (family) {
    case PhiFamily::Sine: {
      if (sigma <= 1.0) throw std::runtime_error("phi_tail_bound: unavailable for sigma <= 1");
      return c * std::pow(double(jhead), 1.0 - sigma) / (sigma - 1.0);
    }
    case PhiFamily::HaarLike: {
      if (sigma <= 0.0) throw std::runtime_error("phi_tail_bound: unavailable for sigma <= 0");
      const int level = static_cast<int>(std::floor(std::log2(double(jhead) + 1.0)));
      const double r = std::pow(2.0, -sigma);
      return c * std::pow(r, level) / (1.0 - r);
    }
  }
  return 0.0;
}

double FieldSpec::b(int j) const {
  switch (b_family) {
    case BFamily::PowerLaw:
      return std::pow(double(j), -b_exponent);
    case BFamily::Geometric:
      return std::ldexp(1.0, -j);
  }
  return 0.0;
}

double eval_a(const FieldSpec& spec, double x, const IndexSet& v, std::span<const double> y) {
  if (v.size() != y.size()) throw std::invalid_argument("eval_a: v and y size mismatch");
  double z = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) z += y[i] * spec.phi(v[i], x);
  if (std::abs(z) > 700.0) throw std::overflow_error("eval_a: exponent magnitude exceeds 700");
  return std::exp(z);
}

double kappa(const FieldSpec& spec) {
  spec.validate();
  const int grid = 4096;
  double sup = 0.0;
  for (int g = 0; g <= grid; ++g) {
    const double x = double(g) / grid;
    double acc = 0.0;
    for (int j = 1; j <= spec.jmax; ++j) acc += std::abs(spec.phi(j, x));
    sup = std::max(sup, acc);
  }
  return sup + spec.phi_tail_bound(spec.jmax);
}

SummabilityReport check_summability(const FieldSpec& spec, double pstar) {
  if (!(pstar > 0.0 && pstar < 1.0))
    throw std::invalid_argument("check_summability: pstar in (0,1) required");
  SummabilityReport rep;
  for (int j = 1; j <= spec.jmax; ++j) rep.partial_sum += std::pow(spec.b(j), pstar);
  switch (spec.b_family) {
    case BFamily::PowerLaw:
      rep.summable = spec.b_exponent * pstar > 1.0;
      break;
    case BFamily::Geometric:
      rep.summable = true;
      break;
  }
  return rep;
}

namespace {

double power_law_sum(double expo, int jmax) {
  // sum_{j>=1} j^-expo: head plus integral tail bound; expo > 1 required.
  if (expo <= 1.0) throw std::runtime_error("power_law_sum: divergent");
  double head = 0.0;
  for (int j = 1; j <= jmax; ++j) head += std::pow(double(j), -expo);
  return head + std::pow(double(jmax), 1.0 - expo) / (expo - 1.0);
}

}  // namespace

double b_sum(const FieldSpec& spec) {
  switch (spec.b_family) {
    case BFamily::PowerLaw:
      return power_law_sum(spec.b_exponent, std::max(spec.jmax, 4096));
    case BFamily::Geometric:
      return 1.0;
  }
  return 0.0;
}

double b_sum_squares(const FieldSpec& spec) {
  switch (spec.b_family) {
    case BFamily::PowerLaw:
      return power_law_sum(2.0 * spec.b_exponent, std::max(spec.jmax, 4096));
    case BFamily::Geometric:
      return 1.0 / 3.0;
  }
  return 0.0;
}

}  // namespace mdfem
