#include "mdfem/gausscube.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "mdfem/quadrature.hpp"

namespace mdfem {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kTailCutoff = 40.0;  // Gaussian mass beyond is < 1e-300

double factorial(int k) { return std::tgamma(double(k) + 1.0); }
}  // namespace

double gauss_density(double y) { return std::exp(-0.5 * y * y) / kSqrt2Pi; }

double kernel_eval(KernelParams p, double x, double y) {
  if (p.alpha < 1) throw std::invalid_argument("kernel_eval: alpha >= 1 required");
  if (!std::isfinite(x) || !std::isfinite(y))
    throw std::invalid_argument("kernel_eval: non-finite argument");
  const int a = p.alpha;
  double poly = 0.0;
  double xt = 1.0, yt = 1.0;
  for (int tau = 1; tau <= a - 1; ++tau) {
    xt *= x;
    yt *= y;
    const double f = factorial(tau);
    poly += (xt / f) * (yt / f);
  }
  if (!(x * y > 0.0)) return poly;
  const double ax = std::abs(x), ay = std::abs(y);
  const double lo = std::min(ax, ay);
  const double fa = factorial(a - 1);
  const auto integrand = [&](double t) {
    return std::pow(ax - t, a - 1) * std::pow(ay - t, a - 1) / (fa * fa) / gauss_density(t);
  };
  return poly + integrate_adaptive(integrand, 0.0, lo, 1e-11, 2 * a + 8);
}

namespace {

// K(y,y) rho(y)^2, evaluated without forming exp(t^2/2) alone so the result
// stays finite out to the tail cutoff.
double kernel_diag_scaled(int a, double y) {
  y = std::abs(y);
  double poly = 0.0;
  double y2t = 1.0;
  const double r2 = std::exp(-y * y) / (2.0 * M_PI);
  for (int tau = 1; tau <= a - 1; ++tau) {
    y2t *= y * y;
    const double f = factorial(tau);
    poly += y2t / (f * f) * r2;
  }
  if (y == 0.0) return poly;
  const double fa = factorial(a - 1);
  const auto integrand = [&](double t) {
    const double e = 0.5 * t * t - y * y;  // <= -y^2/2 on [0,y]
    return std::pow(y - t, 2 * (a - 1)) / (fa * fa) * std::exp(e);
  };
  return poly + kSqrt2Pi / (2.0 * M_PI) * integrate_adaptive(integrand, 0.0, y, 1e-12, 16);
}

std::map<int, double> g_M_cache;
std::mutex g_M_mutex;

}  // namespace

double kernel_constant_M(int alpha) {
  if (alpha < 1) throw std::invalid_argument("kernel_constant_M: alpha >= 1 required");
  std::lock_guard<std::mutex> lock(g_M_mutex);
  auto it = g_M_cache.find(alpha);
  if (it != g_M_cache.end()) return it->second;
  const auto g = [alpha](double y) { return std::sqrt(std::max(kernel_diag_scaled(alpha, y), 0.0)); };
  const double M = 2.0 * integrate_adaptive(g, 0.0, kTailCutoff, 1e-10, 16);
  g_M_cache.emplace(alpha, M);
  return M;
}

double kernel_constant_M_estimate(int alpha) {
  if (alpha < 1) throw std::invalid_argument("kernel_constant_M_estimate: alpha >= 1 required");
  double sum = 0.0;
  for (int r = 1; r <= alpha - 1; ++r) sum += 1.0 / (std::pow(2.0, 0.5 * r) * std::tgamma(1.0 + 0.5 * r));
  sum += std::pow(2.0, alpha + 0.25) * std::tgamma(0.5 * alpha + 0.25) /
         (factorial(alpha - 1) * std::sqrt(2.0 * alpha - 1.0) * std::pow(M_PI, 0.25));
  return sum;
}

BoundConstants bound_constants(int alpha, double lambda, int s) {
  if (alpha < 1 || s < 1) throw std::invalid_argument("bound_constants: bad alpha/s");
  if (!(lambda >= 1.0 && lambda < alpha))
    throw std::invalid_argument("bound_constants: lambda in [1,alpha) required");
  BoundConstants out;
  const double a = alpha;
  const double cd_core = factorial(alpha) * (1.0 + 0.5 * a) * std::pow(2.0, 2.0 * a) / kSqrt2Pi *
                         std::tgamma(2.0 * a);
  out.C_diamond = cd_core * std::cyl_bessel_i(0.0, 0.5);
  const double c1_core = factorial(alpha) * std::pow(2.0, 3.0 * a);
  const double inner = a * (1.0 + 0.5 * a) / kSqrt2Pi * std::tgamma(2.0 * a);
  out.C1 = c1_core * std::sqrt(inner * std::cyl_bessel_i(0.0, 0.5));
  out.C1_alt = c1_core * std::sqrt(inner * std::cyl_bessel_i(0.0, 0.25));
  out.M = kernel_constant_M(alpha);
  out.C3 = 2.0 * s * std::pow(out.M, s - 1) * std::sqrt(0.5 * a) * 2.0 * M_E / std::pow(2.0 * M_PI, 0.25);
  out.Ctilde = ctilde_constant(alpha, lambda, s);
  out.C4 = std::pow(2.0, s) * out.Ctilde * std::pow(out.C1, s);
  const double ln2 = std::log(2.0);
  out.C_full = std::max(out.C3 / (2.0 * std::sqrt(lambda * ln2)),
                        out.C4 * std::pow(2.0 / std::sqrt(ln2) + 2.0 * std::sqrt(lambda),
                                          (a + 0.5) * s));
  return out;
}

double truncation_T(double n, double lambda) {
  if (!(n >= 2.0)) throw std::invalid_argument("truncation_T: n >= 2 required");
  if (!(lambda >= 0.5)) throw std::invalid_argument("truncation_T: lambda >= 1/2 required");
  return 2.0 + 2.0 * std::sqrt(lambda * std::log(n));
}

double norm_bound_Ckappa(double kappa, int alpha, double* delta_out) {
  const double delta = std::min(1.0 - 1e-6, 1.01 * kappa * alpha / std::log(2.0));
  if (delta_out) *delta_out = delta;
  return 1.0 / (1.0 - delta);
}

double norm_bound_CkappaPrime(double kappa, int alpha, double sum_b, double sum_b2) {
  const double C = norm_bound_Ckappa(kappa, alpha);
  return std::sqrt(C) * std::exp(kappa * kappa * sum_b2 + 2.0 * kappa * sum_b / kSqrt2Pi);
}

GaussCubature::GaussCubature(InterlacedRule rule, double lambda)
    : rule_(std::move(rule)), lambda_(lambda) {
  rule_.validate();
  if (!(lambda_ >= 1.0 && lambda_ < rule_.alpha))
    throw std::invalid_argument("GaussCubature: lambda in [1,alpha) required");
  const double n = static_cast<double>(rule_.n());
  T_ = truncation_T(n, lambda_);
  const auto pts = interlace_points(rule_);
  const int s = rule_.s;
  nodes_.resize(pts.size() * s);
  weights_.resize(pts.size());
  const double wscale = std::pow(2.0 * T_, s) / n;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double dens = 1.0;
    for (int j = 0; j < s; ++j) {
      const double t = 2.0 * T_ * pts[i][j].value() - T_;
      nodes_[i * s + j] = t;
      dens *= gauss_density(t);
    }
    weights_[i] = wscale * dens;
  }
}

double GaussCubature::integrate(const std::function<double(std::span<const double>)>& F) const {
  const std::size_t n = weights_.size();
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = F(node(i));
    if (!std::isfinite(v)) throw std::runtime_error("GaussCubature::integrate: non-finite integrand value");
    terms[i] = weights_[i] * v;
  }
  return pairwise_sum(terms);
}

double GaussCubature::error_bound(double norm) const {
  const auto c = bound_constants(rule_.alpha, lambda_, rule_.s);
  const double n = static_cast<double>(rule_.n());
  const double a1 = 0.5 * rule_.alpha + 0.25;
  return c.C_full * std::pow(std::log(n), a1 * rule_.s) * std::pow(n, -lambda_) * norm;
}

}  // namespace mdfem
