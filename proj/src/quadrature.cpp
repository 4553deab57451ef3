#include "mdfem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mdfem {

double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (n == 1) return xs[0];
  if (n == 2) return xs[0] + xs[1];
  const std::size_t half = n / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace {

// Newton iteration on the Legendre recurrence; nodes symmetric about 0.
QuadNodes make_gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
  QuadNodes out;
  out.x.resize(n);
  out.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    out.x[i] = -z;
    out.x[n - 1 - i] = z;
    out.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    out.w[n - 1 - i] = out.w[i];
  }
  return out;
}

// Physicists' Gauss-Hermite (weight exp(-t^2)) rescaled to the standard
// normal density: y = sqrt(2) t, w -> w / sqrt(pi).
QuadNodes make_gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n >= 1");
  QuadNodes out;
  out.x.resize(n);
  out.w.resize(n);
  const double pim4 = 0.7511255444649425;  // pi^(-1/4)
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      z -= 1.14 * std::pow(n, 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * out.x[n - 1] / std::sqrt(2.0);
    else if (i == 3)
      z = 1.91 * z - 0.91 * out.x[n - 2] / std::sqrt(2.0);
    else
      z = 2.0 * z - out.x[n - i + 1] / std::sqrt(2.0);
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p0 = pim4, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = z * std::sqrt(2.0 / (j + 1.0)) * p1 - std::sqrt(double(j) / (j + 1.0)) * p2;
      }
      pp = std::sqrt(2.0 * n) * p1;
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    out.x[n - 1 - i] = z * std::sqrt(2.0);
    out.x[i] = -z * std::sqrt(2.0);
    const double w = 2.0 / (pp * pp) / std::sqrt(M_PI);
    out.w[n - 1 - i] = w;
    out.w[i] = w;
  }
  if (n % 2 == 1) out.x[n / 2] = 0.0;
  return out;
}

std::map<int, QuadNodes> g_gl_cache;
std::map<int, QuadNodes> g_gh_cache;
std::mutex g_cache_mutex;

}  // namespace

const QuadNodes& gauss_legendre(int npoints) {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto it = g_gl_cache.find(npoints);
  if (it == g_gl_cache.end()) it = g_gl_cache.emplace(npoints, make_gauss_legendre(npoints)).first;
  return it->second;
}

const QuadNodes& gauss_hermite_prob(int npoints) {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto it = g_gh_cache.find(npoints);
  if (it == g_gh_cache.end()) it = g_gh_cache.emplace(npoints, make_gauss_hermite(npoints)).first;
  return it->second;
}

namespace {

double gl_panel(const std::function<double(double)>& f, double a, double b, const QuadNodes& gl) {
  const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.x.size(); ++i) acc += gl.w[i] * f(mid + hw * gl.x[i]);
  return acc * hw;
}

double integrate_rec(const std::function<double(double)>& f, double a, double b, double whole,
                     double rel_tol, double abs_floor, const QuadNodes& gl, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gl_panel(f, a, mid, gl);
  const double right = gl_panel(f, mid, b, gl);
  const double refined = left + right;
  if (depth > 40) return refined;
  if (std::abs(refined - whole) <= rel_tol * std::abs(refined) + abs_floor) return refined;
  return integrate_rec(f, a, mid, left, rel_tol, 0.5 * abs_floor, gl, depth + 1) +
         integrate_rec(f, mid, b, right, rel_tol, 0.5 * abs_floor, gl, depth + 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int gl_points) {
  if (a == b) return 0.0;
  const QuadNodes& gl = gauss_legendre(gl_points);
  const double whole = gl_panel(f, a, b, gl);
  // per-panel absolute floor keeps underflowing tails from recursing forever
  const double abs_floor = rel_tol * std::max(std::abs(whole), 1e-280);
  return integrate_rec(f, a, b, whole, rel_tol, abs_floor, gl, 0);
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: bad sizes");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace mdfem
