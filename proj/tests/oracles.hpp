#pragma once

// Independent reference values. None of these call into the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace oracle {

// Monod(mu_max, ks): s-hat solves s^2 + 2 ks s - ks sigma = 0.
inline double monod_shat(double ks, double sigma) { return -ks + std::sqrt(ks * ks + ks * sigma); }

inline double monod_mu(double mu_max, double ks, double s) { return mu_max * s / (ks + s); }

// Monod(1, 1): gamma(sigma) = (sqrt(1 + sigma) - 1)^2.
inline double gamma11(double sigma) {
  const double u = std::sqrt(1.0 + sigma) - 1.0;
  return u * u;
}

// Antiderivative of 1/gamma for Monod(1, 1): 2 (ln(u - 1) - 1/(u - 1)), u = sqrt(1 + sigma).
inline double inv_gamma11_primitive(double sigma) {
  const double w = std::sqrt(1.0 + sigma) - 1.0;
  return 2.0 * (std::log(w) - 1.0 / w);
}

inline double time11(double sigma, double s_bar) {
  if (sigma <= s_bar) return 0.0;
  return inv_gamma11_primitive(sigma) - inv_gamma11_primitive(s_bar);
}

// max over a dense grid of sr in [0, sigma] of mu(sr) (sigma - sr).
template <class Mu>
double brute_force_gamma(Mu mu, double sigma, int n = 200001) {
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double sr = sigma * i / (n - 1);
    best = std::max(best, mu(sr) * (sigma - sr));
  }
  return best;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace oracle
