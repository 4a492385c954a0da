#include "sphpart/bounds.hpp"

#include "sphpart/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace sphpart {

namespace {

void require_fraction(double s, const char* who) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError(std::string(who) + ": S outside (0, 1)");
}

// Shared by delta_k (k >= 3) and large_k_bound so the two agree bit for bit.
double j0_linear_form(int k) {
  const double j0sq = kBesselJ0Zero * kBesselJ0Zero;
  return 0.25 * j0sq * k - 0.125 * j0sq - 0.25;
}

}  // namespace

double phi_infty(double s) {
  require_fraction(s, "phi_infty");
  if (s <= 0.25) return 0.5 * std::log(1.0 / (4.0 * s)) + 1.5;
  return 2.0 * (1.0 - s);
}

double phi_hat3(double s) {
  require_fraction(s, "phi_hat3");
  if (s >= 0.5) return 2.0 * (1.0 - s);
  return 0.5 * kBesselJ0Zero * std::sqrt(1.0 / s - 0.5) - 0.5;
}

double phi3(double s) { return std::max(phi_hat3(s), phi_infty(s)); }

BoundValue gamma_k(int k) {
  if (k < 2) throw DomainError("gamma_k: k must be at least 2");
  if (k <= 4) {
    // Phi_inf(1/k) = 2(k-1)/k, so gamma = 2(k-1)(3k-2)/k^2.
    long long num = 2LL * (k - 1) * (3LL * k - 2);
    long long den = 1LL * k * k;
    const long long g = std::gcd(num, den);
    const Rational r{num / g, den / g};
    return {r.value(), r};
  }
  const double phi = phi_infty(1.0 / k);
  return {phi * (1.0 + phi), std::nullopt};
}

double delta_k(int k) {
  if (k < 2) throw DomainError("delta_k: k must be at least 2");
  if (k >= 3) return j0_linear_form(k);
  const double phi = phi_hat3(1.0 / k);
  return phi * (1.0 + phi);
}

double easy_lemma_min(int k, double rho) {
  if (k < 1) throw DomainError("easy_lemma_min: k must be positive");
  if (!(rho > 0.0)) throw DomainError("easy_lemma_min: rho must be positive");
  const double a = rho / k;
  return a * (a + 1.0);
}

double large_k_bound(int k) {
  if (k < 3) throw DomainError("large_k_bound: k must be at least 3");
  return j0_linear_form(k);
}

double fermionic_bound(std::span<const double> spectrum, int k) {
  if (k < 1) throw DomainError("fermionic_bound: k must be positive");
  if (static_cast<int>(spectrum.size()) < k) throw SpectrumError("fermionic_bound: fewer than k eigenvalues");
  double sum = 0.0;
  for (int j = 0; j < k; ++j) sum += spectrum[j];
  return sum / k;
}

NodalCountBounds nodal_count_bounds(int ell) {
  if (ell < 1) throw DomainError("nodal_count_bounds: ell must be positive");
  const bool odd = ell % 2 == 1;
  return {ell * ell + 1, ell * (ell - 1) + 2, (ell - 1) * (ell - 1) + (odd ? 2 : 1),
          odd ? (ell + 1) * (ell + 1) / 2 : ell * (ell + 2) / 2};
}

BoundReport make_bound_report(int k) {
  if (k < 2) throw DomainError("make_bound_report: k must be at least 2");
  const double s = 1.0 / k;
  BoundReport r;
  r.k = k;
  r.phi_infty = phi_infty(s);
  r.phi_hat3 = phi_hat3(s);
  r.phi3 = phi3(s);
  r.gamma = gamma_k(k);
  r.delta = delta_k(k);
  if (k >= 3) r.large_k = large_k_bound(k);

  std::vector<double> sphere;
  for (int ell = 0; static_cast<int>(sphere.size()) < k; ++ell) {
    for (int j = 0; j < 2 * ell + 1; ++j) sphere.push_back(double(ell) * (ell + 1));
  }
  r.fermionic = fermionic_bound(sphere, k);

  r.formulas.phi_infty = s <= 0.25 ? "(1/2)log(1/(4S)) + 3/2" : "2(1-S)";
  r.formulas.phi_hat3 = s >= 0.5 ? "2(1-S)" : "(1/2)j0 sqrt(1/S - 1/2) - 1/2";
  r.formulas.gamma = k <= 4 ? "Phi_inf(1/k)(1+Phi_inf(1/k)), Phi_inf(1/k) = 2(k-1)/k (exact)"
                            : "Phi_inf(1/k)(1+Phi_inf(1/k)), Phi_inf(1/k) = (1/2)log(k/4) + 3/2";
  r.formulas.delta = k >= 3 ? "(1/4)j0^2 (k - 1/2) - 1/4" : "Phi_hat(1/2)(1+Phi_hat(1/2))";
  r.formulas.large_k = k >= 3 ? "(1/4)j0^2 k - (1/8)j0^2 - 1/4" : "undefined for k < 3";
  r.formulas.fermionic = "(1/k) sum_{j<=k} lambda_j(S^2)";
  return r;
}

}  // namespace sphpart
