#pragma once

#include "sphpart/exact.hpp"

#include <numbers>
#include <optional>
#include <span>
#include <string>

namespace sphpart {

// Lower-bound apparatus for the characteristic constant of spherical domains
// on S^2 (m = 3) and the resulting bounds on k-partition energies.

/// Phi_inf(S) = (1/2) log(1/(4S)) + 3/2 on (0, 1/4], 2(1 - S) on [1/4, 1).
double phi_infty(double area_fraction);

/// Phi_hat(S) = (1/2) j0 (1/S - 1/2)^(1/2) - 1/2 for S < 1/2, 2(1 - S) on [1/2, 1).
double phi_hat3(double area_fraction);

/// Phi_3 = max(Phi_hat, Phi_inf), convex and decreasing.
double phi3(double area_fraction);

struct Rational {
  long long num;
  long long den;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// A bound that is an exact fraction where one exists.
struct BoundValue {
  double value;
  std::optional<Rational> exact;
};

/// gamma_k = Phi_inf(1/k) (1 + Phi_inf(1/k)); exact fraction for k <= 4.
BoundValue gamma_k(int k);

/// delta_k = Phi_hat(1/k) (1 + Phi_hat(1/k)). For k >= 3 this is evaluated in
/// the closed form (j0^2/4)(k - 1/2) - 1/4.
double delta_k(int k);

/// (rho/k)(rho/k + 1): the infimum of (1/k) sum a_j(a_j + 1) over a_j >= 0
/// with sum a_j >= rho.
double easy_lemma_min(int k, double rho);

/// (1/4) j0^2 k - (1/8) j0^2 - 1/4, for k >= 3.
double large_k_bound(int k);

/// Groundstate energy of the planar disk of unit area, pi j0^2.
inline double faber_krahn_constant() { return std::numbers::pi * kBesselJ0Zero * kBesselJ0Zero; }

/// Mean of the k lowest eigenvalues of the domain (ascending input).
/// Throws SpectrumError when fewer than k values are supplied.
double fermionic_bound(std::span<const double> ascending_spectrum, int k);

/// Literature value of Wendel's bound function at S = 1/3 (table not reproduced).
inline constexpr double kWendelPhiTildeOneThird = 1.41167;

struct NodalCountBounds {
  int courant;     // ell^2 + 1
  int improved;    // ell(ell - 1) + 2
  int karpushkin;  // (ell-1)^2 + 2 (odd) / + 1 (even)
  int leydold;     // (ell+1)^2 / 2 (odd) / ell(ell+2) / 2 (even), conjectural
};

NodalCountBounds nodal_count_bounds(int ell);

/// Every bound constant for a given k, each tagged with the formula used.
struct BoundReport {
  int k;
  double phi_infty;
  double phi_hat3;
  double phi3;
  BoundValue gamma;
  double delta;
  std::optional<double> large_k;  // only for k >= 3
  double fermionic;               // against the exact sphere spectrum
  struct Formulas {
    std::string phi_infty;
    std::string phi_hat3;
    std::string gamma;
    std::string delta;
    std::string large_k;
    std::string fermionic;
  } formulas;
};

BoundReport make_bound_report(int k);

}  // namespace sphpart
