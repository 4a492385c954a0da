#pragma once

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace sphpart {

/// First positive zero of the Bessel function J0, to 16 significant digits.
inline constexpr double kBesselJ0Zero = 2.404825557695773;

/// Degree/order pair (ell, m) with ell in N/2, ell - m integral, |m| <= ell.
/// Stored doubled so half-integers are exact.
class HarmonicIndex {
 public:
  HarmonicIndex(int twice_ell, int twice_m);
  static HarmonicIndex from_half_units(int twice_ell, int twice_m) { return {twice_ell, twice_m}; }

  double ell() const noexcept { return 0.5 * twice_ell_; }
  double m() const noexcept { return 0.5 * twice_m_; }
  int twice_ell() const noexcept { return twice_ell_; }
  int twice_m() const noexcept { return twice_m_; }
  bool half_integer() const noexcept { return twice_ell_ % 2 != 0; }
  double eigenvalue() const noexcept { return ell() * (ell() + 1.0); }

 private:
  int twice_ell_;
  int twice_m_;
};

enum class SymmetryClass { Symmetric, Antisymmetric };
enum class Parity { Cos, Sin };

struct SpectralLevel {
  double eigenvalue;
  int multiplicity;
};

struct CoveringLevel {
  double eigenvalue;
  int multiplicity;
  SymmetryClass symmetry;
  double ell;
};

/// First `count` distinct eigenvalues ell(ell+1) of the sphere, multiplicity 2ell+1.
std::vector<SpectralLevel> sphere_spectrum(int count);

/// First `count` distinct eigenvalues of the double covering, ell in N/2.
/// Half-integer ell gives the antisymmetric class.
std::vector<CoveringLevel> covering_spectrum(int count);

/// The n-th eigenvalue (1-based, counted with multiplicity) of a level list.
double nth_eigenvalue(const std::vector<CoveringLevel>& levels, int n);
/// The n-th antisymmetric eigenvalue with multiplicity (n >= 1).
double nth_antisymmetric_eigenvalue(int n);
/// 1-based index, with multiplicity, of the first occurrence of `eigenvalue`;
/// returns 0 when it does not occur in the list.
int first_index_with_multiplicity(const std::vector<CoveringLevel>& levels, double eigenvalue,
                                  double tol = 1e-12);

/// Real spherical harmonic of integer or half-integer degree,
///   c * (sin th)^|m| q(cos th) * {cos, sin}(|m| phi),
/// unit L2 norm over the sphere (integer ell) or the double covering
/// phi in (-2pi, 2pi] (half-integer ell), positive just north of the equator
/// at phi = 0+. Returns 0 at the poles when m != 0.
double eval_real_harmonic(const HarmonicIndex& idx, Parity parity, double theta, double phi);

/// The same function with its profile and normalization computed once.
class RealHarmonic {
 public:
  RealHarmonic(const HarmonicIndex& idx, Parity parity);
  double operator()(double theta, double phi) const;

 private:
  std::vector<double> q_;  // coefficients of q in t = cos(theta)
  double abs_m_;
  double scale_;
  Parity parity_;
};

/// Samples at the rows of a (n x 3) point matrix, e.g. mesh vertices.
template <typename Derived>
Eigen::VectorXd eval_real_harmonic_at(const HarmonicIndex& idx, Parity parity,
                                      const Eigen::MatrixBase<Derived>& pts);

struct LuneGroundState {
  double eigenvalue;
  double exponent;
};

/// Dirichlet ground state of the lune {0 < phi < beta}: nu = pi/beta,
/// eigenfunction sin(nu phi) (sin th)^nu, eigenvalue nu(nu+1).
LuneGroundState lune_ground_state(double beta);

/// Legendre function of the first kind P_nu(x), regular at x = 1, via
/// 2F1(-nu, nu+1; 1; (1-x)/2). Throws DomainError for x <= -1 or nu < 0.
double legendre_P(double nu, double x);

/// Characteristic constant of the spherical cap with area fraction S on S^2:
/// the smallest alpha >= 0 with P_alpha(1 - 2S) = 0.
double cap_alpha(double area_fraction);

/// lambda = alpha (alpha + m - 2).
constexpr double alpha_to_lambda(double alpha, int m = 3) { return alpha * (alpha + m - 2); }

/// J0 by its power series.
double bessel_j0(double x);
/// Newton iteration for the first zero of J0 on the series; used to check
/// kBesselJ0Zero.
double bessel_j0_first_zero_newton();

/// Gauss-Legendre nodes and weights on [a, b].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int n, double a = -1.0, double b = 1.0);

// ---------------------------------------------------------------------------

template <typename Derived>
Eigen::VectorXd eval_real_harmonic_at(const HarmonicIndex& idx, Parity parity,
                                      const Eigen::MatrixBase<Derived>& pts) {
  const RealHarmonic h(idx, parity);
  Eigen::VectorXd out(pts.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const double theta = std::atan2(std::hypot(pts(i, 0), pts(i, 1)), pts(i, 2));
    const double phi = std::atan2(pts(i, 1), pts(i, 0));
    out(i) = h(theta, phi);
  }
  return out;
}

}  // namespace sphpart
