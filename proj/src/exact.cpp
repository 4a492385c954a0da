#include "sphpart/exact.hpp"

#include "sphpart/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sphpart {

namespace {

constexpr double kPi = std::numbers::pi;

// Polynomial in t = cos(theta), coefficients in increasing degree.
using Poly = std::vector<double>;

double horner(const Poly& p, double t) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * t + *it;
  return acc;
}

// d/dt [(1-t^2)^a p] = (1-t^2)^(a-1) [ -2a t p + (1-t^2) p' ].
Poly differentiate_weighted(const Poly& p, double a) {
  Poly out(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i + 1] += -2.0 * a * p[i];
    if (i >= 1) {
      out[i - 1] += static_cast<double>(i) * p[i];
      out[i + 1] -= static_cast<double>(i) * p[i];
    }
  }
  while (out.size() > 1 && out.back() == 0.0) out.pop_back();
  return out;
}

}  // namespace

HarmonicIndex::HarmonicIndex(int twice_ell, int twice_m) : twice_ell_(twice_ell), twice_m_(twice_m) {
  if (twice_ell < 0) throw DomainError("HarmonicIndex: ell must be non-negative");
  if (std::abs(twice_m) > twice_ell) throw DomainError("HarmonicIndex: |m| > ell");
  if ((twice_ell - twice_m) % 2 != 0) throw DomainError("HarmonicIndex: ell - m must be an integer");
}

std::vector<SpectralLevel> sphere_spectrum(int count) {
  if (count < 1) throw DomainError("sphere_spectrum: count must be positive");
  std::vector<SpectralLevel> out;
  for (int ell = 0; ell < count; ++ell) out.push_back({double(ell) * (ell + 1), 2 * ell + 1});
  return out;
}

std::vector<CoveringLevel> covering_spectrum(int count) {
  if (count < 1) throw DomainError("covering_spectrum: count must be positive");
  std::vector<CoveringLevel> out;
  for (int twice_ell = 0; twice_ell < count; ++twice_ell) {
    const double ell = 0.5 * twice_ell;
    out.push_back({ell * (ell + 1.0), twice_ell + 1,
                   twice_ell % 2 ? SymmetryClass::Antisymmetric : SymmetryClass::Symmetric, ell});
  }
  return out;
}

double nth_eigenvalue(const std::vector<CoveringLevel>& levels, int n) {
  if (n < 1) throw DomainError("nth_eigenvalue: n must be positive");
  int seen = 0;
  for (const auto& l : levels) {
    seen += l.multiplicity;
    if (seen >= n) return l.eigenvalue;
  }
  throw SpectrumError("nth_eigenvalue: level list too short");
}

double nth_antisymmetric_eigenvalue(int n) {
  if (n < 1) throw DomainError("nth_antisymmetric_eigenvalue: n must be positive");
  int seen = 0;
  for (int twice_ell = 1;; twice_ell += 2) {
    seen += twice_ell + 1;
    if (seen >= n) {
      const double ell = 0.5 * twice_ell;
      return ell * (ell + 1.0);
    }
  }
}

int first_index_with_multiplicity(const std::vector<CoveringLevel>& levels, double eigenvalue,
                                  double tol) {
  int index = 1;
  for (const auto& l : levels) {
    if (std::abs(l.eigenvalue - eigenvalue) <= tol) return index;
    index += l.multiplicity;
  }
  return 0;
}

// ---------------------------------------------------------------------------

namespace {

struct HarmonicProfile {
  Poly q;          // theta profile is (1-t^2)^(|m|/2) q(t)
  double abs_m;
  double scale;    // normalization constant with sign
};

HarmonicProfile make_profile(const HarmonicIndex& idx, Parity parity) {
  const double abs_m = std::abs(idx.m());
  if (idx.twice_m() == 0 && parity == Parity::Sin) {
    throw DomainError("eval_real_harmonic: sin parity is identically zero for m = 0");
  }
  // q = (1-t^2)^(-|m|) (d/dt)^(ell-|m|) (1-t^2)^ell
  const int steps = (idx.twice_ell() - std::abs(idx.twice_m())) / 2;
  Poly q{1.0};
  double a = idx.ell();
  for (int s = 0; s < steps; ++s) {
    q = differentiate_weighted(q, a);
    a -= 1.0;
  }
  // theta-integral of profile^2 sin(theta); the integrand is a trigonometric
  // polynomial, so a 64-point rule is exact to rounding.
  const Quadrature rule = gauss_legendre(64, 0.0, kPi);
  double theta_integral = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double th = rule.nodes[i];
    const double v = std::pow(std::sin(th), abs_m) * horner(q, std::cos(th));
    theta_integral += rule.weights[i] * v * v * std::sin(th);
  }
  const double period = idx.half_integer() ? 4.0 * kPi : 2.0 * kPi;
  const double phi_integral = idx.twice_m() == 0 ? period : 0.5 * period;
  double norm = 1.0 / std::sqrt(theta_integral * phi_integral);

  double max_coef = 0.0;
  for (double c : q) max_coef = std::max(max_coef, std::abs(c));
  const double at_equator = q[0];
  const double slope = q.size() > 1 ? q[1] : 0.0;
  const double sign = std::abs(at_equator) > 1e-12 * max_coef ? (at_equator > 0 ? 1.0 : -1.0)
                                                               : (slope > 0 ? 1.0 : -1.0);
  return {std::move(q), abs_m, sign * norm};
}

}  // namespace

RealHarmonic::RealHarmonic(const HarmonicIndex& idx, Parity parity) : parity_(parity) {
  HarmonicProfile prof = make_profile(idx, parity);
  q_ = std::move(prof.q);
  abs_m_ = prof.abs_m;
  scale_ = prof.scale;
}

double RealHarmonic::operator()(double theta, double phi) const {
  const double s = std::sin(theta);
  if (abs_m_ > 0.0 && std::abs(s) < 1e-300) return 0.0;
  const double radial = std::pow(std::abs(s), abs_m_) * horner(q_, std::cos(theta));
  const double angular = parity_ == Parity::Cos ? std::cos(abs_m_ * phi) : std::sin(abs_m_ * phi);
  return scale_ * radial * angular;
}

double eval_real_harmonic(const HarmonicIndex& idx, Parity parity, double theta, double phi) {
  return RealHarmonic(idx, parity)(theta, phi);
}

LuneGroundState lune_ground_state(double beta) {
  if (!(beta > 0.0 && beta <= 2.0 * kPi)) throw DomainError("lune_ground_state: beta outside (0, 2pi]");
  const double nu = kPi / beta;
  return {nu * (nu + 1.0), nu};
}

double legendre_P(double nu, double x) {
  if (!(x > -1.0 && x <= 1.0)) throw DomainError("legendre_P: x outside (-1, 1]");
  if (nu < 0.0) throw DomainError("legendre_P: negative degree");
  const double z = 0.5 * (1.0 - x);
  double term = 1.0;
  double sum = 1.0;
  double scale = 1.0;
  constexpr int kMaxTerms = 5'000'000;
  for (int k = 0; k < kMaxTerms; ++k) {
    term *= (k - nu) * (k + nu + 1.0) / ((k + 1.0) * (k + 1.0)) * z;
    sum += term;
    if (term == 0.0) return sum;
    scale = std::max({scale, std::abs(sum), std::abs(term)});
    // Past k > nu the terms keep one sign and shrink geometrically (ratio -> z),
    // so the remaining tail is bounded by |term| z / (1 - z).
    if (k + 1 > nu && std::abs(term) * z / (1.0 - z) < 1e-15 * scale) return sum;
  }
  throw ConvergenceError("legendre_P: hypergeometric series did not converge", std::abs(term));
}

double cap_alpha(double area_fraction) {
  const double S = area_fraction;
  if (!(S > 0.0 && S < 1.0)) throw DomainError("cap_alpha: S outside (0, 1)");
  const double x = 1.0 - 2.0 * S;
  const double theta0 = std::acos(x);
  const double upper = std::max(2.0 * kBesselJ0Zero / theta0, 2.0);
  constexpr double kStep = 0.25;
  double lo = 0.0;
  double f_lo = legendre_P(lo, x);
  for (double hi = kStep; hi <= 2.0 * upper; hi += kStep) {
    const double f_hi = legendre_P(hi, x);
    if ((f_lo > 0.0) != (f_hi > 0.0) || f_hi == 0.0) {
      double a = lo, b = hi, fa = f_lo;
      while (b - a > 1e-13) {
        const double mid = 0.5 * (a + b);
        const double fm = legendre_P(mid, x);
        if ((fm > 0.0) == (fa > 0.0) && fm != 0.0) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    f_lo = f_hi;
  }
  throw ConvergenceError("cap_alpha: no root bracketed", std::abs(f_lo));
}

double bessel_j0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (double(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

namespace {
double bessel_j1(double x) {
  const double q = 0.25 * x * x;
  double term = 0.5 * x;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (double(k) * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}
}  // namespace

double bessel_j0_first_zero_newton() {
  double x = 2.4;
  for (int i = 0; i < 50; ++i) {
    const double dx = bessel_j0(x) / (-bessel_j1(x));
    x -= dx;
    if (std::abs(dx) < 1e-16) break;
  }
  return x;
}

Quadrature gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = n == 1 ? t : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (t * pn - pn1) / (t * t - 1.0);
      const double dt = pn / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    q.nodes[i] = 0.5 * (b - a) * t + 0.5 * (a + b);
    q.weights[i] = (b - a) / ((1.0 - t * t) * dp * dp);
  }
  return q;
}

}  // namespace sphpart
