#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "szegolab/errors.hpp"

namespace szegolab {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Two-sided Fourier/Laurent polynomial h(z) = sum_{|k|<=K} h_k z^k on |z|=1.
/// Coefficients are stored densely for k in [-K, K]; indices outside the
/// range are exactly zero.
class TrigPoly {
 public:
  TrigPoly() : coeffs_(1) {}

  explicit TrigPoly(int degree) : coeffs_(2 * static_cast<size_t>(degree) + 1) {
    if (degree < 0) throw std::invalid_argument("TrigPoly: negative degree");
  }

  static TrigPoly constant(Complex c) {
    TrigPoly p(0);
    p.coeffs_[0] = c;
    return p;
  }

  /// Builds from pairs (k, h_k).
  static TrigPoly from_terms(std::initializer_list<std::pair<int, Complex>> terms) {
    int deg = 0;
    for (const auto& [k, v] : terms) deg = std::max(deg, std::abs(k));
    TrigPoly p(deg);
    for (const auto& [k, v] : terms) p.set_coeff(k, p.coeff(k) + v);
    return p;
  }

  int degree() const { return static_cast<int>(coeffs_.size() / 2); }

  Complex coeff(int k) const {
    int K = degree();
    if (k < -K || k > K) return Complex{};
    return coeffs_[static_cast<size_t>(k + K)];
  }

  void set_coeff(int k, Complex v) {
    int K = degree();
    if (k < -K || k > K) throw std::out_of_range("TrigPoly::set_coeff: index beyond degree");
    coeffs_[static_cast<size_t>(k + K)] = v;
  }

  /// Horner evaluation, split into non-negative powers of z and powers of 1/z.
  Complex eval(Complex z) const {
    int K = degree();
    Complex up{};
    for (int k = K; k >= 1; --k) up = (up + coeff(k)) * z;
    Complex zinv = 1.0 / z;
    Complex down{};
    for (int k = -K; k <= -1; ++k) down = (down + coeff(k)) * zinv;
    return up + down + coeff(0);
  }

  Complex eval_angle(double theta) const { return eval(std::polar(1.0, theta)); }

  /// Largest |k| carrying a coefficient above `tol` in modulus (0 for the
  /// zero symbol).
  int effective_degree(double tol = 0.0) const {
    for (int k = degree(); k >= 1; --k)
      if (std::abs(coeff(k)) > tol || std::abs(coeff(-k)) > tol) return k;
    return 0;
  }

  TrigPoly truncated(int K) const {
    TrigPoly out(K);
    for (int k = -K; k <= K; ++k) out.set_coeff(k, coeff(k));
    return out;
  }

  bool operator==(const TrigPoly&) const = default;

 private:
  std::vector<Complex> coeffs_;  // index k stored at k + degree()
};

inline TrigPoly operator+(const TrigPoly& f, const TrigPoly& g) {
  int K = std::max(f.degree(), g.degree());
  TrigPoly out(K);
  for (int k = -K; k <= K; ++k) out.set_coeff(k, f.coeff(k) + g.coeff(k));
  return out;
}

inline TrigPoly operator-(const TrigPoly& f, const TrigPoly& g) {
  int K = std::max(f.degree(), g.degree());
  TrigPoly out(K);
  for (int k = -K; k <= K; ++k) out.set_coeff(k, f.coeff(k) - g.coeff(k));
  return out;
}

inline TrigPoly operator*(Complex c, const TrigPoly& f) {
  TrigPoly out(f.degree());
  for (int k = -f.degree(); k <= f.degree(); ++k) out.set_coeff(k, c * f.coeff(k));
  return out;
}

inline TrigPoly operator*(double c, const TrigPoly& f) { return Complex(c, 0.0) * f; }

/// h~(z) = h(1/z): index reversal.
inline TrigPoly reversed(const TrigPoly& h) {
  TrigPoly out(h.degree());
  for (int k = -h.degree(); k <= h.degree(); ++k) out.set_coeff(k, h.coeff(-k));
  return out;
}

/// hbar(z) = conj(h(conj(z))): coefficient conjugation.
inline TrigPoly conj_coeffs(const TrigPoly& h) {
  TrigPoly out(h.degree());
  for (int k = -h.degree(); k <= h.degree(); ++k) out.set_coeff(k, std::conj(h.coeff(k)));
  return out;
}

/// h*(z) = conj(h(1/conj(z))): conjugate-reversed coefficients.
inline TrigPoly star(const TrigPoly& h) { return conj_coeffs(reversed(h)); }

/// A symbol is real-valued on |z| = 1 iff h_{-k} = conj(h_k).
inline bool is_real_symbol(const TrigPoly& h, double tol = 1e-12) {
  for (int k = 0; k <= h.degree(); ++k)
    if (std::abs(h.coeff(-k) - std::conj(h.coeff(k))) > tol) return false;
  return true;
}

inline double coeff_abs_sum(const TrigPoly& h) {
  double s = 0.0;
  for (int k = -h.degree(); k <= h.degree(); ++k) s += std::abs(h.coeff(k));
  return s;
}

/// Beurling B_{1/2} norm: sum_k sqrt(1+|k|) |h_k|.
inline double b_half_norm(const TrigPoly& h) {
  double s = 0.0;
  for (int k = -h.degree(); k <= h.degree(); ++k)
    s += std::sqrt(1.0 + std::abs(k)) * std::abs(h.coeff(k));
  return s;
}

/// Grid size for sampling transforms: next power of two >= 4K + 4.
inline int sampling_grid_size(int degree) {
  int need = 4 * degree + 4;
  int m = 1;
  while (m < need) m <<= 1;
  return m;
}

/// Values of h at the uniform angles theta_m = 2 pi m / M.
inline std::vector<Complex> sample_uniform(const TrigPoly& h, int grid) {
  std::vector<Complex> out(static_cast<size_t>(grid));
  for (int m = 0; m < grid; ++m) out[m] = h.eval_angle(2.0 * kPi * m / grid);
  return out;
}

/// Discrete Fourier coefficients h_k = (1/M) sum_m samples[m] e^{-ik theta_m}
/// for |k| <= K, with samples taken at theta_m = 2 pi m / M.  Exact for trig
/// polynomials of degree <= K once M > 2K; we insist on M >= 4K + 4.
inline TrigPoly coeffs_from_samples(std::span<const Complex> samples, int K) {
  int M = static_cast<int>(samples.size());
  if (M < 4 * K + 4)
    throw DegreeError("coeffs_from_samples: grid of " + std::to_string(M) +
                      " points is too small for degree " + std::to_string(K));
  TrigPoly out(K);
  for (int k = -K; k <= K; ++k) {
    Complex acc{};
    for (int m = 0; m < M; ++m)
      acc += samples[static_cast<size_t>(m)] * std::polar(1.0, -2.0 * kPi * k * m / M);
    out.set_coeff(k, acc / static_cast<double>(M));
  }
  return out;
}

/// Laurent convolution; (fg)(z) = f(z) g(z) with degree K_f + K_g.
inline TrigPoly sym_mul(const TrigPoly& f, const TrigPoly& g) {
  TrigPoly out(f.degree() + g.degree());
  for (int a = -f.degree(); a <= f.degree(); ++a) {
    Complex fa = f.coeff(a);
    if (fa == Complex{}) continue;
    for (int b = -g.degree(); b <= g.degree(); ++b)
      out.set_coeff(a + b, out.coeff(a + b) + fa * g.coeff(b));
  }
  return out;
}

inline double sup_norm_estimate(const TrigPoly& h) {
  int grid = std::max(64, sampling_grid_size(h.degree()));
  double s = 0.0;
  for (int m = 0; m < grid; ++m) s = std::max(s, std::abs(h.eval_angle(2.0 * kPi * m / grid)));
  return s;
}

/// Coefficients of e^h truncated at degree K_out, via sampling of e^{h(theta)}
/// on a power-of-two grid.  The default output degree follows the rule
/// K_out = max(8, 4 K_in + ceil(4 ||h||_inf)); coefficients of e^h decay
/// super-exponentially past a ||h||-scaled degree, which the doubling test in
/// the suite confirms.
inline TrigPoly sym_exp(const TrigPoly& h, int K_out = -1) {
  if (K_out < 0)
    K_out = std::max(8, 4 * h.degree() + static_cast<int>(std::ceil(4.0 * sup_norm_estimate(h))));
  int M = sampling_grid_size(K_out);
  std::vector<Complex> samples(static_cast<size_t>(M));
  for (int m = 0; m < M; ++m) samples[m] = std::exp(h.eval_angle(2.0 * kPi * m / M));
  return coeffs_from_samples(samples, K_out);
}

struct TriangularParts {
  TrigPoly plus;          // strictly positive indices
  TrigPoly minus;         // strictly negative indices
  TrigPoly zero;          // constant part
  TrigPoly plus_closed;   // indices >= 0
  TrigPoly minus_closed;  // indices <= 0
};

/// The five index projections l^+, l^-, l^0, l^{+,0}, l^{-,0}.
inline TriangularParts triangular_parts(const TrigPoly& l) {
  int K = l.degree();
  TriangularParts out{TrigPoly(K), TrigPoly(K), TrigPoly(0), TrigPoly(K), TrigPoly(K)};
  for (int k = 1; k <= K; ++k) {
    out.plus.set_coeff(k, l.coeff(k));
    out.minus.set_coeff(-k, l.coeff(-k));
    out.plus_closed.set_coeff(k, l.coeff(k));
    out.minus_closed.set_coeff(-k, l.coeff(-k));
  }
  out.zero.set_coeff(0, l.coeff(0));
  out.plus_closed.set_coeff(0, l.coeff(0));
  out.minus_closed.set_coeff(0, l.coeff(0));
  return out;
}

/// Max coefficient difference; test equality means <= 1e-12 of this.
inline double coeff_distance(const TrigPoly& f, const TrigPoly& g) {
  int K = std::max(f.degree(), g.degree());
  double d = 0.0;
  for (int k = -K; k <= K; ++k) d = std::max(d, std::abs(f.coeff(k) - g.coeff(k)));
  return d;
}

}  // namespace szegolab
