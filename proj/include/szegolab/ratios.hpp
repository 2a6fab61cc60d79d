#pragma once

#include <cmath>
#include <complex>

#include "szegolab/cmv.hpp"
#include "szegolab/linalg.hpp"
#include "szegolab/measure.hpp"
#include "szegolab/opuc.hpp"
#include "szegolab/trigpoly.hpp"

namespace szegolab {

/// Tr P_n h(C) P_n = int h(z) K_n(z,z) dmu(z) = n L_n(h), read off a padded
/// CMV truncation whose diagonal is exact over the first n slots.
inline Complex kernel_diag_trace(const VerblunskySeq& v, const TrigPoly& h, int n) {
  if (n < 1) throw std::invalid_argument("kernel_diag_trace: n must be >= 1");
  int T = n + 2 * h.effective_degree() + 4;
  CMatrix c = cmv_corner(v, T);
  CMatrix hc = h_of_cmv_matrix(c, h);
  Complex trace{};
  for (int j = 0; j < n; ++j) trace += hc(j, j);
  return trace;
}

inline Complex kernel_diag_trace(const CircleMeasure& mu, const TrigPoly& h, int n) {
  int T = n + 2 * h.effective_degree() + 4;
  VerblunskySeq v = verblunsky_from_measure(mu, T);
  return kernel_diag_trace(v, h, n);
}

/// log [ D_n(e^h dmu) / D_n(dmu) ].  Real h goes through the Verblunsky
/// product formula of both measures; complex h sends the numerator through an
/// LU factorization of the perturbed moment matrix in the log domain.
inline Complex log_det_ratio(const CircleMeasure& mu, const TrigPoly& h, int n) {
  if (n < 1) throw std::invalid_argument("log_det_ratio: n must be >= 1");
  if (is_real_symbol(h)) {
    VerblunskySeq v0 = verblunsky_from_measure(mu, n);
    VerblunskySeq vh = verblunsky_from_measure(exp_perturb(mu, h), n);
    return {log_toeplitz_det(vh, n) - log_toeplitz_det(v0, n), 0.0};
  }
  std::vector<Complex> ch = perturbed_moments(mu, h, n - 1);
  CMatrix t(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(i, j) = ch[static_cast<size_t>(i - j + n - 1)];
  Complex log_num = lu_log_det(t);
  VerblunskySeq v0 = verblunsky_from_measure(mu, n);
  return log_num - Complex{log_toeplitz_det(v0, n), 0.0};
}

/// Psi_n through the moment route: exp(log det ratio - kernel trace).
inline Complex log_psi_moment(const CircleMeasure& mu, const TrigPoly& h, int n) {
  return log_det_ratio(mu, h, n) - kernel_diag_trace(mu, h, n);
}

inline Complex psi_moment(const CircleMeasure& mu, const TrigPoly& h, int n) {
  return std::exp(log_psi_moment(mu, h, n));
}

}  // namespace szegolab
