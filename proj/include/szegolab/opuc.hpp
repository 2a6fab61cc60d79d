#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "szegolab/errors.hpp"
#include "szegolab/measure.hpp"
#include "szegolab/trigpoly.hpp"

namespace szegolab {

/// Verblunsky coefficients alpha_0..alpha_{N-1} of a measure, all strictly
/// inside the unit disk, together with the total mass c_0.
struct VerblunskySeq {
  std::vector<Complex> alphas;
  double mass = 1.0;

  int size() const { return static_cast<int>(alphas.size()); }
  Complex alpha(int j) const { return alphas[static_cast<size_t>(j)]; }
  double rho(int j) const { return std::sqrt(1.0 - std::norm(alpha(j))); }
};

inline VerblunskySeq constant_verblunsky(Complex alpha, int n) {
  return {std::vector<Complex>(static_cast<size_t>(n), alpha), 1.0};
}

/// Monic orthogonal polynomial state after n Szego steps: coefficients of
/// Phi_n and of the reciprocal Phi*_n (ascending powers), and the norm
/// history ||Phi_j||^2 for j = 0..n.
struct OpucState {
  std::vector<Complex> phi;
  std::vector<Complex> phi_star;
  std::vector<double> norms_sq;
};

struct SzegoResult {
  VerblunskySeq verblunsky;
  OpucState state;
};

/// Inner product <A, B>_mu = sum_{j,k} a_j conj(b_k) c_{k-j} from one-sided
/// moments (c_{-m} = conj(c_m)).
inline Complex moment_inner(std::span<const Complex> c, std::span<const Complex> a,
                            std::span<const Complex> b) {
  auto cc = [&c](int m) -> Complex {
    return m >= 0 ? c[static_cast<size_t>(m)] : std::conj(c[static_cast<size_t>(-m)]);
  };
  Complex acc{};
  for (size_t j = 0; j < a.size(); ++j) {
    if (a[j] == Complex{}) continue;
    for (size_t k = 0; k < b.size(); ++k)
      acc += a[j] * std::conj(b[k]) * cc(static_cast<int>(k) - static_cast<int>(j));
  }
  return acc;
}

/// Szego recursion Phi_{n+1} = z Phi_n - conj(alpha_n) Phi*_n run in
/// coefficient space with explicit moment inner products; the sign convention
/// is the one under which the five-diagonal CMV matrix has conj(alpha_0) in
/// its top-left entry and the constant-alpha measure recovers alpha itself.
/// Given c_0..c_N it produces alpha_0..alpha_{n_max-1}; any
/// |alpha_j| >= 1 - 1e-12 aborts with the offending index (clipping back into
/// the disk would silently corrupt every downstream limit check).
inline SzegoResult szego_recursion(std::span<const Complex> c, int n_max = -1) {
  if (c.empty()) throw std::invalid_argument("szego_recursion: empty moments");
  int N = static_cast<int>(c.size()) - 1;
  if (n_max < 0) n_max = N;
  if (n_max > N)
    throw std::out_of_range("szego_recursion: need moments c_0..c_" + std::to_string(n_max));
  double mass = c[0].real();
  if (!(mass > 0.0)) throw std::domain_error("szego_recursion: total mass must be positive");

  auto cc = [&c](int m) -> Complex {
    return m >= 0 ? c[static_cast<size_t>(m)] : std::conj(c[static_cast<size_t>(-m)]);
  };

  std::vector<Complex> phi{1.0};
  std::vector<Complex> phi_star{1.0};
  std::vector<double> norms_sq{mass};
  VerblunskySeq v;
  v.mass = mass;
  v.alphas.reserve(static_cast<size_t>(n_max));

  for (int n = 0; n < n_max; ++n) {
    // <z Phi_n, 1> = sum_j phi_j c_{-(j+1)}
    Complex inner{};
    for (size_t j = 0; j < phi.size(); ++j) inner += phi[j] * cc(-(static_cast<int>(j) + 1));
    Complex alpha = std::conj(inner / norms_sq.back());
    if (std::abs(alpha) >= 1.0 - 1e-12)
      throw PositivityError(n, "szego_recursion: |alpha_" + std::to_string(n) +
                                   "| left the unit disk; moments are not "
                                   "positive definite at this size");
    std::vector<Complex> next(phi.size() + 1, Complex{});
    for (size_t j = 0; j < phi.size(); ++j) {
      next[j + 1] += phi[j];                          // z Phi_n
      next[j] -= std::conj(alpha) * phi_star[j];      // - conj(alpha_n) Phi*_n
    }
    phi = std::move(next);
    phi_star.assign(phi.rbegin(), phi.rend());
    for (auto& x : phi_star) x = std::conj(x);
    norms_sq.push_back(norms_sq.back() * (1.0 - std::norm(alpha)));
    v.alphas.push_back(alpha);
  }
  return {std::move(v), {std::move(phi), std::move(phi_star), std::move(norms_sq)}};
}

namespace detail {

/// One application of the semi-infinite CMV matrix (zero-padded alphas) to a
/// vector, through the Theta-block factors M then L.  O(len) and free of the
/// cancellation that plagues coefficient-space recursions.
inline void apply_cmv_inplace(const std::vector<Complex>& alphas, std::vector<Complex>& x) {
  size_t s = x.size();
  auto alpha = [&alphas](size_t j) { return j < alphas.size() ? alphas[j] : Complex{}; };
  auto rho = [&alphas](size_t j) {
    return j < alphas.size() ? std::sqrt(1.0 - std::norm(alphas[j])) : 1.0;
  };
  std::vector<Complex> t(s);
  t[0] = x[0];
  for (size_t i = 1; i < s; i += 2) {
    Complex a = alpha(i);
    double r = rho(i);
    Complex xi = x[i], xj = (i + 1 < s) ? x[i + 1] : Complex{};
    t[i] = std::conj(a) * xi + r * xj;
    if (i + 1 < s) t[i + 1] = r * xi - a * xj;
  }
  for (size_t i = 0; i < s; i += 2) {
    Complex a = alpha(i);
    double r = rho(i);
    Complex ti = t[i], tj = (i + 1 < s) ? t[i + 1] : Complex{};
    x[i] = std::conj(a) * ti + r * tj;
    if (i + 1 < s) x[i + 1] = r * ti - a * tj;
  }
}

/// Moments -> alphas through the triangular structure of the moment map:
/// c_{m+1} = A(alpha_0..alpha_{m-1}) + alpha_m ||Phi_m||^2 exactly, with A
/// evaluated as a CMV-power moment of the already-extracted prefix.  Both
/// sides are O(1), so the subtraction realizes the conditioning of the moment
/// data itself; the horizon where that conditioning is exhausted shows up as
/// |alpha| reaching the unit circle.
inline VerblunskySeq verblunsky_bootstrap(std::span<const Complex> c, int n_max,
                                          int* breakdown) {
  int N = static_cast<int>(c.size()) - 1;
  if (n_max > N)
    throw std::out_of_range("szego_from_moments: need moments c_0..c_" + std::to_string(n_max));
  double mass = c[0].real();
  if (!(mass > 0.0)) throw std::domain_error("szego_from_moments: total mass must be positive");
  VerblunskySeq v;
  v.mass = mass;
  v.alphas.reserve(static_cast<size_t>(n_max));
  if (breakdown) *breakdown = -1;
  double norm_sq = mass;  // ||Phi_m||^2
  for (int m = 0; m < n_max; ++m) {
    std::vector<Complex> x(2 * static_cast<size_t>(m) + 8);
    x[0] = 1.0;
    for (int j = 0; j <= m; ++j) apply_cmv_inplace(v.alphas, x);
    Complex predicted = mass * std::conj(x[0]);  // c_{m+1} with trial alpha_m = 0
    Complex alpha = (c[static_cast<size_t>(m) + 1] - predicted) / norm_sq;
    if (std::abs(alpha) >= 1.0 - 1e-12 || norm_sq < mass * 1e-280) {
      if (breakdown) *breakdown = m;
      break;
    }
    v.alphas.push_back(alpha);
    norm_sq *= 1.0 - std::norm(alpha);
  }
  return v;
}

}  // namespace detail

/// Verblunsky coefficients alpha_0..alpha_{N-1} from moments c_0..c_N, via
/// the triangular inversion against stable CMV forward evaluation.  The
/// textbook coefficient-space recursion (szego_recursion above) amplifies
/// rounding geometrically for arc-supported measures and serves as a
/// small-n cross-check only.
inline VerblunskySeq szego_from_moments(std::span<const Complex> c) {
  int N = static_cast<int>(c.size()) - 1;
  int breakdown = -1;
  VerblunskySeq v = detail::verblunsky_bootstrap(c, N, &breakdown);
  if (v.size() < N)
    throw PositivityError(breakdown,
                          "szego_from_moments: |alpha_" + std::to_string(breakdown) +
                              "| left the unit disk; moments are not positive "
                              "definite at this size");
  return v;
}

/// Same extraction, but stops quietly at the numerical positivity horizon and
/// returns whatever prefix is reachable in double precision.
inline VerblunskySeq verblunsky_prefix(std::span<const Complex> c, int n_max = -1) {
  int N = static_cast<int>(c.size()) - 1;
  if (n_max < 0 || n_max > N) n_max = N;
  return detail::verblunsky_bootstrap(c, n_max, nullptr);
}

/// Verblunsky coefficients straight from a measure: Gram-Schmidt with full
/// reorthogonalization builds the CMV basis chi_0, chi_1, ... on the
/// quadrature nodes (two orthogonalization passes), and the coefficients are
/// read off the five-diagonal matrix entries.  The node representation keeps
/// every vector unimodular-bounded, which is what lets arc-supported measures
/// reach n in the hundreds where moment-space recursions die near n ~ 30.
inline VerblunskySeq verblunsky_from_measure(const CircleMeasure& mu, int n_count,
                                             int grid_override = 0) {
  CircleMeasure m = mu;
  int resolution = 8 * (2 * n_count + 4);
  int grid = 4096;
  while (grid < resolution) grid <<= 1;
  m.set_quad_points(grid_override > 0 ? grid_override : std::min(mu.quad_points(), grid));

  std::vector<double> theta, weight;
  m.quadrature(theta, weight);
  std::vector<Complex> z;
  std::vector<double> w;
  z.reserve(theta.size() + m.atoms().size());
  for (size_t i = 0; i < theta.size(); ++i) {
    double dens = m.density(theta[i]);
    if (dens <= 0.0) continue;
    z.push_back(std::polar(1.0, theta[i]));
    w.push_back(dens * weight[i]);
  }
  for (const auto& a : m.atoms()) {
    z.push_back(std::polar(1.0, a.theta));
    w.push_back(a.weight);
  }
  const size_t nodes = z.size();
  std::vector<double> sw(nodes);
  double mass = 0.0;
  for (size_t i = 0; i < nodes; ++i) {
    mass += w[i];
    sw[i] = std::sqrt(w[i]);
  }

  // chi as rows of an (orthonormal in C^nodes) basis, sqrt(w)-weighted
  int nbasis = 2 * n_count + 2;
  std::vector<std::vector<Complex>> chi;
  chi.reserve(static_cast<size_t>(nbasis));
  {
    std::vector<Complex> first(nodes);
    double inv = 1.0 / std::sqrt(mass);
    for (size_t i = 0; i < nodes; ++i) first[i] = sw[i] * inv;
    chi.push_back(std::move(first));
  }
  std::vector<Complex> zpow_pos(nodes, 1.0), zpow_neg(nodes, 1.0);
  for (int b = 1; b < nbasis && static_cast<size_t>(b) <= nodes; ++b) {
    std::vector<Complex> v(nodes);
    if (b % 2 == 1) {
      for (size_t i = 0; i < nodes; ++i) zpow_pos[i] *= z[i];
      for (size_t i = 0; i < nodes; ++i) v[i] = sw[i] * zpow_pos[i];
    } else {
      for (size_t i = 0; i < nodes; ++i) zpow_neg[i] *= std::conj(z[i]);
      for (size_t i = 0; i < nodes; ++i) v[i] = sw[i] * zpow_neg[i];
    }
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : chi) {
        Complex coef{};
        for (size_t i = 0; i < nodes; ++i) coef += v[i] * std::conj(q[i]);
        for (size_t i = 0; i < nodes; ++i) v[i] -= coef * q[i];
      }
    double nrm = 0.0;
    for (const Complex& x : v) nrm += std::norm(x);
    nrm = std::sqrt(nrm);
    if (!(nrm > 1e-140)) break;
    for (Complex& x : v) x /= nrm;
    chi.push_back(std::move(v));
  }

  auto centry = [&](int row, int col) {
    Complex acc{};
    const auto& qc = chi[static_cast<size_t>(col)];
    const auto& qr = chi[static_cast<size_t>(row)];
    for (size_t i = 0; i < nodes; ++i) acc += z[i] * qc[i] * std::conj(qr[i]);
    return acc;  // <z chi_col, chi_row>
  };

  VerblunskySeq v;
  v.mass = mass;
  int avail = static_cast<int>(chi.size());
  double rho_prev = 1.0;
  for (int n = 0; n < n_count; ++n) {
    if (n + 1 >= avail) break;
    Complex alphabar;
    if (n == 0)
      alphabar = centry(0, 0);
    else if (n % 2 == 1)
      alphabar = centry(n - 1, n) / rho_prev;  // C_{n-1,n} = conj(alpha_n) rho_{n-1}
    else
      alphabar = centry(n, n - 1) / rho_prev;  // C_{n,n-1} = conj(alpha_n) rho_{n-1}
    Complex alpha = std::conj(alphabar);
    if (std::abs(alpha) >= 1.0 - 1e-12) break;
    v.alphas.push_back(alpha);
    rho_prev = std::sqrt(1.0 - std::norm(alpha));
  }
  return v;
}

/// Measure extraction with a quadrature-doubling agreement cap: keeps the
/// prefix on which the node count and its double agree to `tol`.  This is the
/// honest accuracy horizon of the coefficients; past it the extracted values
/// still reproduce the moments (backward stability) but stop tracking the
/// true sequence.
inline VerblunskySeq stable_verblunsky(const CircleMeasure& mu, int n_count,
                                       double tol = 1e-7) {
  int resolution = 8 * (2 * n_count + 4);
  int grid = 4096;
  while (grid < resolution) grid <<= 1;
  grid = std::min(grid, mu.quad_points());
  VerblunskySeq a = verblunsky_from_measure(mu, n_count, grid);
  VerblunskySeq b = verblunsky_from_measure(mu, n_count, 2 * grid);
  int depth = std::min(a.size(), b.size());
  int keep = 0;
  while (keep < depth && std::abs(a.alpha(keep) - b.alpha(keep)) <= tol) ++keep;
  a.alphas.resize(static_cast<size_t>(keep));
  return a;
}

/// log D_n = sum_{j<n} log ||Phi_j||^2 with ||Phi_j||^2 = c_0 prod_{k<j} rho_k^2,
/// kept in the log domain throughout (D_n underflows past n ~ 300 otherwise).
inline double log_toeplitz_det(const VerblunskySeq& v, int n) {
  if (n < 0 || n > v.size())
    throw std::out_of_range("log_toeplitz_det: n exceeds the available coefficients");
  double log_norm = std::log(v.mass);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    acc += log_norm;
    if (j < n - 1) log_norm += std::log1p(-std::norm(v.alpha(j)));
  }
  return acc;
}

}  // namespace szegolab
