#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "szegolab/errors.hpp"
#include "szegolab/linalg.hpp"
#include "szegolab/opuc.hpp"
#include "szegolab/trigpoly.hpp"

namespace szegolab {

namespace detail {

/// Writes the 2x2 factor [[conj(a), rho], [rho, -a]] with its top-left corner
/// at (i, i), clipping entries that fall outside [0, size).
inline void put_theta_block(CMatrix& x, int i, Complex a, int size) {
  double rho = std::sqrt(std::max(0.0, 1.0 - std::norm(a)));
  auto put = [&x, size](int r, int c, Complex v) {
    if (r >= 0 && r < size && c >= 0 && c < size) x(r, c) = v;
  };
  put(i, i, std::conj(a));
  put(i, i + 1, rho);
  put(i + 1, i, rho);
  put(i + 1, i + 1, -a);
}

}  // namespace detail

/// Top-left T x T corner of the semi-infinite CMV matrix, assembled from the
/// factorization C = L M with L = Theta_0 + Theta_2 + ... and
/// M = 1 + Theta_1 + Theta_3 + ...  The product is taken two rows larger so
/// the corner entries are exactly those of the untruncated operator.
inline CMatrix cmv_corner(const VerblunskySeq& v, int T) {
  if (T < 1) throw std::invalid_argument("cmv_corner: T must be positive");
  if (T > v.size())
    throw std::out_of_range("cmv_corner: T = " + std::to_string(T) +
                            " exceeds the " + std::to_string(v.size()) +
                            " available Verblunsky coefficients");
  int B = T + 2;
  CMatrix L = CMatrix::Zero(B, B);
  CMatrix M = CMatrix::Zero(B, B);
  auto alpha = [&v](int j) { return j < v.size() ? v.alpha(j) : Complex{}; };
  for (int i = 0; i < B; i += 2) detail::put_theta_block(L, i, alpha(i), B);
  M(0, 0) = 1.0;
  for (int i = 1; i < B; i += 2) detail::put_theta_block(M, i, alpha(i), B);
  return (L * M).topLeftCorner(T, T);
}

/// Finite truncation of the five-diagonal CMV matrix together with its
/// generating coefficients.
class CmvMatrix {
 public:
  CmvMatrix(const VerblunskySeq& v, int size)
      : matrix_(cmv_corner(v, size)), alphas_(v), size_(size) {}

  int size() const { return size_; }
  const CMatrix& matrix() const { return matrix_; }
  const VerblunskySeq& alphas() const { return alphas_; }

 private:
  CMatrix matrix_;
  VerblunskySeq alphas_;
  int size_;
};

inline CmvMatrix build_cmv(const VerblunskySeq& v, int T) { return CmvMatrix(v, T); }

/// h applied to a truncated CMV matrix through non-negative powers of the
/// matrix and of its adjoint: sum_{j>=0} h_j C^j + sum_{j>0} h_{-j} (C*)^j.
/// Bandwidth 2 makes the top-left (T - 2 deg h) corner exact.
inline CMatrix h_of_cmv_matrix(const CMatrix& c, const TrigPoly& h) {
  int T = static_cast<int>(c.rows());
  int deg = h.effective_degree();
  if (T - 2 * deg < 1)
    throw TruncationError("h_of_cmv: truncation too small, no trusted corner");
  CMatrix out = h.coeff(0) * CMatrix::Identity(T, T);
  CMatrix power = CMatrix::Identity(T, T);
  for (int j = 1; j <= deg; ++j) {
    power = power * c;
    out += h.coeff(j) * power;
  }
  CMatrix adj = c.adjoint();
  power = CMatrix::Identity(T, T);
  for (int j = 1; j <= deg; ++j) {
    power = power * adj;
    out += h.coeff(-j) * power;
  }
  return out;
}

inline CMatrix h_of_cmv(const CmvMatrix& c, const TrigPoly& h) {
  return h_of_cmv_matrix(c.matrix(), h);
}

/// Minimum padding for the trusted corner to survive the squarings of the
/// matrix exponential; validated by the padding-stability checks in the suite
/// rather than trusted a priori.
inline int pad_min(const TrigPoly& h) {
  int deg = h.effective_degree();
  double hinf = sup_norm_estimate(h);
  return 2 * deg * (static_cast<int>(std::ceil(std::log2(1.0 + hinf))) + 8) + 8;
}

/// log Psi_n = log det(I + P_n (e^{h(C)} - I) P_n) - Tr P_n h(C) P_n on the
/// padded truncation T = n + pad.  The determinant equals the determinant of
/// the n x n corner of e^{h(C)}; it is evaluated in the log domain with
/// pivot-phase tracking.
inline Complex log_psi_fredholm(const VerblunskySeq& v, const TrigPoly& h, int n, int pad) {
  if (pad < pad_min(h))
    throw TruncationError("log_psi_fredholm: pad = " + std::to_string(pad) +
                          " below pad_min = " + std::to_string(pad_min(h)));
  int T = n + pad;
  CMatrix c = cmv_corner(v, T);
  CMatrix hc = h_of_cmv_matrix(c, h);
  CMatrix e = expm(hc);
  Complex log_det = lu_log_det(e.topLeftCorner(n, n));
  Complex trace{};
  for (int j = 0; j < n; ++j) trace += hc(j, j);
  return log_det - trace;
}

inline Complex psi_fredholm(const VerblunskySeq& v, const TrigPoly& h, int n, int pad) {
  return std::exp(log_psi_fredholm(v, h, n, pad));
}

namespace detail {

inline const double kFactorial[7] = {1, 1, 2, 6, 24, 120, 720};

/// Composition sum of Eq.-style cumulant coefficients:
///   (1/(m+1)) sum_j (-1)^{j-1} sum_{l_1+..+l_j=m}
///       Tr P H^{l_1} P H^{l_2} ... P H^{l_j} [H, P] / (l_1! ... l_j!)
/// where P projects onto the first `n_proj` rows of the truncation.
inline Complex composition_trace_sum(const CMatrix& h, int n_proj, int m) {
  int T = static_cast<int>(h.rows());
  std::vector<CMatrix> powers(static_cast<size_t>(m) + 1);
  powers[0] = CMatrix::Identity(T, T);
  for (int l = 1; l <= m; ++l) powers[l] = powers[l - 1] * h;

  // P H^l as "zero out the rows >= n_proj"
  auto projected_power = [&](int l) {
    CMatrix x = powers[static_cast<size_t>(l)];
    x.bottomRows(T - n_proj).setZero();
    return x;
  };
  // [H, P]: (H P)_{ab} = H_{ab} [b < n_proj], (P H)_{ab} = H_{ab} [a < n_proj]
  CMatrix k = CMatrix::Zero(T, T);
  for (int a = 0; a < T; ++a)
    for (int b = 0; b < T; ++b)
      k(a, b) = h(a, b) * (static_cast<double>(b < n_proj) - static_cast<double>(a < n_proj));

  Complex total{};
  // compositions of m encoded by cut masks over the m-1 interior positions
  for (unsigned mask = 0; mask < (1u << (m - 1)); ++mask) {
    std::vector<int> parts;
    int run = 1;
    for (int pos = 0; pos < m - 1; ++pos) {
      if (mask & (1u << pos)) {
        parts.push_back(run);
        run = 1;
      } else {
        ++run;
      }
    }
    parts.push_back(run);
    int j = static_cast<int>(parts.size());
    double denom = 1.0;
    for (int l : parts) denom *= kFactorial[l];

    CMatrix prod = projected_power(parts[0]);
    for (int i = 1; i < j; ++i) prod = prod * projected_power(parts[static_cast<size_t>(i)]);
    Complex tr = (prod.transpose().cwiseProduct(k)).sum();  // Tr(prod * k)
    total += (j % 2 == 1 ? 1.0 : -1.0) * tr / denom;
  }
  return total / static_cast<double>(m + 1);
}

}  // namespace detail

/// Cumulant coefficient E_m^{(n)} of the expansion
/// Phi_n(t) = sum_m t^{m+1} E_m^{(n)}, evaluated on a padded truncation that
/// keeps every trace exact by bandedness.
inline Complex cumulant_E(const VerblunskySeq& v, const TrigPoly& h, int n, int m) {
  if (m < 1 || m > 6)
    throw UnsupportedOrderError("cumulant_E: order m = " + std::to_string(m) +
                                " outside the supported range 1..6");
  int deg = h.effective_degree();
  int T = n + 2 * (m + 1) * deg + 4;
  CMatrix c = cmv_corner(v, T);
  CMatrix hc = h_of_cmv_matrix(c, h);
  return detail::composition_trace_sum(hc, n, m);
}

/// A right limit of a Verblunsky sequence along a subsequence: the window of
/// limiting coefficients beta_k, |k| <= W, plus per-k Cauchy residuals over
/// the tail of the subsequence for convergence diagnosis.
struct RightLimit {
  int window = 0;
  std::vector<Complex> betas;      // slot k + window
  std::vector<double> residuals;   // same layout
  std::vector<int> source_indices;

  Complex beta(int k) const {
    if (std::abs(k) > window) throw std::out_of_range("RightLimit::beta: |k| > window");
    return betas[static_cast<size_t>(k + window)];
  }
  double residual(int k) const { return residuals[static_cast<size_t>(k + window)]; }
  double max_residual() const {
    double r = 0.0;
    for (double x : residuals) r = std::max(r, x);
    return r;
  }
};

inline RightLimit right_limit(const VerblunskySeq& v, std::span<const int> subseq, int window) {
  if (subseq.empty()) throw std::invalid_argument("right_limit: empty subsequence");
  for (int nj : subseq)
    if (nj - window < 0 || nj + window >= v.size())
      throw std::out_of_range("right_limit: window exceeds available coefficients at n_j = " +
                              std::to_string(nj));
  RightLimit rl;
  rl.window = window;
  rl.source_indices.assign(subseq.begin(), subseq.end());
  int last = subseq.back();
  size_t tail_start = subseq.size() / 2;
  for (int k = -window; k <= window; ++k) {
    Complex b = v.alpha(last + k);
    double res = 0.0;
    for (size_t j = tail_start; j < subseq.size(); ++j)
      res = std::max(res, std::abs(v.alpha(subseq[j] + k) - b));
    rl.betas.push_back(b);
    rl.residuals.push_back(res);
  }
  return rl;
}

/// Doubly-infinite CMV pattern from a two-sided coefficient sequence, dense
/// on the index window [lo, hi).  The Theta blocks sit at absolute positions
/// (even for the L factor, odd for the M factor), so there is no fold.
/// `beta` is consulted for indices in [lo - 1, hi).
inline CMatrix extended_cmv(const std::function<Complex(int)>& beta, int lo, int hi) {
  int n = hi - lo;
  CMatrix L = CMatrix::Zero(n, n);
  CMatrix M = CMatrix::Zero(n, n);
  auto put_block = [&](CMatrix& x, int i) {
    Complex a = beta(i);
    double rho = std::sqrt(std::max(0.0, 1.0 - std::norm(a)));
    auto put = [&](int r, int c, Complex val) {
      if (r >= lo && r < hi && c >= lo && c < hi) x(r - lo, c - lo) = val;
    };
    put(i, i, std::conj(a));
    put(i, i + 1, rho);
    put(i + 1, i, rho);
    put(i + 1, i + 1, -a);
  };
  int first_even = lo % 2 == 0 ? lo : lo - 1;
  for (int i = first_even; i < hi; i += 2) put_block(L, i);
  int first_odd = lo % 2 == 0 ? lo - 1 : lo;
  for (int i = first_odd; i < hi; i += 2) put_block(M, i);
  return L * M;
}

/// F_m evaluated on the two-sided truncation built from a right limit, with
/// P_ the projection onto the negative indices.  Exact (hence stable under
/// doubling M) once M clears the bandedness threshold 2 (m+1) deg h.
inline Complex f_m_truncated(const RightLimit& beta, const TrigPoly& h, int m, int M) {
  if (m < 1 || m > 6)
    throw UnsupportedOrderError("f_m_truncated: order m outside the supported range 1..6");
  int deg = h.effective_degree();
  if (M < 2 * (m + 1) * deg)
    throw TruncationError("f_m_truncated: M below the stabilization threshold " +
                          std::to_string(2 * (m + 1) * deg));
  if (beta.window < M)
    throw std::out_of_range("f_m_truncated: right-limit window smaller than M");
  // indices just outside the window only touch the truncation edge, never the fold
  auto b = [&beta](int k) {
    return beta.beta(std::clamp(k, -beta.window, beta.window));
  };
  CMatrix a = extended_cmv(b, -M, M);
  CMatrix ha = h_of_cmv_matrix(a, h);
  return detail::composition_trace_sum(ha, M, m);  // rows 0..M-1 <-> indices < 0
}

}  // namespace szegolab
