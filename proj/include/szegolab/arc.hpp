#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "szegolab/cmv.hpp"
#include "szegolab/errors.hpp"
#include "szegolab/linalg.hpp"
#include "szegolab/opuc.hpp"
#include "szegolab/trigpoly.hpp"

namespace szegolab {

/// Geometry of the single-arc case alpha_n = alpha: the arc opening angle
/// phi = 2 arcsin|alpha| and rho = sqrt(1 - |alpha|^2).  All arc quantities
/// depend on |alpha| only; the phase of alpha is carried separately where the
/// QT quadruple needs it.
struct ArcGeometry {
  Complex alpha;
  double abs_alpha;
  double rho;
  double phi;

  explicit ArcGeometry(Complex a)
      : alpha(a), abs_alpha(std::abs(a)), rho(std::sqrt(1.0 - std::norm(a))),
        phi(2.0 * std::asin(std::abs(a))) {
    if (std::abs(a) >= 1.0) throw std::domain_error("ArcGeometry: |alpha| must be < 1");
  }
};

/// The stretching map omega = 2 arccos(rho cos(theta/2)), a bijection of the
/// circle onto the arc [phi, 2 pi - phi).
inline double stretch(const ArcGeometry& g, double theta) {
  double x = g.rho * std::cos(0.5 * theta);
  return 2.0 * std::acos(std::clamp(x, -1.0, 1.0));
}

/// Symbol pair of the k-th CMV power in the unwrapped two-sided picture:
/// D^k = DT(s_k, t_k) up to finitely many entries, with the phase of t_k
/// removed, v_k = (conj(alpha)/|alpha|) t_k.
struct SkVk {
  int k = 0;
  TrigPoly s;
  TrigPoly v;
};

/// s_0..s_{k_max}, v_0..v_{k_max} by the transfer recursion seeded with
/// s_1 = -|alpha|^2 + rho^2/z and v_1 = -|alpha| rho (1 + 1/z).
inline std::vector<SkVk> sk_vk_recurrence(const ArcGeometry& g, int k_max) {
  if (k_max < 1) throw std::invalid_argument("sk_vk_recurrence: k_max must be >= 1");
  double a = g.abs_alpha;
  double rho2 = g.rho * g.rho;
  TrigPoly s1 = TrigPoly::from_terms({{0, -a * a}, {-1, rho2}});
  TrigPoly v1 = TrigPoly::from_terms({{0, -a * g.rho}, {-1, -a * g.rho}});
  TrigPoly s1_rev = reversed(s1);
  TrigPoly z_v1 = sym_mul(TrigPoly::from_terms({{1, 1.0}}), v1);

  std::vector<SkVk> out;
  out.push_back({0, TrigPoly::constant(1.0), TrigPoly()});
  out.push_back({1, s1, v1});
  for (int k = 2; k <= k_max; ++k) {
    const TrigPoly& s = out.back().s;
    const TrigPoly& v = out.back().v;
    TrigPoly sk = sym_mul(s1, s) - sym_mul(z_v1, v);
    TrigPoly vk = sym_mul(v1, s) + sym_mul(s1_rev, v);
    out.push_back({k, std::move(sk), std::move(vk)});
  }
  return out;
}

/// Negative indices: s_{-k} = s_k~, v_{-k} = -v_k.
inline SkVk sk_vk_negate(const SkVk& x) {
  return {-x.k, reversed(x.s), -1.0 * x.v};
}

namespace detail {

/// sin(k w)/sin(w/2) with the removable limits at w -> 0 and w -> 2 pi.
inline double sin_ratio(int k, double omega) {
  double s = std::sin(0.5 * omega);
  if (std::abs(s) < 1e-9) return omega < kPi ? 2.0 * k : -2.0 * k;
  return std::sin(k * omega) / s;
}

}  // namespace detail

/// Closed form s_k(e^{i theta}) = cos(k w) - i rho sin(theta/2) sin(k w)/sin(w/2).
inline Complex sk_closed(const ArcGeometry& g, int k, double theta) {
  double omega = stretch(g, theta);
  int ka = std::abs(k);
  Complex val{std::cos(ka * omega),
              -g.rho * std::sin(0.5 * theta) * detail::sin_ratio(ka, omega)};
  // s_{-k} = s_k~ evaluates as s_k(1/z) = s_k at -theta
  if (k < 0) val = {std::cos(ka * omega),
                    g.rho * std::sin(0.5 * theta) * detail::sin_ratio(ka, omega)};
  return val;
}

/// Closed form v_k(e^{i theta}) = -|alpha| e^{-i theta/2} sin(k w)/sin(w/2).
inline Complex vk_closed(const ArcGeometry& g, int k, double theta) {
  double omega = stretch(g, theta);
  Complex val = -g.abs_alpha * detail::sin_ratio(std::abs(k), omega) *
                std::polar(1.0, -0.5 * theta);
  return k < 0 ? -val : val;
}

struct AbSymbols {
  TrigPoly a;
  TrigPoly b;
};

namespace detail {

struct CosSinCoeffs {
  std::vector<Complex> a;  // a_0..a_N
  std::vector<Complex> b;  // b_1..b_N at index 1..N
};

/// h = a_0 + 2 sum a_j cos(j theta) + 2 sum b_j sin(j theta):
/// a_j = (h_j + h_{-j})/2, b_j = i (h_j - h_{-j})/2.
inline CosSinCoeffs cos_sin_coeffs(const TrigPoly& h) {
  int N = h.degree();
  CosSinCoeffs cs;
  cs.a.resize(static_cast<size_t>(N) + 1);
  cs.b.resize(static_cast<size_t>(N) + 1);
  cs.a[0] = h.coeff(0);
  for (int j = 1; j <= N; ++j) {
    cs.a[static_cast<size_t>(j)] = 0.5 * (h.coeff(j) + h.coeff(-j));
    cs.b[static_cast<size_t>(j)] = Complex(0, 0.5) * (h.coeff(j) - h.coeff(-j));
  }
  return cs;
}

/// A and B through exact Chebyshev symbol calculus: cos(w) is itself the
/// Laurent polynomial g = -|alpha|^2 + rho^2 cos(theta), so
///   A = a_0 + 2 sum a_j T_j(g),
///   B = 2 rho (sin + |alpha|(1 + cos)) sum b_j U_{j-1}(g).
inline AbSymbols ab_symbols_any(const ArcGeometry& geom, const TrigPoly& h) {
  CosSinCoeffs cs = cos_sin_coeffs(h);
  int N = h.degree();
  double a2 = geom.abs_alpha * geom.abs_alpha;
  double rho2 = geom.rho * geom.rho;
  TrigPoly g = TrigPoly::from_terms({{0, -a2}, {1, 0.5 * rho2}, {-1, 0.5 * rho2}});

  TrigPoly cheb_prev = TrigPoly::constant(1.0);  // T_0
  TrigPoly cheb = g;                             // T_1
  TrigPoly u_prev;                               // U_{-1} = 0
  TrigPoly u = TrigPoly::constant(1.0);          // U_0
  TrigPoly asym = TrigPoly::constant(cs.a[0]);
  TrigPoly bsum;
  for (int j = 1; j <= N; ++j) {
    if (j > 1) {
      TrigPoly cheb_next = 2.0 * sym_mul(g, cheb) - cheb_prev;
      cheb_prev = std::move(cheb);
      cheb = std::move(cheb_next);
      TrigPoly u_next = 2.0 * sym_mul(g, u) - u_prev;
      u_prev = std::move(u);
      u = std::move(u_next);
    }
    asym = asym + 2.0 * cs.a[static_cast<size_t>(j)] * cheb;
    bsum = bsum + cs.b[static_cast<size_t>(j)] * u;
  }
  Complex half_i{0.0, -0.5};
  TrigPoly weight = TrigPoly::from_terms({{1, half_i}, {-1, -half_i}});  // sin
  weight = weight + TrigPoly::from_terms({{0, geom.abs_alpha},
                                          {1, 0.5 * geom.abs_alpha},
                                          {-1, 0.5 * geom.abs_alpha}});
  TrigPoly bsym = 2.0 * geom.rho * sym_mul(weight, bsum);
  return {asym.truncated(N), bsym.truncated(N)};
}

}  // namespace detail

/// The arc symbols A^h, B^h of a real h as genuine Laurent polynomials of the
/// same degree, via the exact Chebyshev representations.
inline AbSymbols ab_symbols(const ArcGeometry& geom, const TrigPoly& h) {
  if (!is_real_symbol(h)) throw std::domain_error("ab_symbols: h must be real-valued");
  return detail::ab_symbols_any(geom, h);
}

/// Cross-check route: evaluate the defining displays of A and B pointwise
/// through the stretching map on a uniform grid, then transform back.
inline AbSymbols ab_symbols_sampled(const ArcGeometry& geom, const TrigPoly& h, int grid = 0) {
  if (!is_real_symbol(h)) throw std::domain_error("ab_symbols_sampled: h must be real-valued");
  detail::CosSinCoeffs cs = detail::cos_sin_coeffs(h);
  int N = h.degree();
  if (grid <= 0) grid = std::max(512, sampling_grid_size(N));
  std::vector<Complex> sa(static_cast<size_t>(grid)), sb(static_cast<size_t>(grid));
  for (int m = 0; m < grid; ++m) {
    double theta = 2.0 * kPi * m / grid;
    double omega = stretch(geom, theta);
    Complex va = cs.a[0];
    Complex vb{};
    for (int j = 1; j <= N; ++j) {
      va += 2.0 * cs.a[static_cast<size_t>(j)] * std::cos(j * omega);
      vb += cs.b[static_cast<size_t>(j)] * detail::sin_ratio(j, omega);
    }
    vb *= 2.0 * (std::sin(0.5 * theta) + geom.abs_alpha * std::cos(0.5 * theta));
    sa[static_cast<size_t>(m)] = va;
    sb[static_cast<size_t>(m)] = vb;
  }
  return {coeffs_from_samples(sa, N), coeffs_from_samples(sb, N)};
}

/// Q_alpha(h) = sum_{j>=1} j (A_j A_{-j} + B_j B_{-j}).  For complex h this
/// is the bilinear extension through the same A, B coefficient formulas.
inline Complex q_alpha(const ArcGeometry& geom, const TrigPoly& h) {
  AbSymbols ab = detail::ab_symbols_any(geom, h);
  Complex q{};
  for (int j = 1; j <= std::max(ab.a.degree(), ab.b.degree()); ++j) {
    q += static_cast<double>(j) *
         (ab.a.coeff(j) * ab.a.coeff(-j) + ab.b.coeff(j) * ab.b.coeff(-j));
  }
  return q;
}

/// Symbol quadruple of a QT operator [[J T(s)* J*, J T(t)], [-T(p)* J*, T(q)]].
struct QtSymbol {
  TrigPoly s, t, p, q;
};

inline QtSymbol dt_symbol(const TrigPoly& s, const TrigPoly& t) { return {s, t, t, s}; }

/// Product at the symbol level, finite-rank discrepancies dropped:
/// QT(s1,t1,p1,q1) QT(s2,t2,p2,q2) =
///   QT(s1 s2 - t1* p2, s1* t2 + t1 q2, p1 s2 + q1* p2, -p1* t2 + q1 q2),
/// where * is the conjugate-reversal.
inline QtSymbol qt_mul(const QtSymbol& x, const QtSymbol& y) {
  return {sym_mul(x.s, y.s) - sym_mul(star(x.t), y.p),
          sym_mul(star(x.s), y.t) + sym_mul(x.t, y.q),
          sym_mul(x.p, y.s) + sym_mul(star(x.q), y.p),
          -1.0 * sym_mul(star(x.p), y.t) + sym_mul(x.q, y.q)};
}

/// Adjoint rule QT(s,t,p,q)* = QT(s*, -p, -t, q*).
inline QtSymbol qt_adjoint(const QtSymbol& x) {
  return {star(x.s), -1.0 * x.p, -1.0 * x.t, star(x.q)};
}

/// Dense realization of a QT symbol on the two-sided index window [lo, hi);
/// row/column i maps to slot i - lo.  Used as the matrix oracle for the
/// symbol algebra.
inline CMatrix qt_dense(const QtSymbol& x, int lo, int hi) {
  int n = hi - lo;
  CMatrix out = CMatrix::Zero(n, n);
  for (int j = lo; j < hi; ++j)
    for (int l = lo; l < hi; ++l) {
      Complex v;
      if (j >= 1 && l >= 1) v = x.q.coeff(j - l);                      // T(q)
      else if (j <= 0 && l <= 0) v = std::conj(x.s.coeff(j - l));      // J T(s)* J*
      else if (j <= 0 && l >= 1) v = x.t.coeff(1 - j - l);             // J T(t)
      else v = -std::conj(x.p.coeff(1 - l - j));                       // -T(p)* J*
      out(j - lo, l - lo) = v;
    }
  return out;
}

/// The unwrapping isometry R applied to a one-sided matrix: returns the dense
/// two-sided picture D = R C R* on the window [lo, hi).  One-sided (0-based)
/// index i sits at two-sided position (i/2 + 1) for odd i and (-i/2) for even i.
inline CMatrix unwrap_to_two_sided(const CMatrix& c, int lo, int hi) {
  int n = hi - lo;
  CMatrix out = CMatrix::Zero(n, n);
  auto one_sided = [](int j) {  // two-sided position -> 0-based one-sided index
    return j >= 1 ? 2 * j - 2 : 1 - 2 * j;
  };
  for (int j = lo; j < hi; ++j)
    for (int l = lo; l < hi; ++l) {
      int a = one_sided(j), b = one_sided(l);
      if (a < c.rows() && b < c.cols()) out(j - lo, l - lo) = c(a, b);
    }
  return out;
}

struct CommutatorTrace {
  Complex numerical;  // Tr[U, L] from the dense L/U split
  Complex symbol;     // 2 sum j S_j S_{-j} - sum j (V_j^2 + V_{-j}^2)
  Complex fourier;    // 2 sum j (A_j A_{-j} + B_j B_{-j}) = 2 Q_alpha(h)
};

/// Tr[U, L] for h(C) on the constant-alpha CMV matrix, three independent ways.
/// The numerical route splits h(C) into the strictly lower part plus the
/// corrected diagonal (rho/|alpha|) V_0 on odd 0-based slots, with
/// U = h(C) - L; diag([U,L]) is supported near the fold, so the trace is read
/// over [0, T - 4 deg h).
inline CommutatorTrace trace_commutator(const ArcGeometry& geom, const TrigPoly& h, int T) {
  if (geom.abs_alpha < 1e-8)
    throw std::domain_error("trace_commutator: the L/U diagonal correction divides by "
                            "|alpha|; use the Szego route for alpha = 0");
  int deg = h.effective_degree();
  if (T < 8 * deg + 16)
    throw TruncationError("trace_commutator: need T >= 8 deg(h) + 16");

  auto skvk = sk_vk_recurrence(geom, std::max(1, deg));
  TrigPoly s_sym = TrigPoly::constant(h.coeff(0));
  TrigPoly v_sym;
  for (int j = 1; j <= deg; ++j) {
    s_sym = s_sym + h.coeff(j) * skvk[static_cast<size_t>(j)].s +
            h.coeff(-j) * reversed(skvk[static_cast<size_t>(j)].s);
    v_sym = v_sym + (h.coeff(j) - h.coeff(-j)) * skvk[static_cast<size_t>(j)].v;
  }

  CommutatorTrace out;
  out.symbol = Complex{};
  for (int j = 1; j <= s_sym.degree(); ++j)
    out.symbol += 2.0 * static_cast<double>(j) * s_sym.coeff(j) * s_sym.coeff(-j);
  for (int j = 1; j <= v_sym.degree(); ++j)
    out.symbol -= static_cast<double>(j) *
                  (v_sym.coeff(j) * v_sym.coeff(j) + v_sym.coeff(-j) * v_sym.coeff(-j));

  out.fourier = 2.0 * q_alpha(geom, h);

  VerblunskySeq v = constant_verblunsky(geom.alpha, T + 2);
  CMatrix c = cmv_corner(v, T);
  CMatrix hc = h_of_cmv_matrix(c, h);
  CMatrix lower = CMatrix::Zero(T, T);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < i; ++j) lower(i, j) = hc(i, j);
  Complex diag_corr = geom.rho / geom.abs_alpha * v_sym.coeff(0);
  for (int i = 1; i < T; i += 2) lower(i, i) = diag_corr;
  CMatrix upper = hc - lower;
  CMatrix comm = upper * lower - lower * upper;
  Complex trace{};
  for (int i = 0; i < T - 4 * std::max(1, deg); ++i) trace += comm(i, i);
  out.numerical = trace;
  return out;
}

}  // namespace szegolab
