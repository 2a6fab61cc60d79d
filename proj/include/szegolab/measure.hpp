#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "szegolab/errors.hpp"
#include "szegolab/trigpoly.hpp"

namespace szegolab {

struct Atom {
  double theta;   // in [0, 2 pi)
  double weight;  // > 0
};

inline int default_quad_points() {
  if (const char* env = std::getenv("SZEGOLAB_QUAD_POINTS")) {
    int m = std::atoi(env);
    if (m > 0) return m;
  }
  return 1 << 14;
}

/// Finite positive Borel measure on the unit circle: an absolutely continuous
/// density w(theta) against d theta / 2 pi plus finitely many point masses.
/// Measures supported on a symmetric arc carry their arc so that moment
/// quadrature can use the endpoint-clustered substitution
/// theta = center + halfwidth * sin(u), restoring spectral accuracy for
/// densities with square-root vanishing at the arc endpoints.
class CircleMeasure {
 public:
  using Density = std::function<double(double)>;

  CircleMeasure(Density density, std::vector<Atom> atoms)
      : density_(std::move(density)), atoms_(std::move(atoms)) {}

  double density(double theta) const { return density_(theta); }
  const std::vector<Atom>& atoms() const { return atoms_; }

  int quad_points() const { return quad_points_; }
  void set_quad_points(int m) { quad_points_ = m; }

  bool arc_quadrature() const { return arc_quadrature_; }
  double arc_lo() const { return arc_lo_; }
  double arc_hi() const { return arc_hi_; }
  void set_arc(double lo, double hi) {
    arc_quadrature_ = true;
    arc_lo_ = lo;
    arc_hi_ = hi;
  }

  /// Quadrature nodes and weights against d theta / 2 pi.
  void quadrature(std::vector<double>& theta, std::vector<double>& weight) const {
    int M = quad_points_;
    theta.resize(static_cast<size_t>(M));
    weight.resize(static_cast<size_t>(M));
    if (arc_quadrature_) {
      double center = 0.5 * (arc_lo_ + arc_hi_);
      double halfwidth = 0.5 * (arc_hi_ - arc_lo_);
      for (int m = 0; m < M; ++m) {
        double u = -0.5 * kPi + kPi * (m + 0.5) / M;
        theta[m] = center + halfwidth * std::sin(u);
        weight[m] = halfwidth * std::cos(u) * (kPi / M) / (2.0 * kPi);
      }
    } else {
      for (int m = 0; m < M; ++m) {
        theta[m] = 2.0 * kPi * (m + 0.5) / M;
        weight[m] = 1.0 / M;
      }
    }
  }

 private:
  Density density_;
  std::vector<Atom> atoms_;
  int quad_points_ = default_quad_points();
  bool arc_quadrature_ = false;
  double arc_lo_ = 0.0;
  double arc_hi_ = 2.0 * kPi;
};

/// Normalized arclength measure d theta / 2 pi.
inline CircleMeasure lebesgue() {
  return CircleMeasure([](double) { return 1.0; }, {});
}

/// Derived data of the constant-Verblunsky (Geronimus) measure: the arc
/// opening angle phi, the atom location beta and its weight q.
struct GeronimusParams {
  Complex alpha;
  double rho;   // sqrt(1 - |alpha|^2)
  double phi;   // 2 arcsin |alpha|
  double beta;  // from 1 + conj(alpha) = |1 + conj(alpha)| e^{i beta / 2}
  double q;     // atom weight, 0 iff |alpha + 1/2| <= 1/2
};

inline GeronimusParams geronimus_params(Complex alpha) {
  if (std::abs(alpha) >= 1.0)
    throw std::domain_error("geronimus: |alpha| must be < 1");
  GeronimusParams p;
  p.alpha = alpha;
  double a = std::abs(alpha);
  p.rho = std::sqrt(1.0 - a * a);
  p.phi = 2.0 * std::asin(a);
  p.beta = 2.0 * std::arg(1.0 + std::conj(alpha));
  double off = std::abs(alpha + 0.5);
  p.q = off <= 0.5 ? 0.0
                   : 2.0 / std::norm(1.0 + alpha) * (off * off - 0.25);
  return p;
}

/// The measure with constant Verblunsky coefficients alpha_n = alpha:
/// density (1/|1+alpha|) sqrt(cos^2(phi/2) - cos^2(theta/2)) / sin((theta-beta)/2)
/// supported on the arc (phi, 2 pi - phi), plus at most one atom at e^{i beta}.
inline CircleMeasure geronimus(Complex alpha) {
  GeronimusParams p = geronimus_params(alpha);
  double scale = 1.0 / std::abs(1.0 + alpha);
  double cos2half = std::cos(0.5 * p.phi) * std::cos(0.5 * p.phi);
  double phi = p.phi;
  double beta = p.beta;
  auto w = [scale, cos2half, phi, beta](double theta) -> double {
    theta = std::fmod(theta, 2.0 * kPi);
    if (theta < 0.0) theta += 2.0 * kPi;
    if (theta <= phi || theta >= 2.0 * kPi - phi) return 0.0;
    // removable 0/0 at theta = beta: evaluate the one-sided limit instead
    double d = std::remainder(theta - beta, 2.0 * kPi);
    if (std::abs(d) < 1e-9) theta = beta + (d >= 0.0 ? 1e-9 : -1e-9);
    double c = std::cos(0.5 * theta);
    double s2 = cos2half - c * c;
    if (s2 <= 0.0) return 0.0;
    return scale * std::sqrt(s2) / std::sin(0.5 * (theta - beta));
  };
  std::vector<Atom> atoms;
  if (p.q > 0.0) {
    double at = std::fmod(p.beta + 2.0 * kPi, 2.0 * kPi);
    atoms.push_back({at, p.q});
  }
  CircleMeasure mu(w, atoms);
  // the clustered substitution relies on the square-root vanishing of the
  // density at the arc endpoints; a degenerate arc is the full circle
  if (p.phi > 1e-8) mu.set_arc(p.phi, 2.0 * kPi - p.phi);
  return mu;
}

struct FhSingularity {
  double theta;  // singularity location in [0, 2 pi)
  double alpha;  // |z - z_j|^{2 alpha_j} exponent
  double beta;   // jump exponent; only beta = 0 keeps the weight positive
};

/// Fisher-Hartwig demo weight w(theta) = prod_j |z - z_j|^{2 alpha_j}.
/// Only the positive-measure corner of the Fisher-Hartwig class is
/// representable here: real alpha_j >= 0 and beta_j = 0.  The quadrature
/// nodes are clustered at the first singularity, which removes its algebraic
/// cusp from the substituted integrand; further singularities see the plain
/// node density.
inline CircleMeasure fisher_hartwig(const std::vector<FhSingularity>& params) {
  for (const auto& s : params) {
    if (!(s.alpha > -0.5))
      throw std::domain_error("fisher_hartwig: need alpha_j > -1/2");
    if (s.alpha < 0.0)
      throw std::domain_error("fisher_hartwig: alpha_j < 0 is outside the numerically safe range");
    if (s.beta != 0.0)
      throw std::domain_error("fisher_hartwig: nonzero beta_j makes the weight non-positive");
  }
  auto w = [params](double theta) -> double {
    double v = 1.0;
    for (const auto& s : params) {
      double chord = 2.0 * std::abs(std::sin(0.5 * (theta - s.theta)));
      v *= std::pow(chord, 2.0 * s.alpha);
    }
    return v;
  };
  CircleMeasure mu(w, {});
  if (!params.empty() && params.front().alpha > 0.0)
    mu.set_arc(params.front().theta, params.front().theta + 2.0 * kPi);
  return mu;
}

/// mu -> e^h mu for a real-valued symbol h; atoms pick up e^{h(theta_a)}.
inline CircleMeasure exp_perturb(const CircleMeasure& mu, const TrigPoly& h) {
  if (!is_real_symbol(h))
    throw std::domain_error("exp_perturb: h must be real-valued; complex "
                            "perturbations go through the moment route");
  auto w = [base = mu, h](double theta) {
    return base.density(theta) * std::exp(h.eval_angle(theta).real());
  };
  std::vector<Atom> atoms = mu.atoms();
  for (auto& a : atoms) a.weight *= std::exp(h.eval_angle(a.theta).real());
  CircleMeasure out(w, atoms);
  out.set_quad_points(mu.quad_points());
  if (mu.arc_quadrature()) out.set_arc(mu.arc_lo(), mu.arc_hi());
  return out;
}

inline CircleMeasure with_atom(CircleMeasure mu, double theta, double weight) {
  auto atoms = mu.atoms();
  atoms.push_back({theta, weight});
  CircleMeasure out([mu](double t) { return mu.density(t); }, atoms);
  out.set_quad_points(mu.quad_points());
  if (mu.arc_quadrature()) out.set_arc(mu.arc_lo(), mu.arc_hi());
  return out;
}

/// Trigonometric moments c_k = int z^{-k} dmu for k = 0..k_max; negatives are
/// available as conjugates since mu is positive.
inline std::vector<Complex> moments(const CircleMeasure& mu, int k_max) {
  if (k_max < 0) throw std::invalid_argument("moments: k_max must be >= 0");
  if (k_max > 0 && mu.quad_points() < 8 * k_max)
    throw ResolutionError("moments: need quad_points >= 8 k_max = " +
                          std::to_string(8 * k_max));
  std::vector<double> theta, weight;
  mu.quadrature(theta, weight);
  size_t M = theta.size();
  std::vector<double> f(M);
  for (size_t m = 0; m < M; ++m) f[m] = mu.density(theta[m]) * weight[m];

  std::vector<Complex> c(static_cast<size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    Complex acc{};
    for (size_t m = 0; m < M; ++m) acc += f[m] * std::polar(1.0, -k * theta[m]);
    for (const auto& a : mu.atoms()) acc += a.weight * std::polar(1.0, -k * a.theta);
    c[static_cast<size_t>(k)] = acc;
  }
  return c;
}

inline double total_mass(const CircleMeasure& mu) { return moments(mu, 0)[0].real(); }

/// Two-sided moments of e^h dmu for possibly complex h, indexed k in
/// [-k_max, k_max] (slot k + k_max).  For complex h the perturbed "measure"
/// is no longer positive, so c_{-k} != conj(c_k) in general.
inline std::vector<Complex> perturbed_moments(const CircleMeasure& mu, const TrigPoly& h,
                                              int k_max) {
  if (k_max > 0 && mu.quad_points() < 8 * k_max)
    throw ResolutionError("perturbed_moments: need quad_points >= 8 k_max");
  std::vector<double> theta, weight;
  mu.quadrature(theta, weight);
  size_t M = theta.size();
  std::vector<Complex> f(M);
  for (size_t m = 0; m < M; ++m)
    f[m] = mu.density(theta[m]) * weight[m] * std::exp(h.eval_angle(theta[m]));

  std::vector<Complex> c(2 * static_cast<size_t>(k_max) + 1);
  for (int k = -k_max; k <= k_max; ++k) {
    Complex acc{};
    for (size_t m = 0; m < M; ++m) acc += f[m] * std::polar(1.0, -k * theta[m]);
    for (const auto& a : mu.atoms())
      acc += a.weight * std::exp(h.eval_angle(a.theta)) * std::polar(1.0, -k * a.theta);
    c[static_cast<size_t>(k + k_max)] = acc;
  }
  return c;
}

}  // namespace szegolab
