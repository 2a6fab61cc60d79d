#include <doctest.h>

#include <random>

#include "szegolab/cmv.hpp"
#include "szegolab/measure.hpp"
#include "szegolab/opuc.hpp"
#include "szegolab/ratios.hpp"

using namespace szegolab;

namespace {

std::vector<Complex> cmv_moments(const VerblunskySeq& v, int k_max) {
  CMatrix c = cmv_corner(v, std::min(v.size(), 2 * k_max + 6));
  std::vector<Complex> out(static_cast<size_t>(k_max) + 1);
  out[0] = v.mass;
  CMatrix p = CMatrix::Identity(c.rows(), c.cols());
  for (int k = 1; k <= k_max; ++k) {
    p = p * c;
    out[static_cast<size_t>(k)] = v.mass * std::conj(p(0, 0));
  }
  return out;
}

/// Quadrature values of the monic polynomial with the given coefficients.
Complex eval_poly(const std::vector<Complex>& coeffs, Complex z) {
  Complex acc{};
  for (size_t j = coeffs.size(); j-- > 0;) acc = acc * z + coeffs[j];
  return acc;
}

}  // namespace

TEST_SUITE_BEGIN("opuc");

TEST_CASE("lebesgue moments give vanishing coefficients") {
  std::vector<Complex> c(17, Complex{});
  c[0] = 1.0;
  VerblunskySeq v = szego_from_moments(c);
  REQUIRE(v.size() == 16);
  for (int j = 0; j < 16; ++j) CHECK(std::abs(v.alpha(j)) < 1e-14);
}

TEST_CASE("constant-alpha moments recover alpha near the fold") {
  VerblunskySeq truth = constant_verblunsky(0.5, 60);
  auto c = cmv_moments(truth, 18);
  VerblunskySeq v = szego_from_moments(c);
  for (int j = 0; j < 16; ++j) CHECK(std::abs(v.alpha(j) - 0.5) < 1e-8);
  // the measure-level recursion reaches the full window
  VerblunskySeq vm = verblunsky_from_measure(geronimus(0.5), 32);
  for (int j = 0; j < 32; ++j) CHECK(std::abs(vm.alpha(j) - 0.5) < 1e-8);
}

TEST_CASE("moment round trip through the CMV matrix") {
  // |1 + z|^2 weight: extraction then reconstruction reproduces the moments
  CircleMeasure fh = fisher_hartwig({{kPi, 1.0, 0.0}});
  auto c = moments(fh, 40);
  VerblunskySeq v = szego_from_moments(c);
  auto back = cmv_moments(v, 24);
  for (int k = 0; k <= 24; ++k) CHECK(std::abs(back[k] - c[k]) < 1e-9);

  // geronimus(0.5): measure-level extraction, k <= 24 identity to 1e-8
  CircleMeasure g = geronimus(0.5);
  auto cg = moments(g, 40);
  VerblunskySeq vg = verblunsky_from_measure(g, 40);
  auto backg = cmv_moments(vg, 24);
  for (int k = 0; k <= 24; ++k) CHECK(std::abs(backg[k] - cg[k]) < 1e-8);
}

TEST_CASE("positivity loss aborts with the offending index") {
  std::vector<Complex> bad{Complex{1.0}, Complex{1.2}};
  try {
    szego_from_moments(bad);
    FAIL("expected PositivityError");
  } catch (const PositivityError& e) {
    CHECK(e.index() == 0);
  }
}

TEST_CASE("szego recursion state: orthogonality and norms") {
  for (auto mu : {lebesgue(), geronimus(0.4), with_atom(lebesgue(), 1.0, 0.3)}) {
    auto c = moments(mu, 18);
    SzegoResult res = szego_recursion(c, 16);
    // monic, reciprocal, and orthogonal to z^k for k < 16
    CHECK(std::abs(res.state.phi.back() - 1.0) < 1e-9);
    for (size_t j = 0; j < res.state.phi.size(); ++j)
      CHECK(std::abs(res.state.phi_star[j] - std::conj(res.state.phi[res.state.phi.size() - 1 - j])) <
            1e-12);
    double norm2 = res.state.norms_sq[16];
    for (int k = 0; k < 16; ++k) {
      std::vector<Complex> zk(static_cast<size_t>(k) + 1, Complex{});
      zk.back() = 1.0;
      CHECK(std::abs(moment_inner(c, res.state.phi, zk)) <= 1e-8 * norm2);
    }
    // norm recursion against quadrature norms
    std::vector<double> theta, weight;
    mu.quadrature(theta, weight);
    double quad_norm = 0.0;
    for (size_t i = 0; i < theta.size(); ++i) {
      Complex val = eval_poly(res.state.phi, std::polar(1.0, theta[i]));
      quad_norm += mu.density(theta[i]) * weight[i] * std::norm(val);
    }
    for (const auto& a : mu.atoms())
      quad_norm += a.weight * std::norm(eval_poly(res.state.phi, std::polar(1.0, a.theta)));
    CHECK(quad_norm == doctest::Approx(norm2).epsilon(1e-8));
    for (int j = 0; j < 16; ++j)
      CHECK(res.state.norms_sq[j + 1] / res.state.norms_sq[j] ==
            doctest::Approx(1.0 - std::norm(res.verblunsky.alpha(j))).epsilon(1e-10));
  }
}

TEST_CASE("log_toeplitz_det closed cases and dense oracle") {
  VerblunskySeq zero = constant_verblunsky(0.0, 12);
  CHECK(log_toeplitz_det(zero, 8) == doctest::Approx(0.0));

  VerblunskySeq half = constant_verblunsky(0.5, 12);
  CHECK(log_toeplitz_det(half, 3) == doctest::Approx(std::log(0.421875)).epsilon(1e-13));

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  VerblunskySeq v;
  v.mass = 1.0;
  for (int j = 0; j < 10; ++j) v.alphas.push_back(Complex(u(rng), u(rng)));
  auto c = cmv_moments(v, 8);
  CMatrix t(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      int k = i - j;
      t(i, j) = k >= 0 ? c[static_cast<size_t>(k)] : std::conj(c[static_cast<size_t>(-k)]);
    }
  CHECK(std::abs(lu_log_det(t).real() - log_toeplitz_det(v, 8)) < 1e-8);
  CHECK_THROWS_AS(log_toeplitz_det(v, 11), std::out_of_range);
}

TEST_CASE("kernel_diag_trace basics") {
  TrigPoly h = TrigPoly::from_terms({{0, 0.7}, {1, 0.25}, {-1, 0.25}});
  VerblunskySeq zero = constant_verblunsky(0.0, 64);
  // Lebesgue: K_n(z,z) = n, so the trace is n h_0
  CHECK(std::abs(kernel_diag_trace(zero, h, 12) - Complex(12 * 0.7, 0)) < 1e-12);
  // h = 1 integrates the reproducing kernel to n for any probability measure
  CircleMeasure g = geronimus(0.5);
  CHECK(std::abs(kernel_diag_trace(g, TrigPoly::constant(1.0), 9) - Complex(9, 0)) < 1e-8);
}

TEST_CASE("trace identity against the quadrature kernel oracle") {
  // int h K_n dmu via orthonormal polynomials evaluated on the grid
  CircleMeasure mu = geronimus(0.5);
  TrigPoly h = TrigPoly::from_terms({{1, 1.0}, {-1, 1.0}});
  int n = 16;
  auto c = moments(mu, n + 4);
  std::vector<double> theta, weight;
  mu.quadrature(theta, weight);
  Complex integral{};
  auto add_layer = [&](const std::vector<Complex>& coeffs, double nrm) {
    for (size_t i = 0; i < theta.size(); ++i) {
      Complex z = std::polar(1.0, theta[i]);
      Complex val = eval_poly(coeffs, z);
      integral += h.eval(z) * std::norm(val) / nrm * mu.density(theta[i]) * weight[i];
    }
    for (const auto& a : mu.atoms()) {
      Complex z = std::polar(1.0, a.theta);
      integral += h.eval(z) * std::norm(eval_poly(coeffs, z)) / nrm * a.weight;
    }
  };
  for (int j = 0; j < n; ++j) {
    SzegoResult r = szego_recursion(c, j);
    add_layer(r.state.phi, r.state.norms_sq.back());
  }
  Complex trace = kernel_diag_trace(mu, h, n);
  CHECK(std::abs(trace - integral) < 1e-7);
}

TEST_CASE("log_det_ratio closed cases") {
  CircleMeasure mu = lebesgue();
  TrigPoly zero;
  CHECK(std::abs(log_det_ratio(mu, zero, 6)) < 1e-12);

  TrigPoly c = TrigPoly::constant(0.31);
  CHECK(std::abs(log_det_ratio(mu, c, 7) - Complex(7 * 0.31, 0)) < 1e-10);

  // complex constant goes through the LU branch and still gives n c exactly
  TrigPoly cc = TrigPoly::constant(Complex(0.2, 0.1));
  Complex r = log_det_ratio(mu, cc, 6);
  CHECK(std::abs(r - Complex(1.2, 0.6)) < 1e-10);
}

TEST_CASE("strong szego value through the moment route") {
  CircleMeasure mu = lebesgue();
  double t = 0.4;
  TrigPoly h = TrigPoly::from_terms({{1, t}, {-1, t}});
  int n = 40;
  Complex second_order = log_det_ratio(mu, h, n) - kernel_diag_trace(mu, h, n);
  CHECK(std::abs(second_order - Complex(t * t, 0)) < 2e-3);

  // dense determinant oracle at n = 40
  auto ch = perturbed_moments(mu, h, n - 1);
  CMatrix tm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tm(i, j) = ch[static_cast<size_t>(i - j + n - 1)];
  CHECK(std::abs(lu_log_det(tm).real() - log_det_ratio(mu, h, n).real()) < 1e-8);
}

TEST_CASE("ratio reciprocity") {
  TrigPoly h = TrigPoly::from_terms({{1, 0.25}, {-1, 0.25}, {0, 0.1}});
  for (auto mu : {lebesgue(), geronimus(0.4)}) {
    Complex forward = log_det_ratio(mu, h, 20);
    Complex backward = log_det_ratio(exp_perturb(mu, h), -1.0 * h, 20);
    CHECK(std::abs(forward + backward) < 1e-9);
  }
}

TEST_SUITE_END();
