#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "szegolab/arc.hpp"
#include "szegolab/catalog.hpp"
#include "szegolab/cmv.hpp"
#include "szegolab/ratios.hpp"
#include "szegolab/report.hpp"

namespace szegolab {

enum class Experiment { szego, arc_limit, compare, weak, cumulants, right_limit, clt };

inline Experiment experiment_from_name(const std::string& name) {
  if (name == "szego") return Experiment::szego;
  if (name == "arc_limit") return Experiment::arc_limit;
  if (name == "compare") return Experiment::compare;
  if (name == "weak") return Experiment::weak;
  if (name == "cumulants") return Experiment::cumulants;
  if (name == "right_limit") return Experiment::right_limit;
  if (name == "clt") return Experiment::clt;
  throw std::invalid_argument("unknown experiment: " + name);
}

struct ExperimentConfig {
  Experiment kind = Experiment::szego;
  std::string measure_spec = "lebesgue";
  std::string h_spec = "cos:0.8";
  std::vector<int> n_list = {8, 16, 24, 32, 48, 64, 96, 128};
  int pad = 64;
  double tol = std::numeric_limits<double>::quiet_NaN();
  double compare_ratio = 0.25;
  std::string seq1 = "const:0.5,0";
  std::string seq2 = "shift:0.5,0,0.4";
  double t_big = 0.1;
  double t_small = 0.05;
  int m_max = 4;
  std::vector<double> t_list = {0.25, 0.5, 1.0};
  int window = 8;
  int f_order = 3;
  int f_truncation = 16;
};

namespace detail {

inline void validate_n_list(const std::vector<int>& ns) {
  if (ns.empty()) throw std::invalid_argument("n_list must not be empty");
  for (size_t i = 0; i + 1 < ns.size(); ++i)
    if (ns[i] >= ns[i + 1])
      throw std::invalid_argument("n_list must be strictly increasing");
  if (ns.front() < 1) throw std::invalid_argument("n_list entries must be >= 1");
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Tail-median decay: median of the last 3 errors vs the first 3.  PSI_n
/// oscillates along subsequences for nontrivial right limits, so strict
/// monotonicity is the wrong ask; and once the error bottoms out at roundoff
/// there is no decay left to observe, hence the floor.
inline constexpr double kDecayFloor = 1e-12;

inline void assert_tail_decay(AsymptoticsReport& rep) {
  if (rep.rows.size() < 6) return;
  std::vector<double> head, tail;
  for (size_t i = 0; i < 3; ++i) head.push_back(rep.rows[i].abs_error);
  for (size_t i = rep.rows.size() - 3; i < rep.rows.size(); ++i)
    tail.push_back(rep.rows[i].abs_error);
  double hm = median_of(head), tm = median_of(tail);
  rep.add_meta("head_median_error", fmt10(hm));
  rep.add_meta("tail_median_error", fmt10(tm));
  if (!(tm < hm || tm <= kDecayFloor))
    rep.fail("error tail-median " + fmt10(tm) + " not below head-median " + fmt10(hm));
}

inline void assert_final_tol(AsymptoticsReport& rep, double tol) {
  if (std::isnan(tol) || rep.rows.empty()) return;
  double final_err = rep.rows.back().abs_error;
  if (!(final_err <= tol))
    rep.fail("final abs_error " + fmt10(final_err) + " exceeds tol " + fmt10(tol));
}

/// The determinant-route identity as a standing regression: wherever both
/// routes ran, they must agree to 1e-6.
inline void assert_route_agreement(AsymptoticsReport& rep) {
  for (const auto& row : rep.rows)
    if (!std::isnan(row.route_disagreement) && !(row.route_disagreement <= 1e-6))
      rep.fail("route disagreement " + fmt10(row.route_disagreement) + " at n = " +
               std::to_string(row.n));
}

inline Complex szego_sum(const TrigPoly& h) {
  Complex s{};
  for (int k = 1; k <= h.degree(); ++k)
    s += static_cast<double>(k) * h.coeff(k) * h.coeff(-k);
  return s;
}

/// Fan a per-n computation over a worker pool, assembling in n-order.
template <typename F>
inline std::vector<ReportRow> fan_out(const std::vector<int>& ns, F&& per_n) {
  std::vector<std::future<ReportRow>> futs;
  futs.reserve(ns.size());
  for (int n : ns)
    futs.push_back(std::async(std::launch::async, [n, &per_n] { return per_n(n); }));
  std::vector<ReportRow> rows;
  rows.reserve(ns.size());
  for (auto& f : futs) rows.push_back(f.get());
  return rows;
}

class StopWatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

/// Both determinant routes for Psi_n over a measure, prepared once per
/// experiment and evaluated per n.  The Fredholm side runs on the catalog's
/// exact coefficients when it knows them, else on the stable extraction
/// prefix; the moment side is capped at its own stability horizon.
class PsiRoutes {
 public:
  PsiRoutes(const CatalogMeasure& cm, const TrigPoly& h, int n_max, int pad)
      : h_(h), pad_(pad) {
    int deg = h.effective_degree();
    if (cm.constant_alpha) {
      fred_ = constant_verblunsky(*cm.constant_alpha, n_max + pad + 2);
    } else {
      fred_ = stable_verblunsky(cm.measure, n_max + pad + 2);
    }
    // moment route: determinants through the Verblunsky product formula of
    // base and perturbed measures, trace through the CMV diagonal
    bool real_h = is_real_symbol(h);
    VerblunskySeq base = stable_verblunsky(cm.measure, n_max + 2 * deg + 4);
    int trace_n = std::max(0, base.size() - 2 * deg - 4);
    if (trace_n >= 1) {
      CMatrix c = cmv_corner(base, std::min(base.size(), trace_n + 2 * deg + 4));
      CMatrix hc = h_of_cmv_matrix(c, h);
      trace_partial_.resize(static_cast<size_t>(trace_n) + 1);
      trace_partial_[0] = Complex{};
      for (int j = 0; j < trace_n; ++j) trace_partial_[j + 1] = trace_partial_[j] + hc(j, j);
    }
    if (real_h) {
      VerblunskySeq pert = stable_verblunsky(exp_perturb(cm.measure, h), n_max);
      mom_max_n_ = std::min({base.size(), pert.size(), trace_n});
      base_ = std::move(base);
      pert_ = std::move(pert);
    } else {
      // complex h: numerator determinant via LU of the perturbed moment matrix
      mom_max_n_ = std::min(trace_n, base.size());
      base_ = std::move(base);
      complex_mu_ = cm.measure;
    }
  }

  int fred_max_n() const { return fred_.size() - pad_ - 2; }
  int mom_max_n() const { return mom_max_n_; }

  Complex log_psi_fred(int n) const { return log_psi_fredholm(fred_, h_, n, pad_); }

  Complex log_psi_mom(int n) const {
    Complex trace = trace_partial_[static_cast<size_t>(n)];
    if (pert_) {
      double ratio = log_toeplitz_det(*pert_, n) - log_toeplitz_det(base_, n);
      return Complex{ratio, 0.0} - trace;
    }
    std::vector<Complex> ch = perturbed_moments(*complex_mu_, h_, n - 1);
    CMatrix t(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t(i, j) = ch[static_cast<size_t>(i - j + n - 1)];
    return lu_log_det(t) - Complex{log_toeplitz_det(base_, n), 0.0} - trace;
  }

 private:
  TrigPoly h_;
  int pad_;
  VerblunskySeq fred_;
  VerblunskySeq base_;
  std::optional<VerblunskySeq> pert_;
  std::optional<CircleMeasure> complex_mu_;
  std::vector<Complex> trace_partial_;
  int mom_max_n_ = 0;
};


/// Strong Szego experiment: Psi_n against exp(sum k h_k h_{-k}).
inline AsymptoticsReport run_szego(const ExperimentConfig& cfg) {
  detail::StopWatch watch;
  detail::validate_n_list(cfg.n_list);
  CatalogMeasure cm = parse_measure_spec(cfg.measure_spec);
  TrigPoly h = parse_h_spec(cfg.h_spec);
  if (cfg.pad < pad_min(h))
    throw TruncationError("pad " + std::to_string(cfg.pad) + " below pad_min " +
                          std::to_string(pad_min(h)));
  Complex predicted = std::exp(detail::szego_sum(h));

  PsiRoutes routes(cm, h, cfg.n_list.back(), cfg.pad);
  auto rows = detail::fan_out(cfg.n_list, [&](int n) {
    ReportRow row;
    row.n = n;
    bool has_fred = n <= routes.fred_max_n();
    bool has_mom = n <= routes.mom_max_n();
    Complex fred{}, mom{};
    if (has_fred) fred = std::exp(routes.log_psi_fred(n));
    if (has_mom) mom = std::exp(routes.log_psi_mom(n));
    if (!has_fred && !has_mom)
      throw PositivityError(n, "no determinant route reachable at n = " + std::to_string(n));
    row.psi = has_fred ? fred : mom;
    row.predicted = predicted;
    row.abs_error = std::abs(row.psi - predicted);
    if (has_fred && has_mom) row.route_disagreement = std::abs(fred - mom);
    return row;
  });

  AsymptoticsReport rep;
  rep.rows = std::move(rows);
  rep.add_meta("experiment", "szego");
  rep.add_meta("measure", cfg.measure_spec);
  rep.add_meta("h", cfg.h_spec);
  rep.add_meta("szego_sum", detail::fmt10(detail::szego_sum(h).real()));
  rep.add_meta("predicted", detail::fmt10(predicted.real()));
  detail::assert_tail_decay(rep);
  detail::assert_final_tol(rep, cfg.tol);
  detail::assert_route_agreement(rep);
  rep.add_meta("wall_time_s", detail::fmt10(watch.seconds()));
  return rep;
}

/// Arc generalization: constant-alpha Psi_n against exp(Q_alpha(h)), with the
/// commutator-trace route reported alongside.
inline AsymptoticsReport run_arc_limit(const ExperimentConfig& cfg) {
  detail::StopWatch watch;
  detail::validate_n_list(cfg.n_list);
  CatalogMeasure cm = parse_measure_spec(cfg.measure_spec);
  if (!cm.constant_alpha)
    throw std::domain_error("arc_limit needs a constant-alpha measure spec");
  TrigPoly h = parse_h_spec(cfg.h_spec);
  if (cfg.pad < pad_min(h))
    throw TruncationError("pad below pad_min for this h");
  ArcGeometry geom(*cm.constant_alpha);
  Complex q = q_alpha(geom, h);
  Complex predicted = std::exp(q);

  PsiRoutes routes(cm, h, cfg.n_list.back(), cfg.pad);
  auto rows = detail::fan_out(cfg.n_list, [&](int n) {
    ReportRow row;
    row.n = n;
    Complex fred = std::exp(routes.log_psi_fred(n));
    row.psi = fred;
    row.predicted = predicted;
    row.abs_error = std::abs(fred - predicted);
    if (n <= routes.mom_max_n())
      row.route_disagreement = std::abs(fred - std::exp(routes.log_psi_mom(n)));
    return row;
  });

  AsymptoticsReport rep;
  rep.rows = std::move(rows);
  rep.add_meta("experiment", "arc_limit");
  rep.add_meta("measure", cfg.measure_spec);
  rep.add_meta("h", cfg.h_spec);
  rep.add_meta("q_alpha", detail::fmt10(q.real()));
  rep.add_meta("predicted", detail::fmt10(predicted.real()));

  // dual Q routes plus the half-commutator value
  AbSymbols sampled = ab_symbols_sampled(geom, h);
  Complex q_sampled{};
  for (int j = 1; j <= std::max(sampled.a.degree(), sampled.b.degree()); ++j)
    q_sampled += static_cast<double>(j) * (sampled.a.coeff(j) * sampled.a.coeff(-j) +
                                           sampled.b.coeff(j) * sampled.b.coeff(-j));
  rep.add_meta("q_alpha_sampled_route", detail::fmt10(q_sampled.real()));
  if (!(std::abs(q - q_sampled) <= 1e-10))
    rep.fail("Q_alpha routes disagree: " + detail::fmt10(std::abs(q - q_sampled)));
  if (geom.abs_alpha >= 1e-8) {
    CommutatorTrace tc = trace_commutator(geom, h, 128);
    rep.add_meta("half_commutator_trace", detail::fmt10(0.5 * tc.numerical.real()));
    if (!(std::abs(0.5 * tc.numerical - q) <= 1e-5))
      rep.fail("half commutator trace disagrees with Q_alpha by " +
               detail::fmt10(std::abs(0.5 * tc.numerical - q)));
  }
  detail::assert_tail_decay(rep);
  detail::assert_final_tol(rep, cfg.tol);
  detail::assert_route_agreement(rep);
  rep.add_meta("wall_time_s", detail::fmt10(watch.seconds()));
  return rep;
}

/// Comparison principle: |Psi_n(seq1) - Psi_n(seq2)| decay for two coefficient
/// sequences with the same right limit.
inline AsymptoticsReport run_compare(const ExperimentConfig& cfg) {
  detail::StopWatch watch;
  detail::validate_n_list(cfg.n_list);
  TrigPoly h = parse_h_spec(cfg.h_spec);
  if (cfg.pad < pad_min(h)) throw TruncationError("pad below pad_min for this h");
  int len = cfg.n_list.back() + cfg.pad + 2;
  VerblunskySeq v1 = parse_sequence_spec(cfg.seq1, len);
  VerblunskySeq v2 = parse_sequence_spec(cfg.seq2, len);

  auto rows = detail::fan_out(cfg.n_list, [&](int n) {
    ReportRow row;
    row.n = n;
    row.psi = psi_fredholm(v1, h, n, cfg.pad);
    row.predicted = psi_fredholm(v2, h, n, cfg.pad);
    row.abs_error = std::abs(row.psi - row.predicted);
    return row;
  });

  AsymptoticsReport rep;
  rep.rows = std::move(rows);
  rep.add_meta("experiment", "compare");
  rep.add_meta("seq1", cfg.seq1);
  rep.add_meta("seq2", cfg.seq2);
  rep.add_meta("h", cfg.h_spec);
  double first = rep.rows.front().abs_error;
  double last = rep.rows.back().abs_error;
  rep.add_meta("delta_first", detail::fmt10(first));
  rep.add_meta("delta_last", detail::fmt10(last));
  if (!(last <= cfg.compare_ratio * first))
    rep.fail("comparison decay violated: " + detail::fmt10(last) + " > " +
             detail::fmt10(cfg.compare_ratio) + " * " + detail::fmt10(first));
  rep.add_meta("wall_time_s", detail::fmt10(watch.seconds()));
  return rep;
}

/// First-order (weak) asymptotics: |Psi_n^{1/n} - 1| -> 0 for sectorial e^h.
inline AsymptoticsReport run_weak(const ExperimentConfig& cfg) {
  detail::StopWatch watch;
  detail::validate_n_list(cfg.n_list);
  CatalogMeasure cm = parse_measure_spec(cfg.measure_spec);
  TrigPoly h = parse_h_spec(cfg.h_spec);
  if (cfg.pad < pad_min(h)) throw TruncationError("pad below pad_min for this h");
  if (!is_real_symbol(h)) {
    // continuous e^h is sectorial iff the range of Im h fits in a pi window
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    int grid = std::max(256, sampling_grid_size(h.degree()));
    for (int m = 0; m < grid; ++m) {
      double im = h.eval_angle(2.0 * kPi * m / grid).imag();
      lo = std::min(lo, im);
      hi = std::max(hi, im);
    }
    if (!(hi - lo < kPi))
      throw std::domain_error("weak: e^h is not sectorial (Im h spans >= pi)");
  }

  PsiRoutes routes(cm, h, cfg.n_list.back(), cfg.pad);
  auto rows = detail::fan_out(cfg.n_list, [&](int n) {
    ReportRow row;
    row.n = n;
    bool has_fred = n <= routes.fred_max_n();
    bool has_mom = n <= routes.mom_max_n();
    Complex lp;
    if (has_fred) lp = routes.log_psi_fred(n);
    else if (has_mom) lp = routes.log_psi_mom(n);
    else throw PositivityError(n, "no route reachable at n = " + std::to_string(n));
    row.psi = std::exp(lp / static_cast<double>(n));
    row.predicted = 1.0;
    row.abs_error = std::abs(row.psi - 1.0);
    if (has_fred && has_mom)
      row.route_disagreement = std::abs(std::exp(routes.log_psi_fred(n)) -
                                        std::exp(routes.log_psi_mom(n)));
    return row;
  });

  AsymptoticsReport rep;
  rep.rows = std::move(rows);
  rep.add_meta("experiment", "weak");
  rep.add_meta("measure", cfg.measure_spec);
  rep.add_meta("h", cfg.h_spec);
  detail::assert_tail_decay(rep);
  detail::assert_final_tol(rep, cfg.tol);
  detail::assert_route_agreement(rep);
  rep.add_meta("wall_time_s", detail::fmt10(watch.seconds()));
  return rep;
}

/// Cumulant table: remainder of the order-(m_max) partial sum of
/// Phi_n(t) = sum t^{m+1} E_m^{(n)} at t and t/2.
inline AsymptoticsReport run_cumulants(const ExperimentConfig& cfg) {
  detail::StopWatch watch;
  detail::validate_n_list(cfg.n_list);
  CatalogMeasure cm = parse_measure_spec(cfg.measure_spec);
  TrigPoly h = parse_h_spec(cfg.h_spec);
  int n_max = cfg.n_list.back();
  int deg = h.effective_degree();
  int reach = n_max + std::max(14 * deg + 8, cfg.pad + 2);
  VerblunskySeq v = cm.constant_alpha ? constant_verblunsky(*cm.constant_alpha, reach)
                                      : stable_verblunsky(cm.measure, reach);

  auto remainder = [&](int n, double t) {
    Complex phi = log_psi_fredholm(v, t * h, n, cfg.pad);
    Complex partial{};
    for (int m = 1; m <= cfg.m_max; ++m)
      partial += std::pow(t, m + 1) * cumulant_E(v, h, n, m);
    return std::abs(phi - partial);
  };

  auto rows = detail::fan_out(cfg.n_list, [&](int n) {
    ReportRow row;
    row.n = n;
    Complex phi = log_psi_fredholm(v, cfg.t_big * h, n, cfg.pad);
    Complex partial{};
    for (int m = 1; m <= cfg.m_max; ++m)
      partial += std::pow(cfg.t_big, m + 1) * cumulant_E(v, h, n, m);
    row.psi = std::exp(phi);
    row.predicted = std::exp(partial);
    row.abs_error = std::abs(phi - partial);
    return row;
  });

  AsymptoticsReport rep;
  rep.rows = std::move(rows);
  rep.add_meta("experiment", "cumulants");
  rep.add_meta("measure", cfg.measure_spec);
  rep.add_meta("h", cfg.h_spec);
  rep.add_meta("t", detail::fmt10(cfg.t_big));
  double r_big = remainder(n_max, cfg.t_big);
  double r_small = remainder(n_max, cfg.t_small);
  rep.add_meta("remainder_t", detail::fmt10(r_big));
  rep.add_meta("remainder_t_small", detail::fmt10(r_small));
  rep.add_meta("remainder_ratio", detail::fmt10(r_big / r_small));
  double bound = std::isnan(cfg.tol) ? 1e-6 : cfg.tol;
  if (!(r_big <= bound))
    rep.fail("cumulant partial sum misses Phi_n by " + detail::fmt10(r_big));
  rep.add_meta("wall_time_s", detail::fmt10(watch.seconds()));
  return rep;
}

/// Right-limit extraction and the truncated F_m functionals: stabilization
/// under doubling plus agreement with the finite-n cumulants.  Rows are
/// indexed by the order m.
inline AsymptoticsReport run_right_limit(const ExperimentConfig& cfg) {
  detail::StopWatch watch;
  detail::validate_n_list(cfg.n_list);
  TrigPoly h = parse_h_spec(cfg.h_spec);
  int n_last = cfg.n_list.back();
  int window = std::max(cfg.window, 2 * cfg.f_truncation);
  VerblunskySeq v = parse_sequence_spec(cfg.seq1, n_last + 16 * std::max(1, h.effective_degree()) + window + 8);
  RightLimit rl = right_limit(v, cfg.n_list, window);

  AsymptoticsReport rep;
  rep.add_meta("experiment", "right_limit");
  rep.add_meta("seq", cfg.seq1);
  rep.add_meta("h", cfg.h_spec);
  rep.add_meta("window", std::to_string(window));
  rep.add_meta("max_residual", detail::fmt10(rl.max_residual()));
  for (int m = 1; m <= cfg.f_order; ++m) {
    ReportRow row;
    row.n = m;
    Complex fa = f_m_truncated(rl, h, m, cfg.f_truncation);
    Complex fb = f_m_truncated(rl, h, m, 2 * cfg.f_truncation);
    Complex em = cumulant_E(v, h, n_last, m);
    row.psi = fa;
    row.predicted = fb;
    row.abs_error = std::abs(fa - fb);
    row.route_disagreement = std::abs(fb - em);
    rep.rows.push_back(row);
    if (!(row.abs_error <= 1e-12))
      rep.fail("F_" + std::to_string(m) + " not stable under doubling: " +
               detail::fmt10(row.abs_error));
    if (!(row.route_disagreement <= 1e-6))
      rep.fail("F_" + std::to_string(m) + " vs E_m^{(n)} disagreement " +
               detail::fmt10(row.route_disagreement));
  }
  rep.add_meta("wall_time_s", detail::fmt10(watch.seconds()));
  return rep;
}

/// Central-limit check: Psi_n(i t f) against exp(-t^2 Q_alpha(f)), the exact
/// characteristic function route (no sampling).  Rows are indexed by t.
inline AsymptoticsReport run_clt(const ExperimentConfig& cfg) {
  detail::StopWatch watch;
  detail::validate_n_list(cfg.n_list);
  CatalogMeasure cm = parse_measure_spec(cfg.measure_spec);
  if (!cm.constant_alpha)
    throw std::domain_error("clt needs a constant-alpha measure spec for Q_alpha");
  TrigPoly f = parse_h_spec(cfg.h_spec);
  if (!is_real_symbol(f)) throw std::domain_error("clt: f must be real-valued");
  ArcGeometry geom(*cm.constant_alpha);
  double q = q_alpha(geom, f).real();
  int n = cfg.n_list.back();
  VerblunskySeq v = constant_verblunsky(*cm.constant_alpha, n + cfg.pad + 2);

  AsymptoticsReport rep;
  rep.add_meta("experiment", "clt");
  rep.add_meta("measure", cfg.measure_spec);
  rep.add_meta("f", cfg.h_spec);
  rep.add_meta("q_alpha", detail::fmt10(q));
  rep.add_meta("n", std::to_string(n));
  for (double t : cfg.t_list) {
    ReportRow row;
    row.n = n;
    TrigPoly itf = Complex(0.0, t) * f;
    row.psi = psi_fredholm(v, itf, n, cfg.pad);
    row.predicted = std::exp(-t * t * q);
    row.abs_error = std::abs(row.psi - row.predicted);
    rep.rows.push_back(row);
  }
  detail::assert_final_tol(rep, cfg.tol);
  rep.add_meta("wall_time_s", detail::fmt10(watch.seconds()));
  return rep;
}

inline AsymptoticsReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case Experiment::szego: return run_szego(cfg);
    case Experiment::arc_limit: return run_arc_limit(cfg);
    case Experiment::compare: return run_compare(cfg);
    case Experiment::weak: return run_weak(cfg);
    case Experiment::cumulants: return run_cumulants(cfg);
    case Experiment::right_limit: return run_right_limit(cfg);
    case Experiment::clt: return run_clt(cfg);
  }
  throw std::logic_error("unreachable");
}

}  // namespace szegolab
