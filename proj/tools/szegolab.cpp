// szegolab: numerical laboratory for relative Toeplitz determinant
// asymptotics over measures on the unit circle.  Each subcommand sweeps a
// list of truncation sizes n, evaluates Psi_n through independent routes and
// emits a convergence table with the predicted limit.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "szegolab/experiments.hpp"
#include "szegolab/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"szegolab: ratios of Toeplitz determinants on the unit circle"};
  app.get_formatter()->column_width(34);
  app.set_help_flag("--help", "print this help message");  // frees --h for the symbol

  std::string experiment;
  std::string format = "csv";
  std::string out_path;
  int k_max = 32;
  int count = 32;
  szegolab::ExperimentConfig cfg;

  app.add_option("experiment", experiment,
                 "one of: szego, arc_limit, compare, weak, cumulants, right_limit, clt; "
                 "or a data export: moments, verblunsky")
      ->required();
  app.add_option("--kmax", k_max, "moments export: highest moment index");
  app.add_option("--count", count, "verblunsky export: number of coefficients");
  app.add_option("--measure", cfg.measure_spec,
                 "measure spec: lebesgue | geronimus:<re>[,<im>] | fh:<t>,<a>,<b>[;...] | "
                 "perturbed:<base>:<h-file>; any spec may carry +atom:<theta>,<weight>");
  app.add_option("--h", cfg.h_spec,
                 "symbol: const:<a0>;cos:<c1,..>;sin:<s1,..> shorthand or a JSON file");
  app.add_option("--n", cfg.n_list, "comma separated strictly increasing n sweep")
      ->delimiter(',');
  app.add_option("--pad", cfg.pad, "CMV truncation padding (default 64)");
  app.add_option("--tol", cfg.tol, "assert the final abs_error is below this");
  app.add_option("--ratio", cfg.compare_ratio,
                 "compare: assert |delta(n_last)| <= ratio * |delta(n_first)|");
  app.add_option("--seq1", cfg.seq1, "coefficient sequence (compare/right_limit)");
  app.add_option("--seq2", cfg.seq2, "second coefficient sequence (compare)");
  app.add_option("--t", cfg.t_big, "cumulants: evaluation point t");
  app.add_option("--t-small", cfg.t_small, "cumulants: comparison point");
  app.add_option("--m-max", cfg.m_max, "cumulants: partial sum order (<= 6)");
  app.add_option("--t-list", cfg.t_list, "clt: comma separated t grid")->delimiter(',');
  app.add_option("--window", cfg.window, "right_limit: window half-width");
  app.add_option("--f-order", cfg.f_order, "right_limit: highest F_m order (<= 6)");
  app.add_option("--f-trunc", cfg.f_truncation, "right_limit: truncation M for F_m");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary);
      if (!file) {
        std::cerr << "error: cannot open " << out_path << " for writing\n";
        return 2;
      }
      os = &file;
    }

    if (experiment == "moments") {
      auto cm = szegolab::parse_measure_spec(cfg.measure_spec);
      szegolab::moments_to_csv(*os, szegolab::moments(cm.measure, k_max));
      return 0;
    }
    if (experiment == "verblunsky") {
      auto cm = szegolab::parse_measure_spec(cfg.measure_spec);
      szegolab::VerblunskySeq v =
          cm.constant_alpha ? szegolab::constant_verblunsky(*cm.constant_alpha, count)
                            : szegolab::verblunsky_from_measure(cm.measure, count);
      szegolab::verblunsky_to_csv(*os, v);
      return 0;
    }

    cfg.kind = szegolab::experiment_from_name(experiment);
    szegolab::AsymptoticsReport report = szegolab::run_experiment(cfg);
    if (format == "json")
      szegolab::write_json(*os, report);
    else
      szegolab::write_csv(*os, report);

    if (!report.passed) {
      std::cerr << "FAIL: " << report.first_failure << "\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
