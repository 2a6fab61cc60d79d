#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "szegolab/trigpoly.hpp"

namespace szegolab {

/// One convergence-table row.  route_disagreement is NaN on rows where only
/// one of the two determinant routes was numerically reachable.
struct ReportRow {
  int n = 0;
  Complex psi{};
  Complex predicted{};
  double abs_error = 0.0;
  double route_disagreement = std::nan("");
};

struct AsymptoticsReport {
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
  bool passed = true;
  std::string first_failure;

  void add_meta(std::string key, std::string value) {
    metadata.emplace_back(std::move(key), std::move(value));
  }
  void fail(const std::string& why) {
    if (passed) first_failure = why;
    passed = false;
  }
};

namespace detail {

inline std::string fmt10(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace detail

/// Fixed CSV schema: '#' metadata lines, a header row, then one row per n
/// with 10 significant digits, comma separator, LF line endings.  Wall-clock
/// metadata is omitted so that identical configs produce bit-identical files.
inline void write_csv(std::ostream& os, const AsymptoticsReport& r) {
  for (const auto& [k, v] : r.metadata)
    if (k.rfind("wall_time", 0) != 0) os << "# " << k << ": " << v << "\n";
  os << "n,psi_re,psi_im,predicted_re,predicted_im,abs_error,route_disagreement\n";
  for (const auto& row : r.rows) {
    os << row.n << ',' << detail::fmt10(row.psi.real()) << ',' << detail::fmt10(row.psi.imag())
       << ',' << detail::fmt10(row.predicted.real()) << ',' << detail::fmt10(row.predicted.imag())
       << ',' << detail::fmt10(row.abs_error) << ',' << detail::fmt10(row.route_disagreement)
       << "\n";
  }
}

inline void write_json(std::ostream& os, const AsymptoticsReport& r) {
  os << "{\n  \"metadata\": {";
  bool first = true;
  for (const auto& [k, v] : r.metadata) {
    os << (first ? "" : ",") << "\n    \"" << k << "\": \"" << v << "\"";
    first = false;
  }
  os << "\n  },\n  \"passed\": " << (r.passed ? "true" : "false");
  if (!r.passed) os << ",\n  \"first_failure\": \"" << r.first_failure << "\"";
  os << ",\n  \"rows\": [";
  first = true;
  for (const auto& row : r.rows) {
    os << (first ? "" : ",") << "\n    {\"n\": " << row.n
       << ", \"psi_re\": " << detail::fmt10(row.psi.real())
       << ", \"psi_im\": " << detail::fmt10(row.psi.imag())
       << ", \"predicted_re\": " << detail::fmt10(row.predicted.real())
       << ", \"predicted_im\": " << detail::fmt10(row.predicted.imag())
       << ", \"abs_error\": " << detail::fmt10(row.abs_error)
       << ", \"route_disagreement\": " << (std::isnan(row.route_disagreement)
                                               ? std::string("null")
                                               : detail::fmt10(row.route_disagreement))
       << "}";
    first = false;
  }
  os << "\n  ]\n}\n";
}

}  // namespace szegolab
