#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "szegolab/measure.hpp"
#include "szegolab/opuc.hpp"
#include "szegolab/trigpoly.hpp"
#include "szegolab/trigpoly_json.hpp"

namespace szegolab {

/// A catalog entry: the measure plus, when the catalog knows it analytically,
/// the constant Verblunsky coefficient of the unperturbed family.
struct CatalogMeasure {
  CircleMeasure measure;
  std::optional<Complex> constant_alpha;
  std::string name;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

inline std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split(s, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

}  // namespace detail

/// Measure catalog addressable by CLI name:
///   lebesgue
///   geronimus:<re>[,<im>]
///   fh:<theta>,<alpha>,<beta>[;<theta>,<alpha>,<beta>...]
///   perturbed:<base>:<h-json-file>
/// plus any number of "+atom:<theta>,<weight>" suffixes.
inline CatalogMeasure parse_measure_spec(const std::string& spec_in) {
  std::string spec = spec_in;
  std::vector<Atom> extra_atoms;
  for (size_t pos = spec.rfind("+atom:"); pos != std::string::npos; pos = spec.rfind("+atom:")) {
    auto vals = detail::parse_doubles(spec.substr(pos + 6));
    if (vals.size() != 2)
      throw std::invalid_argument("measure spec: +atom needs <theta>,<weight>");
    extra_atoms.push_back({vals[0], vals[1]});
    spec.erase(pos);
  }

  CatalogMeasure out{lebesgue(), Complex{0.0, 0.0}, spec_in};
  if (spec == "lebesgue") {
    // defaults already in place
  } else if (spec.rfind("geronimus:", 0) == 0) {
    auto vals = detail::parse_doubles(spec.substr(10));
    if (vals.empty() || vals.size() > 2)
      throw std::invalid_argument("measure spec: geronimus:<re>[,<im>]");
    Complex alpha(vals[0], vals.size() > 1 ? vals[1] : 0.0);
    out.measure = geronimus(alpha);
    out.constant_alpha = alpha;
  } else if (spec.rfind("fh:", 0) == 0) {
    std::vector<FhSingularity> sing;
    for (const auto& part : detail::split(spec.substr(3), ';')) {
      auto vals = detail::parse_doubles(part);
      if (vals.size() != 3)
        throw std::invalid_argument("measure spec: fh:<theta>,<alpha>,<beta>[;...]");
      sing.push_back({vals[0], vals[1], vals[2]});
    }
    out.measure = fisher_hartwig(sing);
    out.constant_alpha.reset();
  } else if (spec.rfind("perturbed:", 0) == 0) {
    std::string rest = spec.substr(10);
    size_t cut = rest.rfind(':');
    if (cut == std::string::npos)
      throw std::invalid_argument("measure spec: perturbed:<base>:<h-file>");
    CatalogMeasure base = parse_measure_spec(rest.substr(0, cut));
    TrigPoly h = trigpoly_from_file(rest.substr(cut + 1));
    out.measure = exp_perturb(base.measure, h);
    out.constant_alpha.reset();
  } else {
    throw std::invalid_argument("unknown measure spec: " + spec_in);
  }

  for (const auto& a : extra_atoms) {
    out.measure = with_atom(out.measure, a.theta, a.weight);
    out.constant_alpha.reset();
  }
  return out;
}

/// Symbol shorthand `const:<a0>;cos:<c1,c2,...>;sin:<s1,...>` meaning
/// h = a0 + sum_j c_j cos(j theta) + sum_j s_j sin(j theta); anything else is
/// read as a JSON coefficient file.
inline TrigPoly parse_h_spec(const std::string& spec) {
  if (spec.rfind("const:", 0) != 0 && spec.rfind("cos:", 0) != 0 && spec.rfind("sin:", 0) != 0)
    return trigpoly_from_file(spec);
  std::vector<double> cosc, sinc;
  double a0 = 0.0;
  for (const auto& part : detail::split(spec, ';')) {
    if (part.rfind("const:", 0) == 0) {
      a0 = std::stod(part.substr(6));
    } else if (part.rfind("cos:", 0) == 0) {
      cosc = detail::parse_doubles(part.substr(4));
    } else if (part.rfind("sin:", 0) == 0) {
      sinc = detail::parse_doubles(part.substr(4));
    } else if (!part.empty()) {
      throw std::invalid_argument("bad h spec segment: " + part);
    }
  }
  int deg = static_cast<int>(std::max(cosc.size(), sinc.size()));
  TrigPoly h(deg);
  h.set_coeff(0, a0);
  for (size_t j = 0; j < cosc.size(); ++j) {
    int k = static_cast<int>(j) + 1;
    h.set_coeff(k, h.coeff(k) + 0.5 * cosc[j]);
    h.set_coeff(-k, h.coeff(-k) + 0.5 * cosc[j]);
  }
  for (size_t j = 0; j < sinc.size(); ++j) {
    int k = static_cast<int>(j) + 1;
    h.set_coeff(k, h.coeff(k) + Complex(0.0, -0.5) * sinc[j]);
    h.set_coeff(-k, h.coeff(-k) + Complex(0.0, 0.5) * sinc[j]);
  }
  return h;
}

/// CSV serialization of a coefficient sequence: rows "j,re,im".
inline void verblunsky_to_csv(std::ostream& os, const VerblunskySeq& v) {
  os << "j,re_alpha,im_alpha\n";
  char buf[96];
  for (int j = 0; j < v.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", j, v.alpha(j).real(), v.alpha(j).imag());
    os << buf;
  }
}

inline VerblunskySeq verblunsky_from_csv(std::istream& is) {
  VerblunskySeq v;
  v.mass = 1.0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'j') continue;
    auto cols = detail::split(line, ',');
    if (cols.size() < 3) throw std::invalid_argument("verblunsky csv: need j,re,im columns");
    v.alphas.push_back(Complex(std::stod(cols[1]), std::stod(cols[2])));
  }
  return v;
}

inline VerblunskySeq verblunsky_from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open coefficient file: " + path);
  return verblunsky_from_csv(in);
}

/// Moment vector as CSV columns (k, re c_k, im c_k).
inline void moments_to_csv(std::ostream& os, const std::vector<Complex>& c) {
  os << "k,re_c,im_c\n";
  char buf[96];
  for (size_t k = 0; k < c.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k, c[k].real(), c[k].imag());
    os << buf;
  }
}

/// Verblunsky sequence shorthand for the comparison experiments:
///   const:<re>[,<im>]            alpha_n = alpha
///   shift:<re>,<im>,<c>          alpha_n = alpha + c/(n+2)
///   relax:<re>,<im>              alpha_n = alpha (1 - 1/sqrt(n+4))
///   alt:<re>[,<im>]              alpha_n = alpha (-1)^n
///   file:<path>                  CSV rows j,re,im (repeating the last entry
///                                when the requested length is longer)
inline VerblunskySeq parse_sequence_spec(const std::string& spec, int length) {
  auto make = [length](auto&& f) {
    VerblunskySeq v;
    v.mass = 1.0;
    v.alphas.reserve(static_cast<size_t>(length));
    for (int n = 0; n < length; ++n) v.alphas.push_back(f(n));
    return v;
  };
  if (spec.rfind("const:", 0) == 0) {
    auto vals = detail::parse_doubles(spec.substr(6));
    Complex a(vals.at(0), vals.size() > 1 ? vals[1] : 0.0);
    return make([a](int) { return a; });
  }
  if (spec.rfind("shift:", 0) == 0) {
    auto vals = detail::parse_doubles(spec.substr(6));
    if (vals.size() != 3) throw std::invalid_argument("sequence spec: shift:<re>,<im>,<c>");
    Complex a(vals[0], vals[1]);
    double c = vals[2];
    return make([a, c](int n) { return a + c / (n + 2.0); });
  }
  if (spec.rfind("relax:", 0) == 0) {
    auto vals = detail::parse_doubles(spec.substr(6));
    Complex a(vals.at(0), vals.size() > 1 ? vals[1] : 0.0);
    return make([a](int n) { return a * (1.0 - 1.0 / std::sqrt(n + 4.0)); });
  }
  if (spec.rfind("alt:", 0) == 0) {
    auto vals = detail::parse_doubles(spec.substr(4));
    Complex a(vals.at(0), vals.size() > 1 ? vals[1] : 0.0);
    return make([a](int n) { return n % 2 ? -a : a; });
  }
  if (spec.rfind("file:", 0) == 0) {
    VerblunskySeq file = verblunsky_from_csv_file(spec.substr(5));
    if (file.size() == 0) throw std::invalid_argument("sequence file is empty");
    return make([&file](int n) {
      return file.alpha(std::min(n, file.size() - 1));
    });
  }
  throw std::invalid_argument("unknown sequence spec: " + spec);
}

}  // namespace szegolab
