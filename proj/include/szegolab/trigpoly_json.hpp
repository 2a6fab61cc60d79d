#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "szegolab/trigpoly.hpp"

namespace szegolab {

/// JSON schema of the CLI config loader:
/// {"k_min": int, "coeffs": [[re, im], ...]} with consecutive indices from k_min.
inline nlohmann::json trigpoly_to_json(const TrigPoly& h) {
  nlohmann::json j;
  j["k_min"] = -h.degree();
  auto& coeffs = j["coeffs"] = nlohmann::json::array();
  for (int k = -h.degree(); k <= h.degree(); ++k)
    coeffs.push_back({h.coeff(k).real(), h.coeff(k).imag()});
  return j;
}

inline TrigPoly trigpoly_from_json(const nlohmann::json& j) {
  int k_min = j.at("k_min").get<int>();
  const auto& coeffs = j.at("coeffs");
  int k_max = k_min + static_cast<int>(coeffs.size()) - 1;
  int degree = std::max(std::abs(k_min), std::abs(k_max));
  TrigPoly h(degree);
  int k = k_min;
  for (const auto& c : coeffs) {
    h.set_coeff(k, Complex(c.at(0).get<double>(), c.at(1).get<double>()));
    ++k;
  }
  return h;
}

inline TrigPoly trigpoly_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open symbol file: " + path);
  nlohmann::json j;
  in >> j;
  return trigpoly_from_json(j);
}

}  // namespace szegolab
