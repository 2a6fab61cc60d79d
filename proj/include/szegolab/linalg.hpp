#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "szegolab/errors.hpp"
#include "szegolab/trigpoly.hpp"

namespace szegolab {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// log det of a dense complex matrix via LU with partial pivoting.  The
/// imaginary part accumulates the pivot phases in factorization order, so the
/// branch of the logarithm is pinned by the pivot sequence and never jumps.
/// A pivot of modulus below `pivot_floor` signals a numerically singular
/// (non-sectorial) symbol.
inline Complex lu_log_det(const CMatrix& a, double pivot_floor = 1e-13) {
  Eigen::PartialPivLU<CMatrix> lu(a);
  const auto& diag = lu.matrixLU().diagonal();
  double log_abs = 0.0;
  double arg = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    double m = std::abs(diag(i));
    if (m < pivot_floor)
      throw SingularSymbolError("lu_log_det: pivot " + std::to_string(i) +
                                " collapsed below " + std::to_string(pivot_floor));
    log_abs += std::log(m);
    arg += std::arg(diag(i));
  }
  if (lu.permutationP().determinant() < 0) arg += kPi;
  return {log_abs, arg};
}

/// Dense scaling-and-squaring matrix exponential with the fixed degree-13
/// Pade approximant.  Sizes in play stay at desk scale (T <= 512), so plain
/// O(T^3) arithmetic is the whole story.
inline CMatrix expm(const CMatrix& a) {
  static const double b[14] = {64764752532480000.0, 32382376266240000.0,
                               7771770303897600.0,  1187353796428800.0,
                               129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,
                               1323241920.0,        40840800.0,
                               960960.0,            16380.0,
                               182.0,               1.0};
  const double theta13 = 5.371920351148152;
  const Eigen::Index n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);

  double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  CMatrix as = a / std::pow(2.0, squarings);

  CMatrix a2 = as * as;
  CMatrix a4 = a2 * a2;
  CMatrix a6 = a2 * a4;
  CMatrix u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                    b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
              b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  CMatrix f = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) f = f * f;
  return f;
}

}  // namespace szegolab
