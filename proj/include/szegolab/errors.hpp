#pragma once

#include <stdexcept>
#include <string>

namespace szegolab {

/// Sampling grid too small for the requested Fourier degree.
struct DegreeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Quadrature resolution below the safe threshold for the requested moments.
struct ResolutionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Matrix truncation too small for the trusted-corner / stabilization bound.
struct TruncationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An LU pivot collapsed; the symbol is numerically non-sectorial.
struct SingularSymbolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Cumulant order beyond the supported combinatorial range.
struct UnsupportedOrderError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The Szego recursion produced |alpha_j| >= 1 - 1e-12 at index j.  This is
/// never clipped; it signals ill-conditioned or invalid moment input.
class PositivityError : public std::runtime_error {
 public:
  PositivityError(int index, const std::string& what)
      : std::runtime_error(what), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

}  // namespace szegolab
