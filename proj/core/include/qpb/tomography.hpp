#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qpb/spatial_modes.hpp"

namespace qpb {

// Pair-normalized outcomes of the three complementary bases of an OAM qubit
// {|+l>, |-l>}: computational, diagonal (|+l> +- |-l>), circular (|+l> +- i|-l>).
struct SixProjections {
  double plus = 0.5, minus = 0.5;
  double diagonal = 0.5, antidiagonal = 0.5;
  double right = 0.5, left = 0.5;
};

class QubitDensity {
 public:
  // Validates Hermiticity, unit trace and positivity.
  explicit QubitDensity(const Eigen::Matrix2cd& rho);

  static QubitDensity pure(std::complex<double> a, std::complex<double> b);

  const Eigen::Matrix2cd& matrix() const { return rho_; }
  std::complex<double> operator()(int i, int j) const { return rho_(i, j); }

 private:
  Eigen::Matrix2cd rho_;
};

SixProjections project_six(const ComplexField& field, int l, const BeamGeometry& beam);
SixProjections ideal_projections(std::complex<double> a, std::complex<double> b);

// Stokes inversion, then eigenvalue clamp and trace renormalization.
QubitDensity reconstruct_density(const SixProjections& six);

double fidelity(const QubitDensity& a, const QubitDensity& b);

}  // namespace qpb
