#include "qpb/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace qpb {
namespace {

using cd = std::complex<double>;
constexpr double kTol = 1e-10;
constexpr double kEigTol = 1e-9;

Eigen::Matrix2cd psd_sqrt(const Eigen::Matrix2cd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
  const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

std::pair<double, double> pair_norm(double a, double b) {
  const double s = a + b;
  return {a / s, b / s};
}

SixProjections from_amplitudes(cd a, cd b) {
  const double r2 = std::sqrt(0.5);
  const cd i(0, 1);
  SixProjections six;
  std::tie(six.plus, six.minus) = pair_norm(std::norm(a), std::norm(b));
  std::tie(six.diagonal, six.antidiagonal) = pair_norm(std::norm(r2 * (a + b)), std::norm(r2 * (a - b)));
  // <R| = (<+| - i<-|)/sqrt2 for |R> = (|+> + i|->)/sqrt2.
  std::tie(six.right, six.left) = pair_norm(std::norm(r2 * (a - i * b)), std::norm(r2 * (a + i * b)));
  return six;
}

}  // namespace

QubitDensity::QubitDensity(const Eigen::Matrix2cd& rho) : rho_(rho) {
  if (!rho_.allFinite()) throw std::invalid_argument("density matrix has non-finite entries");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kTol) throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - 1.0) > kTol) throw std::invalid_argument("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kEigTol)
    throw std::invalid_argument(fmt::format("density matrix has negative eigenvalue {}", es.eigenvalues().minCoeff()));
}

QubitDensity QubitDensity::pure(cd a, cd b) {
  Eigen::Vector2cd v(a, b);
  const double n = v.norm();
  if (!(n > 0.0)) throw std::invalid_argument("zero state vector");
  v /= n;
  return QubitDensity(v * v.adjoint());
}

SixProjections ideal_projections(cd a, cd b) {
  if (!(std::norm(a) + std::norm(b) > 0.0)) throw std::invalid_argument("zero state vector");
  return from_amplitudes(a, b);
}

SixProjections project_six(const ComplexField& field, int l, const BeamGeometry& beam) {
  if (l == 0) throw std::invalid_argument("qubit needs l != 0");
  const cd a = overlap(lg_field(LGSpec{l, 0, beam}, field.grid()), field);
  const cd b = overlap(lg_field(LGSpec{-l, 0, beam}, field.grid()), field);
  if (std::abs(a) < 1e-6 && std::abs(b) < 1e-6)
    throw std::invalid_argument(fmt::format("field is orthogonal to the l=+-{} qubit subspace", l));
  return from_amplitudes(a, b);
}

QubitDensity reconstruct_density(const SixProjections& six) {
  const double sz = six.plus - six.minus;
  const double sx = six.diagonal - six.antidiagonal;
  const double sy = six.right - six.left;
  Eigen::Matrix2cd rho;
  rho << cd(1.0 + sz, 0.0), cd(sx, -sy), cd(sx, sy), cd(1.0 - sz, 0.0);
  rho *= 0.5;
  rho = (0.5 * (rho + rho.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho);
  Eigen::Vector2d ev = es.eigenvalues();
  if (ev.minCoeff() < 0.0) {
    ev = ev.cwiseMax(0.0);
    ev /= ev.sum();
    rho = es.eigenvectors() * ev.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
    rho = (0.5 * (rho + rho.adjoint())).eval();
  }
  return QubitDensity(rho);
}

double fidelity(const QubitDensity& a, const QubitDensity& b) {
  const Eigen::Matrix2cd sa = psd_sqrt(a.matrix());
  Eigen::Matrix2cd m = sa * b.matrix() * sa;
  m = (0.5 * (m + m.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m, Eigen::EigenvaluesOnly);
  const double t = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(t * t, 0.0, 1.0);
}

}  // namespace qpb
