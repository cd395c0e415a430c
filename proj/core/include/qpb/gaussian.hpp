#pragma once

#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

namespace qpb {

// Quadratures X = (a + a^dagger)/2, P = (a - a^dagger)/(2i); [X, P] = i/2.
// Covariance convention: vacuum has cov = I/2.

struct Vacuum {};
struct Thermal {
  double mean_photons = 0.0;
};
struct Coherent {
  double amplitude = 0.0;  // alpha >= 0
  double phase = 0.0;      // displacement angle in [0, 2pi)
};
struct SqueezedVacuum {
  double squeezing = 0.0;  // r >= 0
  double angle = 0.0;      // theta in [0, 2pi)
};
struct DisplacedSqueezed {
  double amplitude = 0.0;
  double phase = 0.0;
  double squeezing = 0.0;
  double angle = 0.0;
};

using StateParams = std::variant<Vacuum, Thermal, Coherent, SqueezedVacuum, DisplacedSqueezed>;

void validate(const StateParams& params);
std::string_view family_name(const StateParams& params);
std::string describe(const StateParams& params);

// Photons carried by the displacement (alpha^2) and by the squeezing (sinh^2 r).
double displacement_photons(const StateParams& params);
double squeezing_photons(const StateParams& params);

enum class Mode { A, B };
enum class PhaseTarget { A, B, Both };

class SymplecticTransform;

class GaussianState {
 public:
  // Validates dimensions, symmetry and the uncertainty principle.
  GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  static GaussianState vacuum(int modes = 1);

  int modes() const { return static_cast<int>(mean_.size() / 2); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }

  // Symplectic eigenvalues of 2*cov, ascending. Vacuum gives all ones.
  Eigen::VectorXd symplectic_eigenvalues() const;

 private:
  struct Unchecked {};
  GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov, Unchecked);

  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;

  friend GaussianState apply(const SymplecticTransform&, const GaussianState&);
  friend GaussianState tensor(const GaussianState&, const GaussianState&);
  friend GaussianState attenuate(const GaussianState&, double);
  friend GaussianState reduce_mode(const GaussianState&, Mode);
};

class SymplecticTransform {
 public:
  // Validates S Omega S^T = Omega (tolerance scaled by |S|^2).
  SymplecticTransform(Eigen::MatrixXd matrix, std::string label);

  static SymplecticTransform identity(int modes);

  int modes() const { return static_cast<int>(matrix_.rows() / 2); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const std::string& label() const { return label_; }

 private:
  Eigen::MatrixXd matrix_;
  std::string label_;
};

Eigen::MatrixXd symplectic_form(int modes);
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& cov);

GaussianState make_single_mode(const StateParams& params);
GaussianState tensor(const GaussianState& a, const GaussianState& b);

SymplecticTransform beamsplitter(double transmittivity);
SymplecticTransform two_mode_squeezer(double gain, double angle);
SymplecticTransform phase_shift(PhaseTarget which, double phi);

GaussianState apply(const SymplecticTransform& s, const GaussianState& state);
SymplecticTransform compose(const SymplecticTransform& s2, const SymplecticTransform& s1);

GaussianState reduce_mode(const GaussianState& state, Mode keep);
GaussianState attenuate(const GaussianState& state, double eta);

double wigner_gaussian(const GaussianState& state, const Eigen::VectorXd& point);
double wigner_fock(int n, double x, double p);
double parity_expectation(const GaussianState& state);

}  // namespace qpb
