#include "qpb/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "qpb/constants.hpp"

namespace qpb {
namespace {

constexpr double kStructTol = 1e-10;
constexpr double kUncertaintyTol = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_angle(double v, const char* what) {
  if (!(v >= 0.0 && v < kTwoPi)) throw std::invalid_argument(fmt::format("{} must lie in [0, 2pi), got {}", what, v));
}
void require_nonneg(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(fmt::format("{} must be >= 0, got {}", what, v));
}

Eigen::Matrix2d rotation(double phi) {
  Eigen::Matrix2d r;
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return r;
}

Eigen::Matrix2d squeezed_cov(double r, double theta) {
  const double c = std::cosh(2.0 * r), s = std::sinh(2.0 * r);
  Eigen::Matrix2d g;
  g << c - std::cos(theta) * s, -std::sin(theta) * s, -std::sin(theta) * s, c + std::cos(theta) * s;
  return 0.5 * g;
}

Eigen::Vector2d displacement(double alpha, double phi) { return {alpha * std::cos(phi), alpha * std::sin(phi)}; }

}  // namespace

void validate(const StateParams& params) {
  std::visit(overloaded{
                 [](const Vacuum&) {},
                 [](const Thermal& t) { require_nonneg(t.mean_photons, "thermal mean photon number"); },
                 [](const Coherent& c) {
                   require_nonneg(c.amplitude, "coherent amplitude");
                   require_angle(c.phase, "displacement angle");
                 },
                 [](const SqueezedVacuum& s) {
                   require_nonneg(s.squeezing, "squeezing parameter");
                   require_angle(s.angle, "squeezing angle");
                 },
                 [](const DisplacedSqueezed& d) {
                   require_nonneg(d.amplitude, "displacement amplitude");
                   require_angle(d.phase, "displacement angle");
                   require_nonneg(d.squeezing, "squeezing parameter");
                   require_angle(d.angle, "squeezing angle");
                 },
             },
             params);
}

std::string_view family_name(const StateParams& params) {
  static constexpr std::string_view names[] = {"vacuum", "thermal", "coherent", "squeezed_vacuum", "displaced_squeezed"};
  return names[params.index()];
}

std::string describe(const StateParams& params) {
  return std::visit(overloaded{
                        [](const Vacuum&) { return std::string("vacuum"); },
                        [](const Thermal& t) { return fmt::format("thermal(nbar={})", t.mean_photons); },
                        [](const Coherent& c) { return fmt::format("coherent(alpha={}, phi={})", c.amplitude, c.phase); },
                        [](const SqueezedVacuum& s) { return fmt::format("sv(r={}, theta={})", s.squeezing, s.angle); },
                        [](const DisplacedSqueezed& d) {
                          return fmt::format("dsv(alpha={}, phi={}, r={}, theta={})", d.amplitude, d.phase, d.squeezing,
                                             d.angle);
                        },
                    },
                    params);
}

double displacement_photons(const StateParams& params) {
  if (auto* c = std::get_if<Coherent>(&params)) return c->amplitude * c->amplitude;
  if (auto* d = std::get_if<DisplacedSqueezed>(&params)) return d->amplitude * d->amplitude;
  return 0.0;
}

double squeezing_photons(const StateParams& params) {
  if (auto* s = std::get_if<SqueezedVacuum>(&params)) return std::pow(std::sinh(s->squeezing), 2);
  if (auto* d = std::get_if<DisplacedSqueezed>(&params)) return std::pow(std::sinh(d->squeezing), 2);
  return 0.0;
}

Eigen::MatrixXd symplectic_form(int modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& cov) {
  const int n = static_cast<int>(cov.rows() / 2);
  Eigen::MatrixXd m = symplectic_form(n) * (2.0 * cov);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  std::vector<double> nu(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < 2 * n; ++i) nu[static_cast<std::size_t>(i)] = std::abs(es.eigenvalues()[i].imag());
  std::sort(nu.begin(), nu.end());
  Eigen::VectorXd out(n);
  for (int k = 0; k < n; ++k) out[k] = 0.5 * (nu[static_cast<std::size_t>(2 * k)] + nu[static_cast<std::size_t>(2 * k + 1)]);
  return out;
}

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov, Unchecked)
    : mean_(std::move(mean)), cov_(std::move(cov)) {}

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() == 0 || mean_.size() % 2 != 0)
    throw std::invalid_argument(fmt::format("mean length {} is not 2N", mean_.size()));
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size())
    throw std::invalid_argument(fmt::format("covariance is {}x{}, expected {}x{}", cov_.rows(), cov_.cols(), mean_.size(),
                                            mean_.size()));
  if (!mean_.allFinite() || !cov_.allFinite()) throw std::invalid_argument("non-finite mean or covariance");
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kStructTol * scale)
    throw std::invalid_argument("covariance is not symmetric");
  const double nu_min = qpb::symplectic_eigenvalues(cov_).minCoeff();
  if (nu_min < 1.0 - kUncertaintyTol)
    throw std::invalid_argument(fmt::format("covariance violates the uncertainty principle (min symplectic eigenvalue {})", nu_min));
}

GaussianState GaussianState::vacuum(int modes) {
  if (modes < 1) throw std::invalid_argument("modes must be >= 1");
  return GaussianState(Eigen::VectorXd::Zero(2 * modes), 0.5 * Eigen::MatrixXd::Identity(2 * modes, 2 * modes), Unchecked{});
}

Eigen::VectorXd GaussianState::symplectic_eigenvalues() const { return qpb::symplectic_eigenvalues(cov_); }

SymplecticTransform::SymplecticTransform(Eigen::MatrixXd matrix, std::string label)
    : matrix_(std::move(matrix)), label_(std::move(label)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0 || matrix_.rows() % 2 != 0)
    throw std::invalid_argument(fmt::format("symplectic matrix must be 2N x 2N, got {}x{}", matrix_.rows(), matrix_.cols()));
  if (!matrix_.allFinite()) throw std::invalid_argument("symplectic matrix has non-finite entries");
  const Eigen::MatrixXd omega = symplectic_form(modes());
  const double scale = std::max(1.0, matrix_.squaredNorm());
  const double err = (matrix_ * omega * matrix_.transpose() - omega).cwiseAbs().maxCoeff();
  if (err > kStructTol * scale)
    throw std::invalid_argument(fmt::format("matrix '{}' is not symplectic (|S W S^T - W| = {})", label_, err));
}

SymplecticTransform SymplecticTransform::identity(int modes) {
  return SymplecticTransform(Eigen::MatrixXd::Identity(2 * modes, 2 * modes), "identity");
}

GaussianState make_single_mode(const StateParams& params) {
  validate(params);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = 0.5 * Eigen::Matrix2d::Identity();
  std::visit(overloaded{
                 [](const Vacuum&) {},
                 [&](const Thermal& t) { cov = (t.mean_photons + 0.5) * Eigen::Matrix2d::Identity(); },
                 [&](const Coherent& c) { mean = displacement(c.amplitude, c.phase); },
                 [&](const SqueezedVacuum& s) { cov = squeezed_cov(s.squeezing, s.angle); },
                 [&](const DisplacedSqueezed& d) {
                   mean = displacement(d.amplitude, d.phase);
                   cov = squeezed_cov(d.squeezing, d.angle);
                 },
             },
             params);
  return GaussianState(mean, cov);
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
  const auto na = a.mean().size(), nb = b.mean().size();
  Eigen::VectorXd mean(na + nb);
  mean << a.mean(), b.mean();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(na + nb, na + nb);
  cov.topLeftCorner(na, na) = a.cov();
  cov.bottomRightCorner(nb, nb) = b.cov();
  return GaussianState(std::move(mean), std::move(cov), GaussianState::Unchecked{});
}

SymplecticTransform beamsplitter(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument(fmt::format("transmittivity must lie in [0, 1], got {}", t));
  const double a = std::sqrt(t), b = std::sqrt(1.0 - t);
  Eigen::Matrix2d bs;
  bs << a, b, b, -a;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = bs(i, j) * Eigen::Matrix2d::Identity();
  return SymplecticTransform(std::move(m), fmt::format("BS(T={})", t));
}

SymplecticTransform two_mode_squeezer(double g, double psi) {
  if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument(fmt::format("gain must be >= 0, got {}", g));
  const double c = std::cosh(g), s = std::sinh(g), cp = std::cos(psi) * s, sp = std::sin(psi) * s;
  Eigen::MatrixXd m(4, 4);
  m << c, 0, cp, sp,
       0, c, sp, -cp,
       cp, sp, c, 0,
       sp, -cp, 0, c;
  return SymplecticTransform(std::move(m), fmt::format("TMS(g={}, psi={})", g, psi));
}

SymplecticTransform phase_shift(PhaseTarget which, double phi) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
  if (which == PhaseTarget::A || which == PhaseTarget::Both) m.block<2, 2>(0, 0) = rotation(phi);
  if (which == PhaseTarget::B || which == PhaseTarget::Both) m.block<2, 2>(2, 2) = rotation(phi);
  static constexpr const char* names[] = {"A", "B", "AB"};
  return SymplecticTransform(std::move(m), fmt::format("PS_{}(phi={})", names[static_cast<int>(which)], phi));
}

GaussianState apply(const SymplecticTransform& s, const GaussianState& state) {
  if (s.matrix().rows() != state.mean().size())
    throw std::invalid_argument(fmt::format("transform '{}' acts on {} modes, state has {}", s.label(), s.modes(), state.modes()));
  Eigen::MatrixXd cov = s.matrix() * state.cov() * s.matrix().transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  return GaussianState(s.matrix() * state.mean(), std::move(cov), GaussianState::Unchecked{});
}

SymplecticTransform compose(const SymplecticTransform& s2, const SymplecticTransform& s1) {
  if (s2.matrix().rows() != s1.matrix().rows())
    throw std::invalid_argument(fmt::format("cannot compose '{}' with '{}': dimension mismatch", s2.label(), s1.label()));
  return SymplecticTransform(s2.matrix() * s1.matrix(), s2.label() + " * " + s1.label());
}

GaussianState reduce_mode(const GaussianState& state, Mode keep) {
  if (state.modes() != 2) throw std::invalid_argument(fmt::format("reduce_mode needs a two-mode state, got {}", state.modes()));
  const int o = keep == Mode::A ? 0 : 2;
  return GaussianState(state.mean().segment<2>(o), state.cov().block<2, 2>(o, o), GaussianState::Unchecked{});
}

GaussianState attenuate(const GaussianState& state, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument(fmt::format("transmissivity must lie in [0, 1], got {}", eta));
  if (state.modes() != 1) throw std::invalid_argument("attenuate expects a single-mode state");
  Eigen::MatrixXd cov = eta * state.cov() + (1.0 - eta) * 0.5 * Eigen::MatrixXd::Identity(2, 2);
  return GaussianState(std::sqrt(eta) * state.mean(), std::move(cov), GaussianState::Unchecked{});
}

double wigner_gaussian(const GaussianState& state, const Eigen::VectorXd& point) {
  if (point.size() != state.mean().size())
    throw std::invalid_argument(fmt::format("point has length {}, state needs {}", point.size(), state.mean().size()));
  Eigen::LDLT<Eigen::MatrixXd> ldlt(state.cov());
  const double det = state.cov().determinant();
  if (ldlt.info() != Eigen::Success || !(det > 0.0)) throw std::domain_error("singular covariance in Wigner function");
  const Eigen::VectorXd d = point - state.mean();
  const double q = d.dot(ldlt.solve(d));
  return std::exp(-q) / (std::pow(kPi, state.modes()) * std::sqrt(det));
}

double wigner_fock(int n, double x, double p) {
  if (n < 0) throw std::invalid_argument("Fock number must be >= 0");
  const double rho2 = x * x + p * p;
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  return 2.0 / kPi * sign * std::laguerre(static_cast<unsigned>(n), 4.0 * rho2) * std::exp(-2.0 * rho2);
}

double parity_expectation(const GaussianState& state) {
  if (state.modes() != 1) throw std::invalid_argument("parity_expectation expects a single-mode state");
  return 0.5 * kPi * wigner_gaussian(state, Eigen::Vector2d::Zero());
}

}  // namespace qpb
