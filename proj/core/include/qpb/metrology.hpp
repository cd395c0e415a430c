#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpb/constants.hpp"
#include "qpb/gaussian.hpp"

namespace qpb {

// Squeeze angle of the mode-B input used by the standard configuration.
// theta = pi squeezes the phase quadrature of a real displacement.
inline constexpr double kDefaultSqueezeAngle = kPi;

struct SU11Config {
  double gain = 0.0;       // g
  double opa_angle = 0.0;  // psi of the first OPA
  double phase = 0.0;      // interferometer phase phi
  StateParams input_a = Vacuum{};
  StateParams input_b = Vacuum{};
};

// Coherent(sqrt(n1)) in A, DSV(sqrt(n2), 0, r, theta) in B.
SU11Config su11_standard(double n1, double n2, double r, double g, double theta = kDefaultSqueezeAngle);
void validate(const SU11Config& cfg);

enum class Detection { Parity, OnOff };

struct DerivativeOptions {
  double step = 1e-5;
  bool richardson = false;
};

SymplecticTransform su11_transform(const SU11Config& cfg);
GaussianState su11_input(const SU11Config& cfg);
GaussianState su11_evolve(const SU11Config& cfg);

double parity_signal(const SU11Config& cfg);
// nullopt when |d<Pi>/dphi| < 1e-14 (non-informative point).
std::optional<double> sensitivity_parity(const SU11Config& cfg, DerivativeOptions opts = {});

// Probability of at least one photon (all modes of the state).
double p_on(const GaussianState& state);
double on_probability(const SU11Config& cfg);  // mode B after the interferometer

struct OnOffFisher {
  double both_outcomes = 0.0;  // P'^2 / (P (1 - P))
  double on_term = 0.0;        // P'^2 / P
};
OnOffFisher on_off_fisher(const SU11Config& cfg, DerivativeOptions opts = {});
std::optional<double> sensitivity_on_off(const SU11Config& cfg, DerivativeOptions opts = {});

std::optional<double> sensitivity(const SU11Config& cfg, Detection detection, DerivativeOptions opts = {});

struct PhaseLimits {
  double total_photons = 0.0;
  double snl = 0.0;
  double hl = 0.0;
};
PhaseLimits snl_hl(const SU11Config& cfg);

struct OptimizeOptions {
  int grid_points = 2001;
  int edge_points = 41;  // log-spaced points per endpoint, 1e-6 .. 1e-2 rad
  DerivativeOptions derivative{};
};

struct PhaseOptimum {
  double phi = 0.0;
  double delta_phi = 0.0;
};
PhaseOptimum optimize_phi(const SU11Config& cfg, Detection detection, OptimizeOptions opts = {});

// Abscissae the optimizer scans before refinement, ascending, endpoints excluded.
std::vector<double> phase_scan_grid(const OptimizeOptions& opts);

enum class SweepVariable { Squeezing, Gain };

struct SensitivityPoint {
  double x = 0.0;
  double delta_phi = 0.0;
  double snl = 0.0;
  double hl = 0.0;
  double phi_star = 0.0;
};

struct SensitivityCurve {
  SweepVariable variable = SweepVariable::Squeezing;
  Detection detection = Detection::Parity;
  std::vector<SensitivityPoint> points;

  std::string label() const { return variable == SweepVariable::Squeezing ? "r" : "g"; }
};

SU11Config with_variable(const SU11Config& base, SweepVariable variable, double x);
SensitivityCurve sweep_curve(const SU11Config& base, SweepVariable variable, std::span<const double> xs,
                             Detection detection, OptimizeOptions opts = {});

}  // namespace qpb
