#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qpb/gaussian.hpp"

namespace qpb {

struct CutoffPolicy {
  enum class Kind { Adaptive, Fixed };
  Kind kind = Kind::Adaptive;
  double tail_tolerance = 1e-12;  // adaptive: stop once the tail bound drops below this
  int max_n = 0;                  // fixed: evaluate n = 0..max_n

  static CutoffPolicy adaptive(double tail_tolerance = 1e-12) { return {Kind::Adaptive, tail_tolerance, 0}; }
  static CutoffPolicy fixed(int max_n) { return {Kind::Fixed, 0.0, max_n}; }
};

struct PhotonDistribution {
  std::vector<double> probs;  // n = 0..cutoff
  int cutoff = 0;
  StateParams family;
  double tail_mass = 0.0;  // probability beyond cutoff (bound when adaptive)

  double operator[](int n) const { return n >= 0 && n <= cutoff ? probs[static_cast<std::size_t>(n)] : 0.0; }
};

struct CountMoments {
  double mean = 0.0;
  double variance = 0.0;
  double mandel_q = 0.0;
};

PhotonDistribution pmf(const StateParams& params, CutoffPolicy policy = CutoffPolicy::adaptive());
CountMoments moments(const PhotonDistribution& dist);

// Analytic photon-number mean and variance of a state family.
CountMoments closed_form_moments(const StateParams& params);

// Inverse-CDF sampling. Draws landing in the tail mass return cutoff + 1.
std::vector<int> sample_counts(const PhotonDistribution& dist, std::size_t n_samples, std::uint64_t seed,
                               std::uint64_t stream);

double thermal_mean_from_temperature(double kelvin, double omega);
double temperature_from_thermal_mean(double mean_photons, double omega);
double tmsv_effective_temperature(double r, double omega);

}  // namespace qpb
