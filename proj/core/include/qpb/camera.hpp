#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qpb {

struct CameraConfig {
  double pump_photons = 1e6;    // nbar_alpha
  double squeezed_photons = 1;  // nbar_s = sinh^2 r
  double phase = 0.0;           // 0 squeezed, pi/2 anti-squeezed
  int rows = 32;
  int cols = 32;
  int frames = 10000;
  std::uint64_t seed = 1;
};
void validate(const CameraConfig& cfg);

struct DetectedMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Photon-number moments of DSV(sqrt(n_alpha), phase, r, 0) after a loss channel of transmissivity eta.
DetectedMoments dsv_detected_moments(double pump_photons, double squeezed_photons, double phase, double eta);

// Analytic variance-vs-mean curve traced by eta: var = a0 + a1 m + a2 m^2.
struct QuadraticFit {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double residual_norm = 0.0;

  double operator()(double m) const { return a0 + a1 * m + a2 * m * m; }
};
QuadraticFit analytic_variance_curve(double pump_photons, double squeezed_photons, double phase);

class FrameEnsemble {
 public:
  FrameEnsemble(int rows, int cols, int frames, bool exact_sampling);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int frames() const { return frames_; }
  int pixels() const { return rows_ * cols_; }
  bool exact_sampling() const { return exact_; }

  std::span<std::uint32_t> frame(int f);
  std::span<const std::uint32_t> frame(int f) const;
  std::uint64_t total(int f) const;

 private:
  int rows_, cols_, frames_;
  bool exact_;
  std::vector<std::uint32_t> counts_;
};

// Per-frame totals follow the DSV count law (exact pmf when mean + 10 sd <= 1e4,
// otherwise a rounded Gaussian with the exact mean and variance); photons are
// spread over pixels by a uniform multinomial.
FrameEnsemble simulate_frames(const CameraConfig& cfg);

struct VariancePoint {
  double mean = 0.0;
  double variance = 0.0;
};

// Group k = first k pixels in row-major order; sample variance across frames.
std::vector<VariancePoint> integrate_pixels(const FrameEnsemble& ensemble);

enum class FitWeighting { Ordinary, InverseVariance };
QuadraticFit fit_variance_curve(std::span<const VariancePoint> points, FitWeighting weighting = FitWeighting::Ordinary);

struct VarianceCurve {
  std::vector<VariancePoint> points;
  QuadraticFit fit;
};

struct SqueezingEstimate {
  double squeezed_photons = 0.0;
  double squeezing = 0.0;  // r = asinh(sqrt(nbar_s))
  double residual = 0.0;   // rms misfit of a2 over the two phases
};

// Least-squares inversion of the eta-parametric curves at phase 0 and pi/2.
SqueezingEstimate estimate_squeezing(const QuadraticFit& squeezed, const QuadraticFit& anti_squeezed,
                                     double pump_photons);

}  // namespace qpb
