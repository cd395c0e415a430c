#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qpb/grid2d.hpp"
#include "qpb/spatial_modes.hpp"

namespace qpb {

struct TurbulenceSpec {
  double cn2 = 0.0;            // m^(-2/3)
  double distance = 20.0;      // path length d, m
  double wavelength = 633e-9;  // m
  double outer_scale = 50.0;   // L0, m
  double inner_scale = 5e-3;   // l0, m

  void validate() const;
  double wavenumber() const;
  double k0() const;  // 2 pi / L0
  double km() const;  // 5.92 / l0
  // r0^(-5/3) = 0.423 k^2 Cn2 d; finite (zero) for Cn2 = 0.
  double fried_power() const;
};

// Cn2 in units of 1e-13 mm^(-2/3) (the --cn2-paper-units flag); one unit is 1e-11 m^(-2/3).
double cn2_from_paper_units(double value);
double cn2_to_paper_units(double cn2);

double fried_parameter(const TurbulenceSpec& spec);
// Modified von Karman phase spectrum 0.023 r0^(-5/3) (k^2 + k0^2)^(-11/6) exp(-k^2/km^2).
double phase_spectrum(const TurbulenceSpec& spec, double k);

struct PhaseScreen {
  Grid2D<double> phase;  // radians, zero mean
  GridSpec grid;
  TurbulenceSpec spec;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// FFT screen with unit periodogram calibration:
// E|FFT(phase)/N|^2 / dk^2 = phase_spectrum(k) for N = rows*cols samples.
PhaseScreen kolmogorov_screen(const TurbulenceSpec& spec, const GridSpec& grid, std::uint64_t seed,
                              std::uint64_t stream = 0);

ComplexField apply_phase(const ComplexField& field, const Grid2D<double>& phase);
ComplexField apply_screen(const ComplexField& field, const PhaseScreen& screen);

// Angular-spectrum Fresnel propagator, H = exp(-i pi lambda z (fx^2 + fy^2)).
// distance 0 gives H = 1. The inverse uses H* / (|H|^2 + epsilon).
class FresnelPropagator {
 public:
  FresnelPropagator(const GridSpec& grid, double wavelength, double distance, double epsilon = 1e-6);

  Grid2D<std::complex<double>> forward(const Grid2D<std::complex<double>>& u) const;
  Grid2D<std::complex<double>> backward(const Grid2D<std::complex<double>>& u) const;
  const GridSpec& grid() const { return grid_; }

 private:
  Grid2D<std::complex<double>> apply(const Grid2D<std::complex<double>>& u, const Grid2D<std::complex<double>>& h) const;
  GridSpec grid_;
  Grid2D<std::complex<double>> h_, hinv_;
};

// Intensity observed after propagating field * exp(i phase).
Grid2D<double> observe_intensity(const ComplexField& field, const Grid2D<double>& phase, const FresnelPropagator& prop);

// Azimuthally averaged power spectrum of a sum-normalized image, integer radial
// bins 1..bins in DFT index units.
std::vector<double> radial_power_spectrum(const Grid2D<double>& image, int bins);

struct Cn2EstimatorConfig {
  std::vector<double> candidates;  // m^(-2/3), ascending
  TurbulenceSpec base;             // cn2 field ignored
  double detection_distance = 2.5;
  int templates = 20;
  int radial_bins = 32;
  std::uint64_t seed = 1;
};

// Grid search over candidates comparing log radial spectra with simulated templates.
double estimate_cn2(std::span<const Grid2D<double>> observed, const ComplexField& source, const Cn2EstimatorConfig& cfg);

Grid2D<double> mean_screen(const TurbulenceSpec& spec, const GridSpec& grid, int count, std::uint64_t seed);

struct GdoOptions {
  int max_iter = 300;
  double tolerance = 1e-6;  // relative MSE change over `window` iterations
  int window = 10;
  double divergence_factor = 10.0;
};

struct GdoResult {
  Grid2D<double> mask;      // correction phase: corrected = distorted * exp(i mask)
  std::vector<double> mse;  // mse[j] is evaluated with the mask entering iteration j
  int iterations = 0;
  bool converged = false;
};

// Fixed-point phase retrieval: predict target * exp(-i mask) through H, keep the
// predicted phase with the observed amplitude, back-project and read off the mask.
GdoResult gdo_correct(const Grid2D<double>& observed, const ComplexField& target, const FresnelPropagator& prop,
                      const Grid2D<double>& initial_mask, const GdoOptions& opts = {});

struct CrosstalkMatrix {
  std::vector<int> alphabet;
  Eigen::MatrixXd probs;  // probs(detected, sent), columns sum to 1

  int size() const { return static_cast<int>(alphabet.size()); }
};

using Channel = std::function<ComplexField(const ComplexField& sent, std::size_t index)>;

// P(d|s) = |<LG_d,0 | channel(LG_s,0)>|^2, renormalized per sent column.
CrosstalkMatrix crosstalk_matrix(std::span<const int> alphabet, const BeamGeometry& beam, const GridSpec& grid,
                                 const Channel& channel);

double mutual_information(const Eigen::MatrixXd& probs);
double mutual_information(const CrosstalkMatrix& m);

}  // namespace qpb
