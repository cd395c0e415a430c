#pragma once

#include <cstdint>
#include <vector>

#include "qpb/spatial_modes.hpp"
#include "qpb/tomography.hpp"
#include "qpb/turbulence.hpp"

namespace qpb {

std::vector<int> default_alphabet();  // l = -5..5

struct ChannelExperimentConfig {
  double cn2 = cn2_from_paper_units(60.0);
  double path_length = 20.0;
  double outer_scale = 50.0;
  double inner_scale = 5e-3;
  BeamGeometry beam{};
  GridSpec grid{256, 256, 8e-3};
  double detection_distance = 2.5;  // Fresnel plane of the intensity camera
  int qubit_l = 3;
  std::vector<int> alphabet = default_alphabet();
  std::vector<double> cn2_candidates = {cn2_from_paper_units(30.0), cn2_from_paper_units(60.0),
                                        cn2_from_paper_units(90.0)};
  int estimator_frames = 20;
  int estimator_templates = 20;
  int mean_screens = 20;
  GdoOptions gdo{};
  bool crosstalk = true;
  std::uint64_t seed = 1;
};

struct ChannelExperimentResult {
  double cn2_estimate = 0.0;
  PhaseScreen screen;
  GdoResult gdo;
  double overlap_distorted = 0.0;  // |<target|field>|^2
  double overlap_corrected = 0.0;
  QubitDensity target = QubitDensity::pure(1.0, 1.0);
  QubitDensity prepared = QubitDensity::pure(1.0, 1.0);
  QubitDensity distorted = QubitDensity::pure(1.0, 1.0);
  QubitDensity corrected = QubitDensity::pure(1.0, 1.0);
  double fidelity_prepared = 0.0;
  double fidelity_distorted = 0.0;
  double fidelity_corrected = 0.0;
  CrosstalkMatrix ideal, turbulent, corrected_matrix;
  double mi_ideal = 0.0, mi_turbulent = 0.0, mi_corrected = 0.0;
};

// Screen, Cn2 estimate, phase retrieval and tomography of (|+l> + |-l>)/sqrt2,
// plus crosstalk matrices of the OAM alphabet without, with, and after
// correcting the same screen.
ChannelExperimentResult run_channel_experiment(const ChannelExperimentConfig& cfg);

}  // namespace qpb
