#include "qpb/channel.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "qpb/parallel.hpp"
#include "qpb/rng.hpp"

namespace qpb {
namespace {

// Stream families so each random ingredient is independent of the others.
constexpr std::uint64_t kScreenStream = 1;
constexpr std::uint64_t kObservedStream = 2;
constexpr std::uint64_t kTemplateSeedOffset = 0x5eed;
constexpr std::uint64_t kMeanSeedOffset = 0x3ea1;

ComplexField qubit_field(int l, const BeamGeometry& beam, const GridSpec& grid) {
  const std::array<ComplexField, 2> modes{lg_field(LGSpec{l, 0, beam}, grid), lg_field(LGSpec{-l, 0, beam}, grid)};
  const std::array<std::complex<double>, 2> c{std::sqrt(0.5), std::sqrt(0.5)};
  return superpose(c, modes);
}

}  // namespace

std::vector<int> default_alphabet() {
  std::vector<int> a;
  for (int l = -5; l <= 5; ++l) a.push_back(l);
  return a;
}

ChannelExperimentResult run_channel_experiment(const ChannelExperimentConfig& cfg) {
  TurbulenceSpec spec;
  spec.cn2 = cfg.cn2;
  spec.distance = cfg.path_length;
  spec.wavelength = cfg.beam.wavelength;
  spec.outer_scale = cfg.outer_scale;
  spec.inner_scale = cfg.inner_scale;
  spec.validate();

  ChannelExperimentResult res;
  res.screen = kolmogorov_screen(spec, cfg.grid, cfg.seed, kScreenStream);
  const FresnelPropagator prop(cfg.grid, cfg.beam.wavelength, cfg.detection_distance);
  const ComplexField target = qubit_field(cfg.qubit_l, cfg.beam, cfg.grid);

  // Turbulence strength from an ensemble of distorted camera frames.
  const auto frames = parallel_map<Grid2D<double>>(static_cast<std::size_t>(cfg.estimator_frames), [&](std::size_t f) {
    const auto s = kolmogorov_screen(spec, cfg.grid, cfg.seed, substream(kObservedStream, f));
    return observe_intensity(target, s.phase, prop);
  });
  Cn2EstimatorConfig est;
  est.candidates = cfg.cn2_candidates;
  est.base = spec;
  est.detection_distance = cfg.detection_distance;
  est.templates = cfg.estimator_templates;
  est.seed = cfg.seed + kTemplateSeedOffset;
  res.cn2_estimate = estimate_cn2(frames, target, est);

  TurbulenceSpec est_spec = spec;
  est_spec.cn2 = res.cn2_estimate;
  Grid2D<double> init = mean_screen(est_spec, cfg.grid, cfg.mean_screens, cfg.seed + kMeanSeedOffset);
  for (auto& v : init.values()) v = -v;

  const ComplexField distorted = apply_screen(target, res.screen);
  res.gdo = gdo_correct(observe_intensity(target, res.screen.phase, prop), target, prop, init, cfg.gdo);
  const ComplexField corrected = apply_phase(distorted, res.gdo.mask);
  res.overlap_distorted = std::norm(overlap(target, distorted));
  res.overlap_corrected = std::norm(overlap(target, corrected));

  res.target = QubitDensity::pure(1.0, 1.0);
  res.prepared = reconstruct_density(project_six(target, cfg.qubit_l, cfg.beam));
  res.distorted = reconstruct_density(project_six(distorted, cfg.qubit_l, cfg.beam));
  res.corrected = reconstruct_density(project_six(corrected, cfg.qubit_l, cfg.beam));
  res.fidelity_prepared = fidelity(res.target, res.prepared);
  res.fidelity_distorted = fidelity(res.target, res.distorted);
  res.fidelity_corrected = fidelity(res.target, res.corrected);

  if (cfg.crosstalk) {
    res.ideal = crosstalk_matrix(cfg.alphabet, cfg.beam, cfg.grid, [](const ComplexField& f, std::size_t) { return f; });
    res.turbulent = crosstalk_matrix(cfg.alphabet, cfg.beam, cfg.grid,
                                     [&](const ComplexField& f, std::size_t) { return apply_screen(f, res.screen); });
    res.corrected_matrix = crosstalk_matrix(cfg.alphabet, cfg.beam, cfg.grid, [&](const ComplexField& f, std::size_t) {
      const auto g = gdo_correct(observe_intensity(f, res.screen.phase, prop), f, prop, init, cfg.gdo);
      return apply_phase(apply_screen(f, res.screen), g.mask);
    });
    res.mi_ideal = mutual_information(res.ideal);
    res.mi_turbulent = mutual_information(res.turbulent);
    res.mi_corrected = mutual_information(res.corrected_matrix);
  }
  return res;
}

}  // namespace qpb
