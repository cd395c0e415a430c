#include "qpb/turbulence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "qpb/constants.hpp"
#include "qpb/errors.hpp"
#include "qpb/fft.hpp"
#include "qpb/parallel.hpp"
#include "qpb/rng.hpp"

namespace qpb {
namespace {

using cd = std::complex<double>;

Grid2D<cd> to_samples(const ComplexField& f, const Grid2D<double>* phase, double sign) {
  Grid2D<cd> u = f.samples();
  if (phase) {
    if (phase->rows() != u.rows() || phase->cols() != u.cols()) throw std::invalid_argument("phase grid mismatch");
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::polar(1.0, sign * (*phase)[i]);
  }
  return u;
}

}  // namespace

void TurbulenceSpec::validate() const {
  if (!(cn2 >= 0.0) || !std::isfinite(cn2)) throw std::invalid_argument(fmt::format("Cn2 must be >= 0, got {}", cn2));
  if (!(distance > 0.0) || !(wavelength > 0.0)) throw std::invalid_argument("path length and wavelength must be positive");
  if (!(outer_scale > 0.0) || !(inner_scale > 0.0)) throw std::invalid_argument("turbulence scales must be positive");
}

double TurbulenceSpec::wavenumber() const { return kTwoPi / wavelength; }
double TurbulenceSpec::k0() const { return kTwoPi / outer_scale; }
double TurbulenceSpec::km() const { return 5.92 / inner_scale; }
double TurbulenceSpec::fried_power() const { return 0.423 * std::pow(wavenumber(), 2) * cn2 * distance; }

// 1e-13 mm^(-2/3) = 1e-13 * (1e-3 m)^(-2/3) = 1e-11 m^(-2/3).
double cn2_from_paper_units(double value) { return value * 1e-11; }
double cn2_to_paper_units(double cn2) { return cn2 * 1e11; }

double fried_parameter(const TurbulenceSpec& spec) {
  spec.validate();
  if (!(spec.cn2 > 0.0)) throw std::invalid_argument("Fried parameter needs Cn2 > 0");
  return std::pow(spec.fried_power(), -3.0 / 5.0);
}

double phase_spectrum(const TurbulenceSpec& s, double k) {
  const double k2 = k * k;
  return 0.023 * s.fried_power() * std::pow(k2 + s.k0() * s.k0(), -11.0 / 6.0) * std::exp(-k2 / (s.km() * s.km()));
}

PhaseScreen kolmogorov_screen(const TurbulenceSpec& spec, const GridSpec& grid, std::uint64_t seed, std::uint64_t stream) {
  spec.validate();
  grid.validate();
  const double dx = grid.pitch();
  const double dkx = kTwoPi / (grid.cols * dx), dky = kTwoPi / (grid.rows * dx);
  if (std::max(dkx, dky) >= spec.km())
    throw std::invalid_argument(fmt::format("grid too coarse: frequency step {:.4g} rad/m does not resolve km = {:.4g} rad/m",
                                            std::max(dkx, dky), spec.km()));
  const double dk = std::sqrt(dkx * dky);
  CGrid c(grid.rows, grid.cols);
  StreamRng rng(seed, stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < grid.rows; ++i)
    for (int j = 0; j < grid.cols; ++j) {
      const double re = normal(rng), im = normal(rng);
      if (i == 0 && j == 0) continue;
      const double kx = kTwoPi * fft_frequency(j, grid.cols, dx), ky = kTwoPi * fft_frequency(i, grid.rows, dx);
      c(i, j) = cd(re, im) * std::sqrt(phase_spectrum(spec, std::hypot(kx, ky))) * dk;
    }
  fft2_inverse(c);
  PhaseScreen s{Grid2D<double>(grid.rows, grid.cols), grid, spec, seed, stream};
  double mean = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) mean += (s.phase[i] = c[i].real());
  mean /= static_cast<double>(c.size());
  for (auto& v : s.phase.values()) v -= mean;
  return s;
}

ComplexField apply_phase(const ComplexField& field, const Grid2D<double>& phase) {
  return ComplexField(field.grid(), to_samples(field, &phase, 1.0));
}

ComplexField apply_screen(const ComplexField& field, const PhaseScreen& screen) {
  if (!(field.grid() == screen.grid)) throw std::invalid_argument("apply_screen: grid mismatch");
  return apply_phase(field, screen.phase);
}

FresnelPropagator::FresnelPropagator(const GridSpec& grid, double wavelength, double distance, double epsilon)
    : grid_(grid), h_(grid.rows, grid.cols, cd(1.0)), hinv_(grid.rows, grid.cols) {
  grid.validate();
  if (!(wavelength > 0.0) || !(distance >= 0.0) || !(epsilon >= 0.0))
    throw std::invalid_argument("invalid propagator parameters");
  const double dx = grid.pitch();
  for (int i = 0; i < grid.rows; ++i)
    for (int j = 0; j < grid.cols; ++j) {
      const double fx = fft_frequency(j, grid.cols, dx), fy = fft_frequency(i, grid.rows, dx);
      if (distance > 0.0) h_(i, j) = std::polar(1.0, -kPi * wavelength * distance * (fx * fx + fy * fy));
      hinv_(i, j) = std::conj(h_(i, j)) / (std::norm(h_(i, j)) + epsilon);
    }
}

Grid2D<cd> FresnelPropagator::apply(const Grid2D<cd>& u, const Grid2D<cd>& h) const {
  if (u.rows() != grid_.rows || u.cols() != grid_.cols) throw std::invalid_argument("propagator grid mismatch");
  CGrid a = u;
  fft2_forward(a);
  const double inv_n = 1.0 / static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= h[i] * inv_n;
  fft2_inverse(a);
  return a;
}

Grid2D<cd> FresnelPropagator::forward(const Grid2D<cd>& u) const { return apply(u, h_); }
Grid2D<cd> FresnelPropagator::backward(const Grid2D<cd>& u) const { return apply(u, hinv_); }

Grid2D<double> observe_intensity(const ComplexField& field, const Grid2D<double>& phase, const FresnelPropagator& prop) {
  const auto e = prop.forward(to_samples(field, &phase, 1.0));
  Grid2D<double> out(e.rows(), e.cols());
  for (std::size_t i = 0; i < e.size(); ++i) out[i] = std::norm(e[i]);
  return out;
}

std::vector<double> radial_power_spectrum(const Grid2D<double>& image, int bins) {
  if (bins < 1) throw std::invalid_argument("need at least one radial bin");
  double total = 0.0;
  for (double v : image.values()) total += v;
  if (!(total > 0.0)) throw std::invalid_argument("image has no intensity");
  CGrid a(image.rows(), image.cols());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = image[i] / total;
  fft2_forward(a);
  std::vector<double> sum(static_cast<std::size_t>(bins), 0.0);
  std::vector<int> cnt(static_cast<std::size_t>(bins), 0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const int ki = i < (a.rows() + 1) / 2 ? i : i - a.rows();
      const int kj = j < (a.cols() + 1) / 2 ? j : j - a.cols();
      const long b = std::lround(std::hypot(ki, kj));
      if (b < 1 || b > bins) continue;
      sum[static_cast<std::size_t>(b - 1)] += std::norm(a(i, j));
      cnt[static_cast<std::size_t>(b - 1)]++;
    }
  for (std::size_t b = 0; b < sum.size(); ++b) sum[b] = cnt[b] ? sum[b] / cnt[b] : 0.0;
  return sum;
}

double estimate_cn2(std::span<const Grid2D<double>> observed, const ComplexField& source, const Cn2EstimatorConfig& cfg) {
  constexpr std::size_t kMinFrames = 20;
  if (observed.size() < kMinFrames)
    throw std::invalid_argument(fmt::format("ensemble too small: {} frames, need {}", observed.size(), kMinFrames));
  if (cfg.candidates.empty()) throw std::invalid_argument("no Cn2 candidates");
  if (cfg.templates < 1) throw std::invalid_argument("need at least one template per candidate");
  const FresnelPropagator prop(source.grid(), cfg.base.wavelength, cfg.detection_distance);

  auto average = [&](auto&& frame_at, std::size_t n) {
    std::vector<double> acc(static_cast<std::size_t>(cfg.radial_bins), 0.0);
    for (std::size_t f = 0; f < n; ++f) {
      const auto s = radial_power_spectrum(frame_at(f), cfg.radial_bins);
      for (std::size_t b = 0; b < acc.size(); ++b) acc[b] += s[b] / static_cast<double>(n);
    }
    return acc;
  };
  const auto target = average([&](std::size_t f) -> const Grid2D<double>& { return observed[f]; }, observed.size());

  const auto distances = parallel_map<double>(cfg.candidates.size(), [&](std::size_t c) {
    TurbulenceSpec spec = cfg.base;
    spec.cn2 = cfg.candidates[c];
    const auto tmpl = average(
        [&](std::size_t t) {
          const auto screen = kolmogorov_screen(spec, source.grid(), cfg.seed, substream(c, t));
          return observe_intensity(source, screen.phase, prop);
        },
        static_cast<std::size_t>(cfg.templates));
    double d = 0.0;
    for (std::size_t b = 0; b < tmpl.size(); ++b) {
      if (!(tmpl[b] > 0.0) || !(target[b] > 0.0)) continue;
      d += std::pow(std::log(target[b]) - std::log(tmpl[b]), 2);
    }
    return d;
  });
  const auto best = std::min_element(distances.begin(), distances.end()) - distances.begin();
  return cfg.candidates[static_cast<std::size_t>(best)];
}

Grid2D<double> mean_screen(const TurbulenceSpec& spec, const GridSpec& grid, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("need at least one screen");
  const auto screens = parallel_map<Grid2D<double>>(static_cast<std::size_t>(count), [&](std::size_t i) {
    return kolmogorov_screen(spec, grid, seed, i).phase;
  });
  Grid2D<double> m(grid.rows, grid.cols);
  for (const auto& s : screens)
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += s[i] / count;
  return m;
}

GdoResult gdo_correct(const Grid2D<double>& observed, const ComplexField& target, const FresnelPropagator& prop,
                      const Grid2D<double>& initial_mask, const GdoOptions& opts) {
  const auto& g = target.grid();
  if (!(prop.grid() == g) || observed.rows() != g.rows || observed.cols() != g.cols || !initial_mask.same_shape(observed))
    throw std::invalid_argument("gdo_correct: grid mismatch");
  if (opts.max_iter < 1 || opts.window < 1) throw std::invalid_argument("gdo_correct: invalid iteration options");

  // Observed intensity rescaled to the unit-norm convention.
  double total = 0.0;
  for (double v : observed.values()) total += v;
  if (!(total > 0.0)) throw std::invalid_argument("observed intensity is empty");
  Grid2D<double> amp(g.rows, g.cols), obs(g.rows, g.cols);
  double scale = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    obs[i] = std::max(0.0, observed[i] / total);
    amp[i] = std::sqrt(obs[i]);
    scale += obs[i] * obs[i];
  }
  scale /= static_cast<double>(obs.size());

  GdoResult res;
  res.mask = initial_mask;
  const auto& u = target.samples();
  for (int it = 0; it < opts.max_iter; ++it) {
    Grid2D<cd> pred(g.rows, g.cols);
    for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = u[i] * std::polar(1.0, -res.mask[i]);
    auto e = prop.forward(pred);
    double mse = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) mse += std::pow(std::norm(e[i]) - obs[i], 2);
    mse /= static_cast<double>(e.size());
    res.mse.push_back(mse);
    res.iterations = it;
    if (!std::isfinite(mse) || mse > opts.divergence_factor * std::max(res.mse.front(), 1e-12 * scale))
      throw NumericalError(fmt::format("phase retrieval diverged at iteration {} (mse {:.3g})", it, mse));
    if (mse <= 1e-14 * scale) {
      res.converged = true;
      break;
    }
    const auto n = res.mse.size();
    if (n > static_cast<std::size_t>(opts.window)) {
      const double ref = res.mse[n - 1 - static_cast<std::size_t>(opts.window)];
      if (std::abs(ref - mse) <= opts.tolerance * ref) {
        res.converged = true;
        break;
      }
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double m = std::abs(e[i]);
      e[i] = m > 0.0 ? e[i] * (amp[i] / m) : cd(amp[i]);
    }
    const auto b = prop.backward(e);
    for (std::size_t i = 0; i < b.size(); ++i) res.mask[i] = std::arg(u[i] * std::conj(b[i]));
  }
  res.iterations = static_cast<int>(res.mse.size());
  return res;
}

CrosstalkMatrix crosstalk_matrix(std::span<const int> alphabet, const BeamGeometry& beam, const GridSpec& grid,
                                 const Channel& channel) {
  if (alphabet.empty()) throw std::invalid_argument("crosstalk alphabet is empty");
  const std::size_t n = alphabet.size();
  const auto modes = parallel_map<std::optional<ComplexField>>(
      n, [&](std::size_t i) { return std::optional<ComplexField>(lg_field(LGSpec{alphabet[i], 0, beam}, grid)); });
  CrosstalkMatrix m{std::vector<int>(alphabet.begin(), alphabet.end()), Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  parallel_for(n, [&](std::size_t s) {
    const ComplexField out = channel(*modes[s], s);
    double col = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      const double p = std::norm(overlap(*modes[d], out));
      m.probs(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(s)) = p;
      col += p;
    }
    if (!(col > 0.0)) throw NumericalError(fmt::format("sent mode l={} has no overlap with the alphabet", alphabet[s]));
    m.probs.col(static_cast<Eigen::Index>(s)) /= col;
  });
  return m;
}

double mutual_information(const Eigen::MatrixXd& p) {
  const auto n = p.cols();
  if (n == 0 || p.rows() != n) throw std::invalid_argument("crosstalk matrix must be square and nonempty");
  const Eigen::VectorXd row = p.rowwise().sum();
  double mi = 0.0;
  for (Eigen::Index d = 0; d < n; ++d)
    for (Eigen::Index s = 0; s < n; ++s) {
      const double v = p(d, s);
      if (v > 0.0) mi += v * std::log2(v * static_cast<double>(n) / row[d]);
    }
  return mi / static_cast<double>(n);
}

double mutual_information(const CrosstalkMatrix& m) { return mutual_information(m.probs); }

}  // namespace qpb
