#include "qpb/spatial_modes.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "qpb/constants.hpp"
#include "qpb/io.hpp"

namespace qpb {
namespace {

using cd = std::complex<double>;

constexpr double kClipTolerance = 1e-3;

double log_factorial(int n) { return std::lgamma(n + 1.0); }

template <class Amp>
ComplexField sample(const GridSpec& grid, double waist, Amp&& amp, const char* what) {
  grid.validate();
  Grid2D<cd> s(grid.rows, grid.cols);
  double energy = 0.0;
  for (int i = 0; i < grid.rows; ++i)
    for (int j = 0; j < grid.cols; ++j) {
      s(i, j) = amp(grid.x(j), grid.y(i));
      energy += std::norm(s(i, j));
    }
  // Raw amplitudes carry unit L2 norm times waist^2 on the continuum.
  const double captured = energy * grid.pitch() * grid.pitch() / (waist * waist);
  if (!(captured >= 1.0 - kClipTolerance))
    throw std::invalid_argument(fmt::format("{} clipped by grid: {:.3g} of the energy lies outside", what, 1.0 - captured));
  return ComplexField(grid, std::move(s));
}

}  // namespace

void BeamGeometry::validate() const {
  if (!(wavelength > 0.0) || !(waist > 0.0) || !std::isfinite(z))
    throw std::invalid_argument("wavelength and waist must be positive");
}

double BeamGeometry::wavenumber() const { return kTwoPi / wavelength; }
double BeamGeometry::rayleigh_range() const { return kPi * waist * waist / wavelength; }
double BeamGeometry::width() const { return waist * std::sqrt(1.0 + std::pow(z / rayleigh_range(), 2)); }
double BeamGeometry::curvature() const {
  const double zr = rayleigh_range();
  return z / (z * z + zr * zr);
}
double BeamGeometry::gouy() const { return std::atan(z / rayleigh_range()); }

void GridSpec::validate() const {
  if (rows < 2 || cols < 2) throw std::invalid_argument("grid must be at least 2x2");
  if (!(extent > 0.0)) throw std::invalid_argument("grid extent must be positive");
}

ComplexField::ComplexField(GridSpec grid, Grid2D<cd> samples) : grid_(grid), samples_(std::move(samples)) {
  if (samples_.rows() != grid_.rows || samples_.cols() != grid_.cols)
    throw std::invalid_argument("sample array does not match grid");
  double e = 0.0;
  for (const auto& v : samples_.values()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw std::invalid_argument("non-finite field sample");
    e += std::norm(v);
  }
  if (!(e > 0.0)) throw std::invalid_argument("field is identically zero");
  const double s = 1.0 / std::sqrt(e);
  for (auto& v : samples_.values()) v *= s;
}

double ComplexField::norm() const {
  double e = 0.0;
  for (const auto& v : samples_.values()) e += std::norm(v);
  return std::sqrt(e);
}

Grid2D<double> ComplexField::intensity() const {
  Grid2D<double> out(samples_.rows(), samples_.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(samples_[i]);
  return out;
}

cd lg_amplitude(const LGSpec& s, double x, double y) {
  if (s.p < 0) throw std::invalid_argument("radial index p must be >= 0");
  s.beam.validate();
  const int al = std::abs(s.l);
  const double w = s.beam.width();
  const double r2 = x * x + y * y;
  const double rho = std::sqrt(2.0 * r2) / w;
  const double c = std::sqrt(2.0 * std::exp(log_factorial(s.p) - log_factorial(al + s.p)) / kPi);
  const double radial = c * (s.beam.waist / w) * std::pow(rho, al) *
                        std::assoc_laguerre(static_cast<unsigned>(s.p), static_cast<unsigned>(al), 2.0 * r2 / (w * w)) *
                        std::exp(-r2 / (w * w));
  const double phase = -s.beam.wavenumber() * r2 * s.beam.curvature() / 2.0 + s.l * std::atan2(y, x) +
                       (2 * s.p + al + 1) * s.beam.gouy();
  return std::polar(radial, phase);
}

cd hg_amplitude(const HGSpec& s, double x, double y) {
  if (s.n < 0 || s.m < 0) throw std::invalid_argument("Hermite-Gauss indices must be >= 0");
  s.beam.validate();
  const double w = s.beam.width();
  const double r2 = x * x + y * y;
  const double c = std::sqrt(2.0 / (kPi * std::pow(2.0, s.n + s.m) * std::exp(log_factorial(s.n) + log_factorial(s.m))));
  const double amp = c * (s.beam.waist / w) * std::hermite(static_cast<unsigned>(s.n), std::sqrt(2.0) * x / w) *
                     std::hermite(static_cast<unsigned>(s.m), std::sqrt(2.0) * y / w) * std::exp(-r2 / (w * w));
  const double phase = -s.beam.wavenumber() * r2 * s.beam.curvature() / 2.0 - (s.n + s.m + 1) * s.beam.gouy();
  return std::polar(amp, phase);
}

ComplexField lg_field(const LGSpec& spec, const GridSpec& grid) {
  return sample(grid, spec.beam.waist, [&](double x, double y) { return lg_amplitude(spec, x, y); }, "LG mode");
}

ComplexField hg_field(const HGSpec& spec, const GridSpec& grid) {
  return sample(grid, spec.beam.waist, [&](double x, double y) { return hg_amplitude(spec, x, y); }, "HG mode");
}

ComplexField superpose(std::span<const cd> coeffs, std::span<const ComplexField> fields) {
  if (coeffs.size() != fields.size() || fields.empty())
    throw std::invalid_argument("superpose needs one coefficient per field");
  const GridSpec g = fields[0].grid();
  Grid2D<cd> acc(g.rows, g.cols);
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (!(fields[k].grid() == g)) throw std::invalid_argument("superpose: grid mismatch");
    const auto& s = fields[k].samples();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += coeffs[k] * s[i];
  }
  return ComplexField(g, std::move(acc));
}

cd overlap(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("overlap: grid mismatch");
  cd s = 0.0;
  const auto& sa = a.samples();
  const auto& sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) s += std::conj(sa[i]) * sb[i];
  return s;
}

Grid2D<double> fork_hologram(const LGSpec& target, const GridSpec& grid, double period_px) {
  if (!(period_px >= 2.0)) throw std::invalid_argument("grating period must be at least 2 pixels");
  grid.validate();
  Grid2D<double> mask(grid.rows, grid.cols);
  for (int i = 0; i < grid.rows; ++i)
    for (int j = 0; j < grid.cols; ++j) {
      const double v = kTwoPi * (j - grid.cols / 2) / period_px + target.l * std::atan2(grid.y(i), grid.x(j));
      double m = std::fmod(v, kTwoPi);
      if (m < 0.0) m += kTwoPi;
      if (m >= kTwoPi) m = 0.0;
      mask(i, j) = m;
    }
  return mask;
}

void write_field_csv(std::ostream& out, const ComplexField& field) {
  const auto& g = field.grid();
  out << "x,y,re,im\n";
  for (int i = 0; i < g.rows; ++i)
    for (int j = 0; j < g.cols; ++j)
      out << csv_number(g.x(j)) << ',' << csv_number(g.y(i)) << ',' << csv_number(field(i, j).real()) << ','
          << csv_number(field(i, j).imag()) << '\n';
}

void write_intensity_pgm(std::ostream& out, const ComplexField& field) {
  const auto in = field.intensity();
  const double peak = *std::max_element(in.values().begin(), in.values().end());
  out << "P5\n" << in.cols() << ' ' << in.rows() << "\n255\n";
  for (std::size_t i = 0; i < in.size(); ++i) {
    const long v = peak > 0.0 ? std::lround(255.0 * in[i] / peak) : 0;
    out.put(static_cast<char>(static_cast<unsigned char>(std::clamp(v, 0L, 255L))));
  }
}

}  // namespace qpb
