#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "qpb/grid2d.hpp"

namespace qpb {

struct BeamGeometry {
  double wavelength = 633e-9;  // m
  double waist = 1e-3;         // w0, m
  double z = 0.0;              // axial position, m

  void validate() const;
  double wavenumber() const;
  double rayleigh_range() const;
  double width() const;      // w(z)
  double curvature() const;  // 1/R(z), zero at the waist
  double gouy() const;       // arctan(z / z_R)
};

// Square pixels of pitch 2*extent/cols; sample (i, j) sits at
// x = (j - cols/2) dx, y = (i - rows/2) dx, so the origin is a sample.
struct GridSpec {
  int rows = 512;
  int cols = 512;
  double extent = 8e-3;  // half-width along x, m

  void validate() const;
  double pitch() const { return 2.0 * extent / cols; }
  double x(int j) const { return (j - cols / 2) * pitch(); }
  double y(int i) const { return (i - rows / 2) * pitch(); }
  bool operator==(const GridSpec&) const = default;
};

class ComplexField {
 public:
  // Samples are rescaled so that sum |u|^2 = 1.
  ComplexField(GridSpec grid, Grid2D<std::complex<double>> samples);

  const GridSpec& grid() const { return grid_; }
  const Grid2D<std::complex<double>>& samples() const { return samples_; }
  std::complex<double> operator()(int i, int j) const { return samples_(i, j); }
  double norm() const;

  Grid2D<double> intensity() const;

 private:
  GridSpec grid_;
  Grid2D<std::complex<double>> samples_;
};

struct LGSpec {
  int l = 0;
  int p = 0;
  BeamGeometry beam{};
};

struct HGSpec {
  int n = 0;
  int m = 0;
  BeamGeometry beam{};
};

// Raw (unnormalized) mode amplitudes at a point.
std::complex<double> lg_amplitude(const LGSpec& spec, double x, double y);
std::complex<double> hg_amplitude(const HGSpec& spec, double x, double y);

ComplexField lg_field(const LGSpec& spec, const GridSpec& grid);
ComplexField hg_field(const HGSpec& spec, const GridSpec& grid);

ComplexField superpose(std::span<const std::complex<double>> coeffs, std::span<const ComplexField> fields);

// Discrete inner product <a|b> = sum conj(a) b; the constant area element
// cancels against the unit-norm convention.
std::complex<double> overlap(const ComplexField& a, const ComplexField& b);

// Blazed fork grating: mod 2pi of (2 pi x / period + l * azimuth), in [0, 2pi).
Grid2D<double> fork_hologram(const LGSpec& target, const GridSpec& grid, double period_px);

// Field dumps: CSV rows "x,y,re,im"; binary PGM of intensity scaled to 255.
void write_field_csv(std::ostream& out, const ComplexField& field);
void write_intensity_pgm(std::ostream& out, const ComplexField& field);

}  // namespace qpb
