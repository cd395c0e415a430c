#include "qpb/camera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qpb/constants.hpp"
#include "qpb/errors.hpp"
#include "qpb/parallel.hpp"
#include "qpb/photon_stats.hpp"
#include "qpb/rng.hpp"

namespace qpb {
namespace {

double closed_form_variance(double na, double ns, double phase) {
  return na + 2.0 * na * ns + 2.0 * ns + 2.0 * ns * ns - 2.0 * na * std::sqrt(ns * (1.0 + ns)) * std::cos(2.0 * phase);
}

}  // namespace

void validate(const CameraConfig& cfg) {
  if (!(cfg.pump_photons >= 0.0) || !(cfg.squeezed_photons >= 0.0))
    throw std::invalid_argument("photon numbers must be >= 0");
  if (!(cfg.phase >= 0.0 && cfg.phase < kTwoPi)) throw std::invalid_argument("phase must lie in [0, 2pi)");
  if (cfg.rows < 1 || cfg.cols < 1) throw std::invalid_argument("pixel grid must be at least 1x1");
  if (cfg.frames < 2) throw std::invalid_argument("need at least 2 frames");
}

DetectedMoments dsv_detected_moments(double na, double ns, double phase, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument(fmt::format("transmissivity must lie in [0, 1], got {}", eta));
  if (!(na >= 0.0) || !(ns >= 0.0)) throw std::invalid_argument("photon numbers must be >= 0");
  const double n = na + ns;
  const double v = closed_form_variance(na, ns, phase);
  return {eta * n, eta * eta * v + eta * (1.0 - eta) * n};
}

QuadraticFit analytic_variance_curve(double na, double ns, double phase) {
  const double n = na + ns;
  QuadraticFit f;
  f.a1 = 1.0;
  f.a2 = n > 0.0 ? (closed_form_variance(na, ns, phase) - n) / (n * n) : 0.0;
  return f;
}

FrameEnsemble::FrameEnsemble(int rows, int cols, int frames, bool exact_sampling)
    : rows_(rows), cols_(cols), frames_(frames), exact_(exact_sampling),
      counts_(static_cast<std::size_t>(rows) * cols * frames, 0u) {}

std::span<std::uint32_t> FrameEnsemble::frame(int f) {
  return {counts_.data() + static_cast<std::size_t>(f) * pixels(), static_cast<std::size_t>(pixels())};
}

std::span<const std::uint32_t> FrameEnsemble::frame(int f) const {
  return {counts_.data() + static_cast<std::size_t>(f) * pixels(), static_cast<std::size_t>(pixels())};
}

std::uint64_t FrameEnsemble::total(int f) const {
  std::uint64_t s = 0;
  for (auto c : frame(f)) s += c;
  return s;
}

FrameEnsemble simulate_frames(const CameraConfig& cfg) {
  validate(cfg);
  const double na = cfg.pump_photons, ns = cfg.squeezed_photons;
  const double mean = na + ns;
  const double var = closed_form_variance(na, ns, cfg.phase);
  const bool exact = mean + 10.0 * std::sqrt(var) <= 1e4;
  FrameEnsemble ens(cfg.rows, cfg.cols, cfg.frames, exact);

  std::vector<double> cdf;
  if (exact && mean > 0.0) {
    const PhotonDistribution d = pmf(DisplacedSqueezed{std::sqrt(na), cfg.phase, std::asinh(std::sqrt(ns)), 0.0});
    cdf.resize(d.probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = (acc += d.probs[i]);
  }
  const int pixels = ens.pixels();
  parallel_for(static_cast<std::size_t>(cfg.frames), [&](std::size_t f) {
    StreamRng rng(cfg.seed, f);
    long long total = 0;
    if (mean > 0.0) {
      if (exact) {
        total = std::upper_bound(cdf.begin(), cdf.end(), rng.uniform()) - cdf.begin();
      } else {
        std::normal_distribution<double> gauss(mean, std::sqrt(var));
        total = std::max(0LL, std::llround(gauss(rng)));
      }
    }
    auto px = ens.frame(static_cast<int>(f));
    long long left = total;
    for (int k = 0; k < pixels && left > 0; ++k) {
      const int remaining = pixels - k;
      long long take = left;
      if (remaining > 1) {
        std::binomial_distribution<long long> bin(left, 1.0 / remaining);
        take = bin(rng);
      }
      px[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(take);
      left -= take;
    }
  });
  return ens;
}

std::vector<VariancePoint> integrate_pixels(const FrameEnsemble& ens) {
  if (ens.frames() < 2) throw std::invalid_argument("need at least 2 frames");
  const int p = ens.pixels();
  std::vector<long long> sum(static_cast<std::size_t>(p), 0);
  std::vector<__int128> sum2(static_cast<std::size_t>(p), 0);
  for (int f = 0; f < ens.frames(); ++f) {
    auto px = ens.frame(f);
    long long s = 0;
    for (int k = 0; k < p; ++k) {
      s += px[static_cast<std::size_t>(k)];
      sum[static_cast<std::size_t>(k)] += s;
      sum2[static_cast<std::size_t>(k)] += static_cast<__int128>(s) * s;
    }
  }
  const __int128 n = ens.frames();
  std::vector<VariancePoint> out(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) {
    const auto i = static_cast<std::size_t>(k);
    // Exact integer numerator n*sum(s^2) - sum(s)^2.
    const __int128 num = n * sum2[i] - static_cast<__int128>(sum[i]) * sum[i];
    out[i].mean = static_cast<double>(sum[i]) / static_cast<double>(n);
    out[i].variance = static_cast<double>(num) / static_cast<double>(n * (n - 1));
  }
  return out;
}

QuadraticFit fit_variance_curve(std::span<const VariancePoint> points, FitWeighting weighting) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 3) throw std::invalid_argument("quadratic fit needs at least 3 points");
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, std::abs(p.mean));
  if (scale == 0.0) throw NumericalError("rank-deficient design: all means are zero");
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n), w = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = points[static_cast<std::size_t>(i)].mean / scale;
    a.row(i) << 1.0, u, u * u;
    b[i] = points[static_cast<std::size_t>(i)].variance;
    if (weighting == FitWeighting::InverseVariance) w[i] = 1.0 / std::max(std::abs(b[i]), 1.0);
  }
  const Eigen::MatrixXd aw = w.asDiagonal() * a;
  const Eigen::VectorXd bw = w.asDiagonal() * b;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(aw);
  qr.setThreshold(1e-12);
  if (qr.rank() < 3) throw NumericalError("rank-deficient design in quadratic fit");
  const Eigen::VectorXd c = qr.solve(bw);
  QuadraticFit f{c[0], c[1] / scale, c[2] / (scale * scale), (a * c - b).norm()};
  return f;
}

SqueezingEstimate estimate_squeezing(const QuadraticFit& sq, const QuadraticFit& anti, double na) {
  if (!(na > 0.0)) throw std::invalid_argument("pump photon number must be positive");
  auto misfit = [&](double ns) {
    const double e0 = sq.a2 - analytic_variance_curve(na, ns, 0.0).a2;
    const double e1 = anti.a2 - analytic_variance_curve(na, ns, 0.5 * kPi).a2;
    return std::sqrt(0.5 * (e0 * e0 + e1 * e1));
  };
  // Scan on a log grid (plus zero), then golden-section refine.
  std::vector<double> grid{0.0};
  for (int i = 0; i <= 1200; ++i) grid.push_back(std::pow(10.0, -8.0 + 12.0 * i / 1200.0));
  std::size_t best = 0;
  double fbest = misfit(0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = misfit(grid[i]);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  double lo = best == 0 ? 0.0 : grid[best - 1];
  double hi = best + 1 < grid.size() ? grid[best + 1] : grid[best];
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    if (misfit(c) < misfit(d))
      hi = d;
    else
      lo = c;
  }
  double ns = 0.5 * (lo + hi);
  if (misfit(grid[best]) < misfit(ns)) ns = grid[best];

  SqueezingEstimate est{ns, std::asinh(std::sqrt(ns)), misfit(ns)};
  const double signal = std::sqrt(0.5 * (sq.a2 * sq.a2 + anti.a2 * anti.a2));
  if (est.residual > 0.25 * std::max(signal, 1.0 / (na + ns)))
    throw NumericalError(fmt::format("variance curves are inconsistent with a DSV state (misfit {:.3g})", est.residual));
  return est;
}

}  // namespace qpb
