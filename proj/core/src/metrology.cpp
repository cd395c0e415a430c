#include "qpb/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "qpb/errors.hpp"
#include "qpb/parallel.hpp"

namespace qpb {
namespace {

constexpr double kMinSlope = 1e-14;

template <class F>
double derivative(F&& f, double x, const DerivativeOptions& opts) {
  const double h = opts.step;
  const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
  if (!opts.richardson) return d1;
  const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

SU11Config at_phase(SU11Config cfg, double phi) {
  cfg.phase = phi;
  return cfg;
}

double objective(const SU11Config& cfg, Detection det, double phi, const DerivativeOptions& opts) {
  auto v = sensitivity(at_phase(cfg, phi), det, opts);
  return v ? *v : std::numeric_limits<double>::infinity();
}

}  // namespace

SU11Config su11_standard(double n1, double n2, double r, double g, double theta) {
  if (n1 < 0.0 || n2 < 0.0) throw std::invalid_argument("mean photon numbers must be >= 0");
  SU11Config cfg;
  cfg.gain = g;
  cfg.input_a = Coherent{std::sqrt(n1), 0.0};
  cfg.input_b = DisplacedSqueezed{std::sqrt(n2), 0.0, r, theta};
  validate(cfg);
  return cfg;
}

void validate(const SU11Config& cfg) {
  if (!(cfg.gain >= 0.0) || !std::isfinite(cfg.gain)) throw std::invalid_argument(fmt::format("gain must be >= 0, got {}", cfg.gain));
  if (!std::isfinite(cfg.phase) || !std::isfinite(cfg.opa_angle)) throw std::invalid_argument("non-finite phase");
  validate(cfg.input_a);
  validate(cfg.input_b);
}

SymplecticTransform su11_transform(const SU11Config& cfg) {
  // S = TMS(g, psi) * PS_A(phi) * TMS(g, psi + pi); the rightmost factor acts first.
  const auto opa_in = two_mode_squeezer(cfg.gain, cfg.opa_angle + kPi);
  const auto opa_out = two_mode_squeezer(cfg.gain, cfg.opa_angle);
  return compose(opa_out, compose(phase_shift(PhaseTarget::A, cfg.phase), opa_in));
}

GaussianState su11_input(const SU11Config& cfg) {
  return tensor(make_single_mode(cfg.input_a), make_single_mode(cfg.input_b));
}

GaussianState su11_evolve(const SU11Config& cfg) {
  validate(cfg);
  return apply(su11_transform(cfg), su11_input(cfg));
}

double parity_signal(const SU11Config& cfg) { return parity_expectation(reduce_mode(su11_evolve(cfg), Mode::B)); }

std::optional<double> sensitivity_parity(const SU11Config& cfg, DerivativeOptions opts) {
  const double p = parity_signal(cfg);
  const double slope = derivative([&](double phi) { return parity_signal(at_phase(cfg, phi)); }, cfg.phase, opts);
  if (!(std::abs(slope) >= kMinSlope)) return std::nullopt;
  return std::sqrt(std::max(0.0, 1.0 - p * p)) / std::abs(slope);
}

double p_on(const GaussianState& state) {
  const int n = state.modes();
  const Eigen::MatrixXd m = 2.0 * state.cov() + Eigen::MatrixXd::Identity(2 * n, 2 * n);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  const double q = state.mean().dot(ldlt.solve(state.mean()));
  const double p0 = std::pow(2.0, n) / std::sqrt(m.determinant()) * std::exp(-2.0 * q);
  return 1.0 - p0;
}

double on_probability(const SU11Config& cfg) { return p_on(reduce_mode(su11_evolve(cfg), Mode::B)); }

OnOffFisher on_off_fisher(const SU11Config& cfg, DerivativeOptions opts) {
  const double p = on_probability(cfg);
  const double dp = derivative([&](double phi) { return on_probability(at_phase(cfg, phi)); }, cfg.phase, opts);
  OnOffFisher f;
  if (p > 0.0 && p < 1.0) {
    f.both_outcomes = dp * dp / (p * (1.0 - p));
    f.on_term = dp * dp / p;
  }
  return f;
}

std::optional<double> sensitivity_on_off(const SU11Config& cfg, DerivativeOptions opts) {
  const double p = on_probability(cfg);
  if (!(p > 0.0 && p < 1.0)) return std::nullopt;
  const double dp = derivative([&](double phi) { return on_probability(at_phase(cfg, phi)); }, cfg.phase, opts);
  if (!(std::abs(dp) >= kMinSlope)) return std::nullopt;
  return std::sqrt(p * (1.0 - p)) / std::abs(dp);
}

std::optional<double> sensitivity(const SU11Config& cfg, Detection detection, DerivativeOptions opts) {
  return detection == Detection::Parity ? sensitivity_parity(cfg, opts) : sensitivity_on_off(cfg, opts);
}

PhaseLimits snl_hl(const SU11Config& cfg) {
  const double n1 = displacement_photons(cfg.input_a);
  const double n2 = displacement_photons(cfg.input_b);
  const double nxi = squeezing_photons(cfg.input_b);
  const double nopa = 2.0 * std::pow(std::sinh(cfg.gain), 2);
  PhaseLimits l;
  l.total_photons = (n1 + n2 + nxi) * (1.0 + nopa) + nopa + 2.0 * std::sqrt(n1 * n2 * nopa * (nopa + 2.0));
  l.snl = 1.0 / std::sqrt(l.total_photons);
  l.hl = 1.0 / l.total_photons;
  return l;
}

std::vector<double> phase_scan_grid(const OptimizeOptions& opts) {
  if (opts.grid_points < 3) throw std::invalid_argument("optimizer grid needs at least 3 points");
  std::vector<double> g;
  for (int i = 1; i + 1 < opts.grid_points; ++i) g.push_back(kPi * i / (opts.grid_points - 1));
  for (int i = 0; i < opts.edge_points; ++i) {
    const double e = std::pow(10.0, -6.0 + 4.0 * i / std::max(1, opts.edge_points - 1));
    g.push_back(e);
    g.push_back(kPi - e);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

PhaseOptimum optimize_phi(const SU11Config& cfg, Detection detection, OptimizeOptions opts) {
  validate(cfg);
  const std::vector<double> grid = phase_scan_grid(opts);
  std::size_t best = grid.size();
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = objective(cfg, detection, grid[i], opts.derivative);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == grid.size()) throw NumericalError("all phase grid points are non-informative");

  // Golden-section search inside the bracketing grid cell.
  double lo = best == 0 ? 0.5 * grid[0] : grid[best - 1];
  double hi = best + 1 == grid.size() ? 0.5 * (grid[best] + kPi) : grid[best + 1];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - invphi * (hi - lo), d = lo + invphi * (hi - lo);
  double fc = objective(cfg, detection, c, opts.derivative), fd = objective(cfg, detection, d, opts.derivative);
  for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = objective(cfg, detection, c, opts.derivative);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = objective(cfg, detection, d, opts.derivative);
    }
  }
  PhaseOptimum out{grid[best], best_val};
  if (fc < out.delta_phi) out = {c, fc};
  if (fd < out.delta_phi) out = {d, fd};
  return out;
}

SU11Config with_variable(const SU11Config& base, SweepVariable variable, double x) {
  SU11Config cfg = base;
  if (variable == SweepVariable::Gain) {
    cfg.gain = x;
    return cfg;
  }
  StateParams& b = cfg.input_b;
  if (auto* d = std::get_if<DisplacedSqueezed>(&b)) {
    d->squeezing = x;
  } else if (auto* s = std::get_if<SqueezedVacuum>(&b)) {
    s->squeezing = x;
  } else if (auto* c = std::get_if<Coherent>(&b)) {
    b = DisplacedSqueezed{c->amplitude, c->phase, x, kDefaultSqueezeAngle};
  } else if (std::holds_alternative<Vacuum>(b)) {
    b = SqueezedVacuum{x, kDefaultSqueezeAngle};
  } else {
    throw std::invalid_argument("cannot sweep squeezing of a thermal input");
  }
  return cfg;
}

SensitivityCurve sweep_curve(const SU11Config& base, SweepVariable variable, std::span<const double> xs,
                             Detection detection, OptimizeOptions opts) {
  SensitivityCurve curve;
  curve.variable = variable;
  curve.detection = detection;
  curve.points.resize(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const SU11Config cfg = with_variable(base, variable, xs[i]);
    const PhaseOptimum opt = optimize_phi(cfg, detection, opts);
    const PhaseLimits lim = snl_hl(cfg);
    curve.points[i] = {xs[i], opt.delta_phi, lim.snl, lim.hl, opt.phi};
  });
  return curve;
}

}  // namespace qpb
