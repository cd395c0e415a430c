#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qpb/errors.hpp"
#include "qpb/metrology.hpp"
#include "qpb/photon_stats.hpp"
#include "support/oracles.hpp"

using namespace qpb;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

SU11Config vacuum_cfg(double g, double phi) {
  SU11Config c;
  c.gain = g;
  c.phase = phi;
  return c;
}

}  // namespace

TEST_CASE("interferometer is the identity at zero phase", "[metrology]") {
  for (double g : {0.0, 0.5, 1.5, 2.5}) {
    for (const auto& cfg : {su11_standard(16, 4, 1.0, g), su11_standard(0, 0, 2.0, g), vacuum_cfg(g, 0.0)}) {
      auto c = cfg;
      c.phase = 0.0;
      const auto in = su11_input(c);
      const auto out = su11_evolve(c);
      const double scale = std::max(1.0, in.cov().cwiseAbs().maxCoeff());
      REQUIRE(max_abs(out.mean() - in.mean()) < 1e-12 * std::cosh(2 * g) * std::max(1.0, in.mean().norm()));
      REQUIRE(max_abs(out.cov() - in.cov()) < 1e-12 * std::cosh(2 * g) * std::cosh(2 * g) * scale);
    }
  }
  const auto vac = su11_evolve(vacuum_cfg(1.0, 0.0));
  REQUIRE(max_abs(vac.cov() - 0.5 * Eigen::Matrix4d::Identity()) < 1e-12);
  for (double phi : {0.3, 1.0, 2.0}) REQUIRE(reduce_mode(su11_evolve(vacuum_cfg(1.0, phi)), Mode::B).mean().isZero());
}

TEST_CASE("parity signal", "[metrology]") {
  REQUIRE_THAT(parity_signal(vacuum_cfg(1.0, 0.0)), WithinAbs(1.0, 1e-12));
  SU11Config c;
  c.gain = 1.0;
  c.input_b = DisplacedSqueezed{2.0, 0.0, 1.0, 0.0};
  REQUIRE_THAT(parity_signal(c), WithinAbs(parity_expectation(make_single_mode(c.input_b)), 1e-10));
  const auto base = su11_standard(16, 4, 2.0, 1.0);
  for (double phi = 0.0; phi < 2 * oracle::pi; phi += 0.01) {
    auto s = base;
    s.phase = phi;
    const double v = parity_signal(s);
    REQUIRE(v <= 1.0 + 1e-12);
    REQUIRE(v >= -1.0 - 1e-12);
  }
}

TEST_CASE("non-informative parity points", "[metrology]") {
  // vacuum input: parity signal is even in phi, so phi = pi is stationary
  REQUIRE_FALSE(sensitivity_parity(vacuum_cfg(1.0, oracle::pi)).has_value());
  REQUIRE(sensitivity_parity(vacuum_cfg(1.0, 1.0)).has_value());
}

TEST_CASE("vacuum-input parity reaches the two-mode squeezed vacuum bound", "[metrology]") {
  for (double g : {0.5, 1.0, 2.0}) {
    const double n = 2.0 * std::pow(std::sinh(g), 2);
    const double bound = 1.0 / std::sqrt(n * (n + 2.0));
    const auto opt = optimize_phi(vacuum_cfg(g, 0.0), Detection::Parity);
    INFO("g=" << g << " dphi=" << opt.delta_phi << " bound=" << bound);
    REQUIRE_THAT(opt.delta_phi, WithinRel(bound, 0.02));
  }
}

TEST_CASE("on probability matches the photon pmf", "[metrology]") {
  REQUIRE_THAT(p_on(GaussianState::vacuum()), WithinAbs(0.0, 1e-15));
  REQUIRE_THAT(p_on(make_single_mode(Thermal{1.0})), WithinAbs(0.5, 1e-14));
  const std::vector<StateParams> states = {Vacuum{}, Thermal{0.3}, Thermal{4.0}, Coherent{1.0, 0.0},
                                           Coherent{2.5, 1.1}, SqueezedVacuum{0.8, 0.0}, SqueezedVacuum{1.5, 2.0},
                                           DisplacedSqueezed{2.0, 0.3, 0.7, 0.0}, DisplacedSqueezed{1.0, 1.0, 1.2, 2.5}};
  for (const auto& s : states) {
    INFO(describe(s));
    REQUIRE_THAT(p_on(make_single_mode(s)), WithinAbs(1.0 - pmf(s)[0], 1e-8));
  }
  const auto two = tensor(make_single_mode(Coherent{1.0, 0.0}), make_single_mode(Thermal{1.0}));
  REQUIRE_THAT(p_on(two), WithinAbs(1.0 - std::exp(-1.0) * 0.5, 1e-12));
}

TEST_CASE("on-off Fisher information", "[metrology]") {
  const auto base = su11_standard(16, 4, 2.0, 1.0);
  for (double phi = 0.05; phi < oracle::pi; phi += 0.1) {
    auto c = base;
    c.phase = phi;
    const auto f = on_off_fisher(c);
    REQUIRE(f.both_outcomes >= f.on_term);
    const double p = on_probability(c);
    REQUIRE_THAT(f.both_outcomes * (1 - p), WithinRel(f.on_term, 1e-9));
  }
  // vacuum in, phi = 0: P_on = 0 exactly, so the point is degenerate
  REQUIRE_FALSE(sensitivity_on_off(vacuum_cfg(1.0, 0.0)).has_value());
}

TEST_CASE("shot-noise and Heisenberg limits", "[metrology]") {
  for (double g : {0.3, 1.0}) {
    const double n = 2.0 * std::pow(std::sinh(g), 2);
    const auto l = snl_hl(vacuum_cfg(g, 0.0));
    REQUIRE_THAT(l.snl, WithinRel(1.0 / std::sqrt(n), 1e-12));
    REQUIRE_THAT(l.hl, WithinRel(1.0 / n, 1e-12));
  }
  const double n1 = 16, n2 = 4, r = 2, g = 2;
  const double nxi = std::pow(std::sinh(r), 2), nopa = 2 * std::pow(std::sinh(g), 2);
  const double total = (n1 + n2 + nxi) * (1 + nopa) + nopa + 2 * std::sqrt(n1 * n2 * nopa * (nopa + 2));
  const auto l = snl_hl(su11_standard(n1, n2, r, g));
  REQUIRE_THAT(l.total_photons, WithinRel(total, 1e-12));
  REQUIRE(l.total_photons > 1e3);
  REQUIRE_THAT(l.hl, WithinRel(l.snl * l.snl, 1e-12));
}

TEST_CASE("phase optimization", "[metrology]") {
  const auto cfg = su11_standard(16, 4, 1.0, 1.0);
  OptimizeOptions opts;
  opts.grid_points = 201;
  for (auto det : {Detection::Parity, Detection::OnOff}) {
    const auto best = optimize_phi(cfg, det, opts);
    REQUIRE(best.phi > 0.0);
    REQUIRE(best.phi < oracle::pi);
    for (double phi : phase_scan_grid(opts)) {
      auto c = cfg;
      c.phase = phi;
      const auto d = sensitivity(c, det, opts.derivative);
      if (d) REQUIRE(best.delta_phi <= *d * (1 + 1e-12));
    }
    // phi -> 2pi - phi mirror
    auto m = cfg;
    m.phase = 2 * oracle::pi - best.phi;
    const auto mirrored = sensitivity(m, det, opts.derivative);
    REQUIRE(mirrored.has_value());
    REQUIRE_THAT(*mirrored, WithinRel(best.delta_phi, 1e-6));
  }
  REQUIRE_THROWS_AS(optimize_phi(vacuum_cfg(0.0, 0.0), Detection::Parity), NumericalError);
}

TEST_CASE("sweep curves", "[metrology]") {
  OptimizeOptions opts;
  opts.grid_points = 401;
  const std::vector<double> rs = {0.5, 1.0, 1.5};
  const auto a = sweep_curve(su11_standard(16, 4, 0, 2), SweepVariable::Squeezing, rs, Detection::Parity, opts);
  const auto b = sweep_curve(su11_standard(16, 4, 0, 2), SweepVariable::Squeezing, rs, Detection::Parity, opts);
  REQUIRE(a.label() == "r");
  REQUIRE(a.points.size() == rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    REQUIRE(a.points[i].x == rs[i]);
    REQUIRE(a.points[i].delta_phi == b.points[i].delta_phi);
    REQUIRE(a.points[i].delta_phi >= a.points[i].hl);
    REQUIRE_THAT(a.points[i].hl, WithinRel(a.points[i].snl * a.points[i].snl, 1e-12));
  }
  const auto w = with_variable(su11_standard(16, 4, 1, 2), SweepVariable::Gain, 0.7);
  REQUIRE(w.gain == 0.7);
  REQUIRE_THROWS_AS(validate(vacuum_cfg(-1.0, 0.0)), std::invalid_argument);
}
