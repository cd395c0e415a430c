#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qpb/gaussian.hpp"
#include "qpb/photon_stats.hpp"
#include "support/oracles.hpp"

using namespace qpb;
using Catch::Matchers::WithinAbs;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

GaussianState random_two_mode(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto angle = [&] { return 2.0 * oracle::pi * u(gen) * 0.999; };
  const StateParams a = DisplacedSqueezed{2.0 * u(gen), angle(), u(gen), angle()};
  const StateParams b = Thermal{2.0 * u(gen)};
  return tensor(make_single_mode(a), make_single_mode(b));
}

}  // namespace

TEST_CASE("single-mode inputs match the covariance tables", "[gaussian]") {
  SECTION("vacuum") {
    const auto s = make_single_mode(Vacuum{});
    REQUIRE(s.mean().isZero());
    REQUIRE(max_abs(s.cov() - 0.5 * Eigen::Matrix2d::Identity()) == 0.0);
  }
  SECTION("thermal nbar=1") {
    const auto s = make_single_mode(Thermal{1.0});
    REQUIRE(max_abs(s.cov() - 1.5 * Eigen::Matrix2d::Identity()) < 1e-15);
  }
  SECTION("dsv with r=0 is coherent") {
    const auto d = make_single_mode(DisplacedSqueezed{2.0, 0.0, 0.0, 0.0});
    const auto c = make_single_mode(Coherent{2.0, 0.0});
    REQUIRE(max_abs(d.mean() - c.mean()) <= 1e-14);
    REQUIRE(max_abs(d.cov() - c.cov()) <= 1e-14);
    REQUIRE_THAT(d.mean()[0], WithinAbs(2.0, 1e-15));
  }
  SECTION("dsv with alpha=0 is squeezed vacuum; thermal(0) is vacuum") {
    const auto d = make_single_mode(DisplacedSqueezed{0.0, 1.0, 0.7, 2.0});
    const auto s = make_single_mode(SqueezedVacuum{0.7, 2.0});
    REQUIRE(max_abs(d.cov() - s.cov()) <= 1e-14);
    REQUIRE(d.mean().isZero());
    REQUIRE(max_abs(make_single_mode(Thermal{0.0}).cov() - make_single_mode(Vacuum{}).cov()) == 0.0);
  }
  SECTION("squeezed vacuum saturates the uncertainty bound") {
    const auto s = make_single_mode(SqueezedVacuum{1.3, 0.4});
    REQUIRE_THAT(s.cov().determinant(), WithinAbs(0.25, 1e-12));
    REQUIRE_THAT(s.symplectic_eigenvalues()[0], WithinAbs(1.0, 1e-9));
  }
  SECTION("out-of-range parameters") {
    REQUIRE_THROWS_AS(make_single_mode(Thermal{-1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_single_mode(Coherent{1.0, 7.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_single_mode(SqueezedVacuum{-0.1, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("state construction enforces invariants", "[gaussian]") {
  Eigen::Matrix2d bad = 0.1 * Eigen::Matrix2d::Identity();
  REQUIRE_THROWS_AS(GaussianState(Eigen::Vector2d::Zero(), bad), std::invalid_argument);
  Eigen::Matrix2d asym;
  asym << 1, 0.2, 0.1, 1;
  REQUIRE_THROWS_AS(GaussianState(Eigen::Vector2d::Zero(), asym), std::invalid_argument);
  REQUIRE_THROWS_AS(GaussianState(Eigen::Vector3d::Zero(), Eigen::Matrix3d::Identity()), std::invalid_argument);
}

TEST_CASE("tensor product", "[gaussian]") {
  const auto v = tensor(GaussianState::vacuum(), GaussianState::vacuum());
  REQUIRE(max_abs(v.cov() - 0.5 * Eigen::Matrix4d::Identity()) == 0.0);
  const auto c = tensor(make_single_mode(Coherent{2.0, 0.0}), GaussianState::vacuum());
  REQUIRE(max_abs(c.mean() - Eigen::Vector4d(2, 0, 0, 0)) < 1e-15);
  const auto t = tensor(make_single_mode(Thermal{1.0}), make_single_mode(SqueezedVacuum{0.5, 1.0}));
  const auto nu = t.symplectic_eigenvalues();
  REQUIRE_THAT(nu[0], WithinAbs(1.0, 1e-10));
  REQUIRE_THAT(nu[1], WithinAbs(3.0, 1e-10));
}

TEST_CASE("optical elements", "[gaussian]") {
  const Eigen::Matrix4d w = oracle::omega4();
  SECTION("beamsplitter") {
    REQUIRE(max_abs(beamsplitter(1.0).matrix() - Eigen::Vector4d(1, 1, -1, -1).asDiagonal().toDenseMatrix()) == 0.0);
    const Eigen::MatrixXd b = beamsplitter(0.3).matrix();
    REQUIRE(max_abs(b * w * b.transpose() - w) < 1e-14);
    const auto out = apply(beamsplitter(0.5), tensor(make_single_mode(Coherent{2.0, 0.0}), GaussianState::vacuum()));
    REQUIRE(max_abs(out.mean() - Eigen::Vector4d(std::sqrt(2.0), 0, std::sqrt(2.0), 0)) < 1e-14);
    REQUIRE_THROWS_AS(beamsplitter(1.5), std::invalid_argument);
  }
  SECTION("two-mode squeezer") {
    REQUIRE(max_abs(two_mode_squeezer(0.0, 0.3).matrix() - Eigen::Matrix4d::Identity()) == 0.0);
    for (double g : {0.1, 0.8, 2.5}) {
      const Eigen::MatrixXd p = two_mode_squeezer(g, 0.0).matrix() * two_mode_squeezer(g, oracle::pi).matrix();
      REQUIRE(max_abs(p - Eigen::Matrix4d::Identity()) < 1e-12 * std::cosh(2 * g));
    }
    const double g = 1.1;
    const auto th = reduce_mode(apply(two_mode_squeezer(g, 0.4), GaussianState::vacuum(2)), Mode::B);
    const double n = std::pow(std::sinh(g), 2);
    REQUIRE(max_abs(th.cov() - (n + 0.5) * Eigen::Matrix2d::Identity()) < 1e-12);
    REQUIRE_THROWS_AS(two_mode_squeezer(-1.0, 0.0), std::invalid_argument);
  }
  SECTION("phase shifts") {
    REQUIRE(max_abs(phase_shift(PhaseTarget::Both, 0.0).matrix() - Eigen::Matrix4d::Identity()) == 0.0);
    REQUIRE(max_abs(phase_shift(PhaseTarget::A, 2 * oracle::pi).matrix() - Eigen::Matrix4d::Identity()) < 1e-12);
    const GaussianState s(Eigen::Vector4d(1, 0, 1, 0), 0.5 * Eigen::Matrix4d::Identity());
    const auto out = apply(phase_shift(PhaseTarget::Both, oracle::pi), s);
    REQUIRE(max_abs(out.mean() - Eigen::Vector4d(-1, 0, -1, 0)) < 1e-15);
    const auto b = apply(phase_shift(PhaseTarget::B, oracle::pi / 2), s);
    REQUIRE(max_abs(b.mean() - Eigen::Vector4d(1, 0, 0, 1)) < 1e-15);
  }
  SECTION("non-symplectic matrices are rejected") {
    REQUIRE_THROWS_AS(SymplecticTransform(2.0 * Eigen::MatrixXd::Identity(4, 4), "scale"), std::invalid_argument);
  }
}

TEST_CASE("random elements are symplectic and preserve symplectic spectra", "[gaussian]") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Eigen::Matrix4d w = oracle::omega4();
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = compose(two_mode_squeezer(2.0 * u(gen), 6.0 * u(gen)),
                           compose(phase_shift(PhaseTarget::A, 6.0 * u(gen)), beamsplitter(u(gen))));
    const Eigen::MatrixXd m = s.matrix();
    REQUIRE(max_abs(m * w * m.transpose() - w) < 1e-10 * std::max(1.0, m.squaredNorm()));
    const auto in = random_two_mode(gen);
    const auto out = apply(s, in);
    const auto a = oracle::two_mode_symplectic(in.cov());
    const auto b = oracle::two_mode_symplectic(out.cov());
    const auto nu_in = in.symplectic_eigenvalues();
    const auto nu_out = out.symplectic_eigenvalues();
    for (int k = 0; k < 2; ++k) {
      REQUIRE_THAT(nu_in[k], WithinAbs(a[static_cast<std::size_t>(k)], 1e-9));
      REQUIRE_THAT(nu_out[k], WithinAbs(nu_in[k], 1e-9 * std::max(1.0, nu_in[k])));
      REQUIRE_THAT(b[static_cast<std::size_t>(k)], WithinAbs(a[static_cast<std::size_t>(k)], 1e-7 * std::max(1.0, a[k])));
    }
  }
}

TEST_CASE("composition", "[gaussian]") {
  const auto s = two_mode_squeezer(0.7, 0.2);
  REQUIRE(max_abs(compose(SymplecticTransform::identity(2), s).matrix() - s.matrix()) == 0.0);
  const auto a = beamsplitter(0.2), b = phase_shift(PhaseTarget::B, 1.0), c = two_mode_squeezer(0.3, 1.0);
  REQUIRE(max_abs(compose(compose(a, b), c).matrix() - compose(a, compose(b, c)).matrix()) < 1e-14);
  const auto bs2 = compose(beamsplitter(0.5), beamsplitter(0.5));
  REQUIRE(max_abs(bs2.matrix() - Eigen::Matrix4d::Identity()) < 1e-15);
  const auto th = tensor(make_single_mode(Thermal{2.0}), make_single_mode(Thermal{2.0}));
  REQUIRE(max_abs(apply(bs2, th).cov() - th.cov()) < 1e-14);
  REQUIRE_THROWS_AS(apply(SymplecticTransform::identity(1), th), std::invalid_argument);
}

TEST_CASE("reduce_mode", "[gaussian]") {
  const auto s = tensor(GaussianState::vacuum(), make_single_mode(Thermal{1.0}));
  REQUIRE(max_abs(reduce_mode(s, Mode::B).cov() - make_single_mode(Thermal{1.0}).cov()) == 0.0);
  const auto cc = tensor(make_single_mode(Coherent{1.5, 0.3}), make_single_mode(Coherent{0.5, 1.0}));
  REQUIRE(max_abs(reduce_mode(cc, Mode::A).mean() - make_single_mode(Coherent{1.5, 0.3}).mean()) == 0.0);
  REQUIRE_THROWS_AS(reduce_mode(GaussianState::vacuum(1), Mode::A), std::invalid_argument);
}

TEST_CASE("attenuation reproduces the loss-channel photon moments", "[gaussian]") {
  const auto s = make_single_mode(DisplacedSqueezed{2.0, 0.4, 0.6, 0.0});
  REQUIRE(max_abs(attenuate(s, 1.0).cov() - s.cov()) == 0.0);
  REQUIRE(max_abs(attenuate(s, 0.0).cov() - 0.5 * Eigen::Matrix2d::Identity()) < 1e-15);
  REQUIRE(attenuate(s, 0.0).mean().isZero());
  REQUIRE_THROWS_AS(attenuate(s, 1.1), std::invalid_argument);
  for (double alpha : {0.5, 2.0, 5.0})
    for (double phi : {0.0, 0.9, oracle::pi / 2})
      for (double r : {0.3, 1.0})
        for (double eta : {0.0, 0.25, 0.7, 1.0}) {
          const auto st = attenuate(make_single_mode(DisplacedSqueezed{alpha, phi, r, 0.0}), eta);
          const auto [n, v] = oracle::gaussian_photon_moments(st.mean(), st.cov());
          const double nn = alpha * alpha + std::pow(std::sinh(r), 2);
          const double vv = oracle::dsv_variance(alpha, phi, r);
          REQUIRE_THAT(n, WithinAbs(eta * nn, 1e-9 * std::max(1.0, nn)));
          REQUIRE_THAT(v, WithinAbs(eta * eta * vv + eta * (1 - eta) * nn, 1e-9 * std::max(1.0, vv)));
        }
}

TEST_CASE("wigner functions and parity", "[gaussian]") {
  const auto vac = GaussianState::vacuum();
  REQUIRE_THAT(wigner_gaussian(vac, Eigen::Vector2d::Zero()), WithinAbs(2.0 / oracle::pi, 1e-15));
  const auto coh = make_single_mode(Coherent{1.3, 0.8});
  REQUIRE_THAT(wigner_gaussian(coh, coh.mean()), WithinAbs(2.0 / oracle::pi, 1e-15));

  SECTION("normalization by quadrature") {
    const auto s = make_single_mode(DisplacedSqueezed{1.0, 0.5, 0.5, 1.0});
    const double h = 0.02;
    double sum = 0.0;
    for (double x = -6; x <= 6; x += h)
      for (double p = -6; p <= 6; p += h) sum += wigner_gaussian(s, Eigen::Vector2d(x, p));
    REQUIRE_THAT(sum * h * h, WithinAbs(1.0, 1e-3));
  }
  SECTION("fock wigner") {
    for (double x = -2; x <= 2; x += 0.25)
      for (double p = -2; p <= 2; p += 0.25)
        REQUIRE_THAT(wigner_fock(0, x, p), WithinAbs(wigner_gaussian(vac, Eigen::Vector2d(x, p)), 1e-12));
    REQUIRE_THAT(wigner_fock(3, 0, 0), WithinAbs(-2.0 / oracle::pi, 1e-15));
    for (int n : {1, 2, 4, 5}) {
      int changes = 0;
      double prev = wigner_fock(n, 0, 0);
      for (double rad = 1e-3; rad < 4.0; rad += 1e-3) {
        const double v = wigner_fock(n, rad, 0);
        if ((v < 0) != (prev < 0)) ++changes;
        prev = v;
      }
      REQUIRE(changes == n);
    }
  }
  SECTION("parity") {
    REQUIRE_THAT(parity_expectation(vac), WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(parity_expectation(make_single_mode(Thermal{1.0})), WithinAbs(1.0 / 3.0, 1e-14));
    REQUIRE_THAT(parity_expectation(make_single_mode(Coherent{1.0, 0.0})), WithinAbs(std::exp(-2.0), 1e-14));
    const double alt = oracle::alternating_sum([](int n) { return oracle::bose_einstein(3.0, n); }, 400);
    REQUIRE_THAT(parity_expectation(make_single_mode(Thermal{3.0})), WithinAbs(alt, 1e-12));
  }
}

TEST_CASE("parity equals the alternating pmf sum", "[gaussian]") {
  const std::vector<StateParams> states = {Vacuum{}, Thermal{0.5}, Thermal{1.0}, Thermal{3.0},
                                           Coherent{0.5, 0.0}, Coherent{1.0, 1.0}, Coherent{2.0, 0.0},
                                           SqueezedVacuum{0.5, 0.0}, SqueezedVacuum{1.0, 1.0},
                                           DisplacedSqueezed{2.0, 0.0, 0.5, 0.0}, DisplacedSqueezed{1.5, 0.7, 0.8, 2.0}};
  for (const auto& s : states) {
    const auto d = pmf(s);
    double alt = 0.0;
    for (int n = 0; n <= d.cutoff; ++n) alt += (n % 2 ? -1.0 : 1.0) * d[n];
    INFO(describe(s));
    REQUIRE_THAT(parity_expectation(make_single_mode(s)), WithinAbs(alt, 1e-8));
  }
}
