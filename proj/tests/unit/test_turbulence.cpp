#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

#include "qpb/rng.hpp"
#include "qpb/turbulence.hpp"
#include "support/oracles.hpp"

using namespace qpb;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const GridSpec kGrid{128, 128, 8e-3};

TurbulenceSpec paper_spec(double paper_cn2) {
  TurbulenceSpec s;
  s.cn2 = cn2_from_paper_units(paper_cn2);
  return s;
}

double variance(const Grid2D<double>& g) {
  double s = 0.0, s2 = 0.0;
  for (double v : g.values()) {
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(g.size());
  return s2 / n - (s / n) * (s / n);
}

}  // namespace

TEST_CASE("Fried parameter", "[turbulence]") {
  TurbulenceSpec s;
  s.cn2 = 1e-14;
  s.distance = 1000.0;
  const double k = 2 * oracle::pi / 633e-9;
  REQUIRE_THAT(fried_parameter(s), WithinRel(std::pow(0.423 * k * k * 1e-14 * 1000.0, -0.6), 1e-12));
  REQUIRE_THAT(fried_parameter(s), WithinAbs(0.027, 5e-4));
  auto t = s;
  t.distance *= 2;
  REQUIRE_THAT(fried_parameter(t), WithinRel(fried_parameter(s) * std::pow(2.0, -0.6), 1e-12));
  t = s;
  t.cn2 *= 3;
  REQUIRE(fried_parameter(t) < fried_parameter(s));
  REQUIRE_THAT(cn2_from_paper_units(1.0), WithinRel(1e-11, 1e-15));
  REQUIRE_THAT(cn2_to_paper_units(cn2_from_paper_units(60.0)), WithinRel(60.0, 1e-15));
  t.cn2 = 0.0;
  REQUIRE_THROWS_AS(fried_parameter(t), std::invalid_argument);
}

TEST_CASE("phase screens", "[turbulence]") {
  const auto zero = kolmogorov_screen(TurbulenceSpec{}, kGrid, 1);
  for (double v : zero.phase.values()) REQUIRE(v == 0.0);

  const auto a = kolmogorov_screen(paper_spec(60), kGrid, 3, 2);
  const auto b = kolmogorov_screen(paper_spec(60), kGrid, 3, 2);
  REQUIRE(a.phase.values() == b.phase.values());
  const double mean = std::accumulate(a.phase.values().begin(), a.phase.values().end(), 0.0) / a.phase.size();
  REQUIRE(std::abs(mean) < 1e-12);
  REQUIRE(variance(a.phase) > 0.0);

  REQUIRE_THROWS_AS(kolmogorov_screen(paper_spec(60), GridSpec{64, 64, 1e-3}, 1), std::invalid_argument);
  TurbulenceSpec bad;
  bad.cn2 = -1.0;
  REQUIRE_THROWS_AS(kolmogorov_screen(bad, kGrid, 1), std::invalid_argument);
}

TEST_CASE("screen variance grows with turbulence strength", "[turbulence]") {
  double prev = 0.0;
  for (double c : {30.0, 60.0, 90.0}) {
    double v = 0.0;
    for (int s = 0; s < 200; ++s) v += variance(kolmogorov_screen(paper_spec(c), kGrid, 11, static_cast<std::uint64_t>(s)).phase);
    REQUIRE(v > prev);
    prev = v;
  }
}

TEST_CASE("applying screens", "[turbulence]") {
  const auto f = lg_field({2, 0, {}}, kGrid);
  const auto zero = kolmogorov_screen(TurbulenceSpec{}, kGrid, 1);
  const auto same = apply_screen(f, zero);
  REQUIRE(std::abs(overlap(f, same) - 1.0) < 1e-14);

  const auto scr = kolmogorov_screen(paper_spec(90), kGrid, 5);
  const auto d = apply_screen(f, scr);
  REQUIRE_THAT(d.norm(), WithinAbs(1.0, 1e-12));
  for (int i = 0; i < kGrid.rows; ++i)
    for (int j = 0; j < kGrid.cols; ++j) REQUIRE(std::abs(std::abs(d(i, j)) - std::abs(f(i, j))) < 1e-15);
  REQUIRE(std::abs(overlap(f, d)) < 1.0);
  REQUIRE_THROWS_AS(apply_screen(lg_field({0, 0, {}}, GridSpec{64, 64, 8e-3}), scr), std::invalid_argument);
}

TEST_CASE("Fresnel propagator", "[turbulence]") {
  const auto f = lg_field({1, 0, {}}, kGrid);
  const FresnelPropagator p(kGrid, 633e-9, 2.5);
  const auto out = p.forward(f.samples());
  double e = 0.0;
  for (const auto& v : out.values()) e += std::norm(v);
  REQUIRE_THAT(e, WithinAbs(1.0, 1e-12));
  const auto back = p.backward(out);
  for (std::size_t i = 0; i < back.size(); ++i) REQUIRE(std::abs(back[i] - f.samples()[i]) < 1e-7);
  const FresnelPropagator unit(kGrid, 633e-9, 0.0);
  const auto same = unit.forward(f.samples());
  for (std::size_t i = 0; i < same.size(); ++i) REQUIRE(std::abs(same[i] - f.samples()[i]) < 1e-15);
}

TEST_CASE("radial spectra and the Cn2 estimator", "[turbulence]") {
  const auto src = lg_field({0, 0, {}}, kGrid);
  const FresnelPropagator prop(kGrid, 633e-9, 2.5);
  Grid2D<double> flat(kGrid.rows, kGrid.cols, 0.0);
  const auto img = observe_intensity(src, flat, prop);
  auto scaled = img;
  for (auto& v : scaled.values()) v *= 7.0;
  const auto s1 = radial_power_spectrum(img, 16), s2 = radial_power_spectrum(scaled, 16);
  REQUIRE(s1.size() == 16);
  for (std::size_t i = 0; i < s1.size(); ++i) REQUIRE_THAT(s2[i], WithinRel(s1[i], 1e-12));

  Cn2EstimatorConfig cfg;
  cfg.candidates = {cn2_from_paper_units(30), cn2_from_paper_units(60), cn2_from_paper_units(90)};
  cfg.templates = 8;
  std::vector<Grid2D<double>> calm(20, img);
  REQUIRE(estimate_cn2(calm, src, cfg) == cfg.candidates.front());
  std::vector<Grid2D<double>> calm_scaled(20, scaled);
  REQUIRE(estimate_cn2(calm_scaled, src, cfg) == cfg.candidates.front());
  std::vector<Grid2D<double>> few(5, img);
  REQUIRE_THROWS_AS(estimate_cn2(few, src, cfg), std::invalid_argument);
}

TEST_CASE("phase retrieval without turbulence", "[turbulence]") {
  const auto target = lg_field({3, 0, {}}, kGrid);
  const FresnelPropagator prop(kGrid, 633e-9, 2.5);
  Grid2D<double> zero(kGrid.rows, kGrid.cols, 0.0);
  const auto obs = observe_intensity(target, zero, prop);
  const auto r = gdo_correct(obs, target, prop, zero);
  REQUIRE(r.mse.front() < 1e-20);
  REQUIRE(r.converged);
  const auto corrected = apply_phase(target, r.mask);
  REQUIRE(std::norm(overlap(target, corrected)) > 1 - 1e-9);
}

TEST_CASE("mutual information", "[turbulence]") {
  REQUIRE(mutual_information(Eigen::MatrixXd::Identity(8, 8)) == 3.0);
  REQUIRE_THAT(mutual_information(Eigen::MatrixXd::Constant(6, 6, 1.0 / 6)), WithinAbs(0.0, 1e-15));
  Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 5; ++i) perm((i + 2) % 5, i) = 1.0;
  REQUIRE_THAT(mutual_information(perm), WithinAbs(std::log2(5.0), 1e-14));

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Eigen::MatrixXd m(7, 7);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) m(i, j) = u(gen) < 0.3 ? 0.0 : u(gen);
    for (int j = 0; j < 7; ++j) {
      if (m.col(j).sum() == 0.0) m(j, j) = 1.0;
      m.col(j) /= m.col(j).sum();
    }
    const double mi = mutual_information(m);
    REQUIRE_THAT(mi, WithinAbs(oracle::mutual_information(m), 1e-12));
    REQUIRE(mi >= -1e-12);
    REQUIRE(mi <= std::log2(7.0) + 1e-12);
  }
  REQUIRE_THROWS_AS(mutual_information(Eigen::MatrixXd::Identity(2, 3)), std::invalid_argument);
}

TEST_CASE("crosstalk matrices", "[turbulence]") {
  const std::vector<int> alphabet = {-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5};
  const GridSpec grid{256, 256, 8e-3};
  const auto ideal = crosstalk_matrix(alphabet, BeamGeometry{}, grid, [](const ComplexField& f, std::size_t) { return f; });
  REQUIRE(ideal.size() == 11);
  for (int s = 0; s < 11; ++s) {
    REQUIRE_THAT(ideal.probs.col(s).sum(), WithinAbs(1.0, 1e-9));
    REQUIRE(1.0 - ideal.probs(s, s) < 0.02);
  }
  const auto scr = kolmogorov_screen(paper_spec(90), grid, 4);
  const auto turb = crosstalk_matrix(alphabet, BeamGeometry{}, grid,
                                     [&](const ComplexField& f, std::size_t) { return apply_screen(f, scr); });
  for (int s = 0; s < 11; ++s) REQUIRE_THAT(turb.probs.col(s).sum(), WithinAbs(1.0, 1e-9));
  REQUIRE(turb.probs.diagonal().mean() < ideal.probs.diagonal().mean());
  REQUIRE(mutual_information(turb) < mutual_information(ideal));
  const std::vector<int> none;
  REQUIRE_THROWS_AS(crosstalk_matrix(none, BeamGeometry{}, grid, [](const ComplexField& f, std::size_t) { return f; }),
                    std::invalid_argument);
}
