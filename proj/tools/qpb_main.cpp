// qpb: command-line front end. Each subcommand writes CSV files plus a
// <command>_manifest.json into --out-dir.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error or unwritable output.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qpb/camera.hpp"
#include "qpb/channel.hpp"
#include "qpb/errors.hpp"
#include "qpb/io.hpp"
#include "qpb/metrology.hpp"
#include "qpb/photon_stats.hpp"
#include "qpb/source_id.hpp"
#include "qpb/tomography.hpp"
#include "qpb/turbulence.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Thrown for bad flag combinations or unusable output paths.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Run {
  std::string command;
  fs::path out_dir = ".";
  std::uint64_t seed = 1;
  json flags = json::object();
  std::vector<std::string> outputs;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out_dir / name;
  }

  void prepare() {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw UsageError(fmt::format("cannot create output directory '{}'", out_dir.string()));
  }

  void write_manifest() const {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json m;
    m["command"] = command;
    m["flags"] = flags;
    m["seed"] = seed;
    m["outputs"] = outputs;
    m["version"] = QPB_VERSION;
    m["timestamp"] = stamp;
    std::ofstream out(out_dir / (command + "_manifest.json"), std::ios::binary);
    out << m.dump(2) << '\n';
    if (!out) throw UsageError("cannot write manifest");
  }
};

// CSV with string cells; numbers go through csv_number.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
  template <class... Cells>
  void row(const Cells&... cells) {
    rows_.push_back({cell(cells)...});
  }
  void write(const fs::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError(fmt::format("cannot open '{}' for writing", path.string()));
    auto line = [&](const std::vector<std::string>& v) {
      for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
      out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    if (!out) throw UsageError(fmt::format("failed writing '{}'", path.string()));
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return qpb::csv_number(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_numeric(Run& run, const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
  const auto path = run.file(name);
  try {
    qpb::write_csv(path, header, rows);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw UsageError("--points must be >= 1");
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return v;
}

void add_common(CLI::App* sub, Run& run) {
  sub->add_option("--out-dir", run.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--seed", run.seed, "Random seed")->capture_default_str();
}

// ---------------------------------------------------------------- states

struct StatesArgs {
  std::string family = "dsv";
  double nbar = 1.0, alpha = 0.0, phi = 0.0, r = 0.0, theta = 0.0;
  int cutoff = -1;
};

void run_states(Run& run, const StatesArgs& a) {
  qpb::StateParams p;
  if (a.family == "vacuum")
    p = qpb::Vacuum{};
  else if (a.family == "thermal")
    p = qpb::Thermal{a.nbar};
  else if (a.family == "coherent")
    p = qpb::Coherent{a.alpha, a.phi};
  else if (a.family == "sv")
    p = qpb::SqueezedVacuum{a.r, a.theta};
  else
    p = qpb::DisplacedSqueezed{a.alpha, a.phi, a.r, a.theta};
  qpb::validate(p);
  const auto d = qpb::pmf(p, a.cutoff >= 0 ? qpb::CutoffPolicy::fixed(a.cutoff) : qpb::CutoffPolicy::adaptive());
  std::vector<std::vector<double>> rows;
  for (int n = 0; n <= d.cutoff; ++n) rows.push_back({double(n), d[n]});
  write_numeric(run, "states_pmf.csv", {"n", "probability"}, rows);
  const auto m = qpb::moments(d);
  const double parity = qpb::parity_expectation(qpb::make_single_mode(p));
  write_numeric(run, "states_moments.csv", {"mean", "variance", "mandel_q", "parity", "cutoff", "tail_mass"},
                {{m.mean, m.variance, m.mandel_q, parity, double(d.cutoff), d.tail_mass}});
  fmt::print("{}: mean {:.6g}, variance {:.6g}, Q {:.6g}, cutoff {}\n", qpb::describe(p), m.mean, m.variance, m.mandel_q,
             d.cutoff);
}

// ---------------------------------------------------------------- su11

struct Su11Args {
  std::string detection = "parity", vary = "r";
  double n1 = 16, n2 = 4, g = 2, r = 2, theta = qpb::kDefaultSqueezeAngle;
  double from = 0, to = 3;
  int points = 31, grid_points = 2001;
};

void run_su11(Run& run, const Su11Args& a) {
  const auto det = a.detection == "parity" ? qpb::Detection::Parity : qpb::Detection::OnOff;
  const auto var = a.vary == "r" ? qpb::SweepVariable::Squeezing : qpb::SweepVariable::Gain;
  const auto base = qpb::su11_standard(a.n1, a.n2, a.r, a.g, a.theta);
  qpb::validate(base);
  qpb::OptimizeOptions opts;
  opts.grid_points = a.grid_points;
  const auto xs = linspace(a.from, a.to, a.points);
  const auto curve = qpb::sweep_curve(base, var, xs, det, opts);
  std::vector<std::vector<double>> rows;
  for (const auto& p : curve.points) rows.push_back({p.x, p.phi_star, p.delta_phi, p.snl, p.hl});
  write_numeric(run, fmt::format("su11_{}_{}.csv", a.detection, a.vary), {curve.label(), "phi_star", "delta_phi", "snl", "hl"},
                rows);
  for (const auto& p : curve.points)
    fmt::print("{}={:<6.3g} phi*={:.6f} dphi={:.6g} snl={:.6g} hl={:.6g}\n", curve.label(), p.x, p.phi_star, p.delta_phi,
               p.snl, p.hl);
}

// ---------------------------------------------------------------- camera

struct CameraArgs {
  qpb::CameraConfig cfg;
  bool weighted = false;
};

void run_camera(Run& run, CameraArgs a) {
  a.cfg.seed = run.seed;
  const auto weighting = a.weighted ? qpb::FitWeighting::InverseVariance : qpb::FitWeighting::Ordinary;
  Table fits({"phase", "a0", "a1", "a2", "analytic_a1", "analytic_a2"});
  qpb::QuadraticFit q[2];
  const char* names[2] = {"camera_squeezed.csv", "camera_antisqueezed.csv"};
  for (int k = 0; k < 2; ++k) {
    a.cfg.phase = k == 0 ? 0.0 : 0.5 * std::numbers::pi;
    const auto pts = qpb::integrate_pixels(qpb::simulate_frames(a.cfg));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < pts.size(); ++i) rows.push_back({double(i + 1), pts[i].mean, pts[i].variance, pts[i].mean});
    write_numeric(run, names[k], {"group_index", "mean", "variance", "shot_noise"}, rows);
    q[k] = qpb::fit_variance_curve(pts, weighting);
    const auto an = qpb::analytic_variance_curve(a.cfg.pump_photons, a.cfg.squeezed_photons, a.cfg.phase);
    fits.row(a.cfg.phase, q[k].a0, q[k].a1, q[k].a2, an.a1, an.a2);
    fmt::print("phase {:.4f}: var = {:.6g} + {:.6g} m + {:.6g} m^2 (analytic a1 {:.6g}, a2 {:.6g})\n", a.cfg.phase, q[k].a0,
               q[k].a1, q[k].a2, an.a1, an.a2);
  }
  fits.write(run.file("camera_fit.csv"));
  const auto est = qpb::estimate_squeezing(q[0], q[1], a.cfg.pump_photons);
  write_numeric(run, "camera_estimate.csv", {"squeezed_photons", "squeezing", "residual"},
                {{est.squeezed_photons, est.squeezing, est.residual}});
  fmt::print("estimated n_s = {:.6g}, r = {:.6g}\n", est.squeezed_photons, est.squeezing);
}

// ---------------------------------------------------------------- discriminate

struct DiscriminateArgs {
  std::vector<double> nbar = {0.40, 0.53, 0.67, 0.77};
  std::vector<int> sizes = {10, 20, 40, 80, 160};
  int trials = 10000;
};

void run_discriminate(Run& run, const DiscriminateArgs& a) {
  if (a.trials < 10) throw UsageError("--trials must be at least 10 (error bars use 10 subsets)");
  std::vector<std::vector<double>> rows;
  for (double nb : a.nbar) {
    const auto c = qpb::accuracy_curve(nb, a.sizes, a.trials, run.seed);
    for (std::size_t i = 0; i < c.sample_sizes.size(); ++i) {
      rows.push_back({nb, double(c.sample_sizes[i]), c.accuracy[i], c.errbar[i]});
      fmt::print("n={:.2f} k={:<5d} accuracy {:.4f} +- {:.4f}\n", nb, c.sample_sizes[i], c.accuracy[i], c.errbar[i]);
    }
  }
  write_numeric(run, "discriminate.csv", {"n_bar", "k", "accuracy", "errbar"}, rows);
}

// ---------------------------------------------------------------- turbulence / tomography

struct ChannelArgs {
  double cn2 = -1.0, cn2_paper = 60.0;
  std::vector<double> candidates_paper = {30.0, 60.0, 90.0};
  double wavelength = 633e-9, waist = 1e-3, extent = 8e-3;
  int grid = 256, l = 3, iterations = 300, frames = 20, templates = 20;
  qpb::ChannelExperimentConfig cfg;
  bool no_crosstalk = false, write_screen = false;
};

void add_channel_flags(CLI::App* sub, ChannelArgs& a) {
  auto* si = sub->add_option("--cn2", a.cn2, "Turbulence strength Cn2 in m^(-2/3)");
  sub->add_option("--cn2-paper-units", a.cn2_paper, "Cn2 in units of 1e-13 mm^(-2/3)")->capture_default_str()->excludes(si);
  sub->add_option("--candidates-paper-units", a.candidates_paper, "Cn2 grid searched by the estimator (1e-13 mm^(-2/3))")
      ->capture_default_str();
  sub->add_option("--distance", a.cfg.path_length, "Turbulent path length d, m")->capture_default_str();
  sub->add_option("--detection-distance", a.cfg.detection_distance, "Fresnel distance to the intensity camera, m")
      ->capture_default_str();
  sub->add_option("--outer-scale", a.cfg.outer_scale, "Outer scale L0, m")->capture_default_str();
  sub->add_option("--inner-scale", a.cfg.inner_scale, "Inner scale l0, m")->capture_default_str();
  sub->add_option("--wavelength", a.wavelength, "Wavelength, m")->capture_default_str();
  sub->add_option("--waist", a.waist, "Beam waist w0, m")->capture_default_str();
  sub->add_option("--grid", a.grid, "Grid size (square)")->capture_default_str();
  sub->add_option("--extent", a.extent, "Grid half-width, m")->capture_default_str();
  sub->add_option("--l", a.l, "OAM index of the qubit (|+l> + |-l>)/sqrt2")->capture_default_str();
  sub->add_option("--iterations", a.iterations, "Maximum phase-retrieval iterations")->capture_default_str();
  sub->add_option("--frames", a.frames, "Distorted frames fed to the Cn2 estimator")->capture_default_str();
  sub->add_option("--templates", a.templates, "Simulated templates per Cn2 candidate")->capture_default_str();
}

qpb::ChannelExperimentConfig channel_config(const Run& run, ChannelArgs a) {
  auto c = a.cfg;
  c.cn2 = a.cn2 >= 0.0 ? a.cn2 : qpb::cn2_from_paper_units(a.cn2_paper);
  c.cn2_candidates.clear();
  for (double v : a.candidates_paper) c.cn2_candidates.push_back(qpb::cn2_from_paper_units(v));
  c.beam.wavelength = a.wavelength;
  c.beam.waist = a.waist;
  c.beam.validate();
  c.grid = {a.grid, a.grid, a.extent};
  c.grid.validate();
  c.qubit_l = a.l;
  c.gdo.max_iter = a.iterations;
  c.estimator_frames = a.frames;
  c.estimator_templates = a.templates;
  c.crosstalk = !a.no_crosstalk;
  c.seed = run.seed;
  return c;
}

void write_matrix(Run& run, const std::string& name, const qpb::CrosstalkMatrix& m) {
  std::vector<std::vector<double>> rows;
  for (int s = 0; s < m.size(); ++s)
    for (int d = 0; d < m.size(); ++d) rows.push_back({double(m.alphabet[s]), double(m.alphabet[d]), m.probs(d, s)});
  write_numeric(run, name, {"sent", "detected", "probability"}, rows);
}

void run_turbulence(Run& run, const ChannelArgs& a) {
  const auto cfg = channel_config(run, a);
  fmt::print("Cn2 = {:.6g} m^(-2/3) = {:.6g} x 1e-13 mm^(-2/3)\n", cfg.cn2, qpb::cn2_to_paper_units(cfg.cn2));
  const auto r = qpb::run_channel_experiment(cfg);
  std::vector<std::vector<double>> trace;
  for (std::size_t i = 0; i < r.gdo.mse.size(); ++i) trace.push_back({double(i), r.gdo.mse[i]});
  write_numeric(run, "turbulence_mse.csv", {"iteration", "mse"}, trace);
  qpb::TurbulenceSpec spec = r.screen.spec;
  write_numeric(run, "turbulence_summary.csv",
                {"cn2", "cn2_paper_units", "cn2_estimate_paper_units", "fried_parameter", "gdo_iterations", "overlap_distorted",
                 "overlap_corrected", "mi_ideal", "mi_turbulent", "mi_corrected"},
                {{cfg.cn2, qpb::cn2_to_paper_units(cfg.cn2), qpb::cn2_to_paper_units(r.cn2_estimate),
                  cfg.cn2 > 0 ? qpb::fried_parameter(spec) : INFINITY, double(r.gdo.iterations), r.overlap_distorted,
                  r.overlap_corrected, r.mi_ideal, r.mi_turbulent, r.mi_corrected}});
  if (cfg.crosstalk) {
    write_matrix(run, "crosstalk_ideal.csv", r.ideal);
    write_matrix(run, "crosstalk_turbulent.csv", r.turbulent);
    write_matrix(run, "crosstalk_corrected.csv", r.corrected_matrix);
  }
  if (a.write_screen) {
    const auto path = run.file("turbulence_screen.csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError(fmt::format("cannot open '{}' for writing", path.string()));
    qpb::write_grid_csv(out, r.screen.phase);
  }
  fmt::print("estimated Cn2 {:.6g} x 1e-13 mm^(-2/3); MSE {:.3e} -> {:.3e} in {} iterations\n",
             qpb::cn2_to_paper_units(r.cn2_estimate), r.gdo.mse.front(), r.gdo.mse.back(), r.gdo.iterations);
  fmt::print("mode overlap: distorted {:.4f}, corrected {:.4f}\n", r.overlap_distorted, r.overlap_corrected);
  if (cfg.crosstalk)
    fmt::print("mutual information (bits/photon): ideal {:.4f}, turbulent {:.4f}, corrected {:.4f}\n", r.mi_ideal, r.mi_turbulent,
               r.mi_corrected);
}

void run_tomography(Run& run, ChannelArgs a) {
  a.no_crosstalk = true;
  const auto cfg = channel_config(run, a);
  fmt::print("Cn2 = {:.6g} m^(-2/3) = {:.6g} x 1e-13 mm^(-2/3)\n", cfg.cn2, qpb::cn2_to_paper_units(cfg.cn2));
  const auto r = qpb::run_channel_experiment(cfg);
  Table dens({"state", "row", "col", "re", "im"});
  const std::pair<const char*, const qpb::QubitDensity*> states[] = {
      {"target", &r.target}, {"prepared", &r.prepared}, {"distorted", &r.distorted}, {"corrected", &r.corrected}};
  for (const auto& [name, rho] : states)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) dens.row(name, i, j, (*rho)(i, j).real(), (*rho)(i, j).imag());
  dens.write(run.file("tomography_density.csv"));
  write_numeric(run, "tomography_fidelity.csv", {"prepared", "distorted", "corrected"},
                {{r.fidelity_prepared, r.fidelity_distorted, r.fidelity_corrected}});
  for (const auto& [name, rho] : states) {
    const auto& m = rho->matrix();
    fmt::print("{:<9} [[{:.4f}{:+.4f}i, {:.4f}{:+.4f}i], [{:.4f}{:+.4f}i, {:.4f}{:+.4f}i]]\n", name, m(0, 0).real(),
               m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag(), m(1, 0).real(), m(1, 0).imag(), m(1, 1).real(), m(1, 1).imag());
  }
  fmt::print("fidelity: prepared {:.4f}, distorted {:.4f}, corrected {:.4f}\n", r.fidelity_prepared, r.fidelity_distorted,
             r.fidelity_corrected);
}

// Flags as given on the command line plus defaults, for the manifest.
json collect_flags(const CLI::App* sub) {
  json f = json::object();
  for (const CLI::Option* o : sub->get_options()) {
    if (o->get_lnames().empty()) continue;
    const std::string name = o->get_lnames().front();
    if (name == "help") continue;
    if (o->get_type_size() == 0) {
      f[name] = o->count() > 0;
    } else if (o->count() > 0) {
      const auto& res = o->results();
      f[name] = res.size() == 1 ? json(res.front()) : json(res);
    } else if (!o->get_default_str().empty()) {
      f[name] = o->get_default_str();
    }
  }
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qpb: quantum photonics toolkit experiments"};
  app.require_subcommand(1);
  Run run;

  StatesArgs states;
  auto* s = app.add_subcommand("states",
                               "Photon-number distribution, moments and parity of a single-mode state.\n"
                               "Figure mapping: the displaced-squeezed pmf figure is reproduced by\n"
                               "  --family dsv --alpha 2 --r 1 --theta 1.5708\n"
                               "Outputs: states_pmf.csv (n, probability), states_moments.csv.");
  s->add_option("--family", states.family, "vacuum | thermal | coherent | sv | dsv")
      ->check(CLI::IsMember({"vacuum", "thermal", "coherent", "sv", "dsv"}))
      ->capture_default_str();
  s->add_option("--nbar", states.nbar, "Thermal mean photon number")->capture_default_str();
  s->add_option("--alpha", states.alpha, "Displacement amplitude |alpha|")->capture_default_str();
  s->add_option("--phi", states.phi, "Displacement angle, rad")->capture_default_str();
  s->add_option("--r", states.r, "Squeezing parameter")->capture_default_str();
  s->add_option("--theta", states.theta, "Squeezing angle, rad")->capture_default_str();
  s->add_option("--cutoff", states.cutoff, "Fixed photon-number cutoff (default adaptive, tail < 1e-12)");
  add_common(s, run);

  Su11Args su;
  auto* u = app.add_subcommand("su11",
                               "Phase sensitivity of the SU(1,1) interferometer with a coherent and a\n"
                               "displaced-squeezed input, optimized over the phase, with SNL and HL columns.\n"
                               "Figure mapping:\n"
                               "  squeezing sweep, parity:  --detection parity --vary r --n1 16 --n2 4 --g 2\n"
                               "  gain sweep, parity:       --detection parity --vary g --n1 16 --n2 4 --r 2 --from 0 --to 3\n"
                               "  gain sweep, on-off:       --detection onoff --vary g --n1 16 --n2 4 --r 2 --from 0.1 --to 3\n"
                               "Output: su11_<detection>_<vary>.csv (x, phi_star, delta_phi, snl, hl).");
  u->add_option("--detection", su.detection, "parity | onoff")->check(CLI::IsMember({"parity", "onoff"}))->capture_default_str();
  u->add_option("--vary", su.vary, "Swept variable: r | g")->check(CLI::IsMember({"r", "g"}))->capture_default_str();
  u->add_option("--n1", su.n1, "Coherent photons in mode A")->capture_default_str();
  u->add_option("--n2", su.n2, "Displacement photons in mode B")->capture_default_str();
  u->add_option("--g", su.g, "OPA gain (fixed when sweeping r)")->capture_default_str();
  u->add_option("--r", su.r, "Squeezing (fixed when sweeping g)")->capture_default_str();
  u->add_option("--theta", su.theta, "Squeezing angle of the mode-B input, rad")->capture_default_str();
  u->add_option("--from", su.from, "Sweep start")->capture_default_str();
  u->add_option("--to", su.to, "Sweep end")->capture_default_str();
  u->add_option("--points", su.points, "Number of sweep points")->capture_default_str();
  u->add_option("--grid-points", su.grid_points, "Coarse phase grid before golden-section refinement")->capture_default_str();
  add_common(u, run);

  CameraArgs cam;
  auto* c = app.add_subcommand("camera",
                               "Monte Carlo camera measurement of a displaced-squeezed beam: cumulative pixel\n"
                               "groups give variance against mean for the squeezed (phase 0) and anti-squeezed\n"
                               "(phase pi/2) beams, fitted by a quadratic; the squeezing is read off the fits.\n"
                               "Figure mapping: the variance-vs-intensity figure uses the defaults\n"
                               "  --pump 1e6 --squeezed 1 --rows 32 --cols 32 --frames 10000\n"
                               "Photons are spread uniformly over the pixels (multinomial).\n"
                               "Outputs: camera_squeezed.csv, camera_antisqueezed.csv (group_index, mean, variance,\n"
                               "shot_noise), camera_fit.csv, camera_estimate.csv.");
  c->add_option("--pump", cam.cfg.pump_photons, "Displacement photons n_alpha")->capture_default_str();
  c->add_option("--squeezed", cam.cfg.squeezed_photons, "Squeezed photons n_s = sinh^2 r")->capture_default_str();
  c->add_option("--rows", cam.cfg.rows, "Pixel rows")->capture_default_str();
  c->add_option("--cols", cam.cfg.cols, "Pixel columns")->capture_default_str();
  c->add_option("--frames", cam.cfg.frames, "Number of frames")->capture_default_str();
  c->add_flag("--weighted", cam.weighted, "Inverse-variance weighted fit instead of ordinary least squares");
  add_common(c, run);

  DiscriminateArgs disc;
  auto* d = app.add_subcommand("discriminate",
                               "Naive Bayes discrimination of coherent and thermal light from photon-count\n"
                               "sequences: accuracy against sequence length with 10-subset error bars.\n"
                               "Figure mapping: the accuracy-vs-data-points figure uses the defaults\n"
                               "  --nbar 0.40 --nbar 0.53 --nbar 0.67 --nbar 0.77 --sizes 10,20,40,80,160\n"
                               "Output: discriminate.csv (n_bar, k, accuracy, errbar).");
  d->add_option("--nbar", disc.nbar, "Mean photon number (repeatable)")->capture_default_str();
  d->add_option("--sizes", disc.sizes, "Sequence lengths")->delimiter(',')->capture_default_str();
  d->add_option("--trials", disc.trials, "Trials per class and length")->capture_default_str();
  add_common(d, run);

  ChannelArgs turb;
  auto* t = app.add_subcommand("turbulence",
                               "Free-space OAM channel: Kolmogorov phase screen, Cn2 estimation from distorted\n"
                               "intensity frames, phase-retrieval correction, crosstalk matrices over l = -5..5\n"
                               "and mutual information.\n"
                               "Figure mapping: MSE-vs-iteration trace (turbulence_mse.csv), crosstalk\n"
                               "matrices without/with/after correcting turbulence (crosstalk_*.csv) and the\n"
                               "channel-capacity comparison (turbulence_summary.csv), e.g.\n"
                               "  --cn2-paper-units 30 | 60 | 90");
  add_channel_flags(t, turb);
  t->add_flag("--no-crosstalk", turb.no_crosstalk, "Skip the crosstalk matrices");
  t->add_flag("--write-screen", turb.write_screen, "Also dump the phase screen as a CSV grid");
  add_common(t, run);

  ChannelArgs tomo;
  auto* q = app.add_subcommand("tomography",
                               "Six-projection tomography of the OAM qubit (|+l> + |-l>)/sqrt2 as prepared,\n"
                               "after turbulence and after correction, with fidelities to the ideal state.\n"
                               "Figure mapping: the reconstructed density-matrix figure, e.g.\n"
                               "  --l 3 --cn2-paper-units 60\n"
                               "Outputs: tomography_density.csv (state, row, col, re, im), tomography_fidelity.csv.");
  add_channel_flags(q, tomo);
  add_common(q, run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  run.command = sub->get_name();
  run.flags = collect_flags(sub);
  try {
    run.prepare();
    if (sub == s) run_states(run, states);
    if (sub == u) run_su11(run, su);
    if (sub == c) run_camera(run, cam);
    if (sub == d) run_discriminate(run, disc);
    if (sub == t) run_turbulence(run, turb);
    if (sub == q) run_tomography(run, tomo);
    run.write_manifest();
  } catch (const UsageError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "invalid argument: {}\n", e.what());
    return 2;
  } catch (const qpb::NumericalError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "failure: {}\n", e.what());
    return 1;
  }
  return 0;
}
