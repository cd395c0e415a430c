#include "qpb/photon_stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "qpb/constants.hpp"
#include "qpb/errors.hpp"
#include "qpb/rng.hpp"

namespace qpb {
namespace {

constexpr int kWindow = 8;

double log_cosh(double r) { return r + std::log1p(std::exp(-2.0 * r)) - std::log(2.0); }

// Streams probabilities term by term and decides when the tail is negligible.
class TailTracker {
 public:
  TailTracker(double mean, double variance, CutoffPolicy policy)
      : policy_(policy), start_(mean + 3.0 * std::sqrt(std::max(variance, 0.0))) {
    cap_ = policy.kind == CutoffPolicy::Kind::Fixed
               ? policy.max_n
               : static_cast<int>(std::ceil(10.0 * (mean + 10.0 * std::sqrt(std::max(variance, 0.0)) + 20.0)));
  }

  int cap() const { return cap_; }

  // Window maxima must decay geometrically; the bound sums a geometric series
  // of future window maxima, each window holding kWindow terms.
  bool done(const std::vector<double>& p) {
    const int n = static_cast<int>(p.size()) - 1;
    if (policy_.kind == CutoffPolicy::Kind::Fixed) return n >= cap_;
    if (n >= cap_) return true;
    if (n < 2 * kWindow || n < start_ || (n + 1) % kWindow != 0) return false;
    const double cur = *std::max_element(p.end() - kWindow, p.end());
    const double prev = *std::max_element(p.end() - 2 * kWindow, p.end() - kWindow);
    if (cur == 0.0) {
      bound_ = 0.0;
      return prev == 0.0;
    }
    if (!(cur < prev)) return false;
    const double q = cur / prev;
    bound_ = kWindow * cur * q / (1.0 - q);
    return bound_ < policy_.tail_tolerance;
  }

  double bound() const { return bound_; }

 private:
  CutoffPolicy policy_;
  double start_;
  int cap_ = 0;
  double bound_ = 1.0;
};

template <class LogTerm>
PhotonDistribution build(const StateParams& params, const CountMoments& cf, CutoffPolicy policy, LogTerm&& log_term) {
  TailTracker tracker(cf.mean, cf.variance, policy);
  std::vector<double> p;
  p.reserve(64);
  for (int n = 0;; ++n) {
    p.push_back(std::exp(log_term(n)));
    if (tracker.done(p)) break;
  }
  PhotonDistribution d;
  d.cutoff = static_cast<int>(p.size()) - 1;
  d.probs = std::move(p);
  d.family = params;
  double sum = 0.0, comp = 0.0;  // Kahan
  for (double v : d.probs) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const bool capped = policy.kind == CutoffPolicy::Kind::Fixed || tracker.bound() >= policy.tail_tolerance;
  d.tail_mass = capped ? std::max(0.0, 1.0 - sum) : tracker.bound();
  if (!std::isfinite(sum)) throw NumericalError(fmt::format("photon pmf overflow for {}", describe(params)));
  return d;
}

PhotonDistribution delta_zero(const StateParams& params) {
  PhotonDistribution d;
  d.probs = {1.0};
  d.family = params;
  return d;
}

PhotonDistribution dsv_pmf(const DisplacedSqueezed& s, const StateParams& params, CutoffPolicy policy) {
  using cd = std::complex<double>;
  const double a = s.amplitude, phi = s.phase, r = s.squeezing, theta = s.angle;
  const double th = std::tanh(r);
  const cd w = 0.5 * a * std::exp(cd(0, -0.5 * theta)) * (std::exp(cd(0, phi)) + std::exp(cd(0, theta - phi)) * th);
  const double t = 0.5 * th;
  const double log_pre = -a * a * (1.0 + th * std::cos(theta - 2.0 * phi)) - log_cosh(r);

  // a_n = H_n(z) (e^{i theta} tanh r / 2)^{n/2} / sqrt(n!) up to a unit phase,
  // kept as value * exp(log_scale) to avoid overflow.
  cd prev(0.0), cur(1.0);
  double log_scale = 0.0;
  int at = 0;
  auto next_term = [&](int n) {
    while (at < n) {
      const double m = at;
      const cd nxt = 2.0 * w / std::sqrt(m + 1.0) * cur - 2.0 * t * std::sqrt(m / (m + 1.0)) * prev;
      prev = cur;
      cur = nxt;
      ++at;
      const double mag = std::max(std::abs(cur), std::abs(prev));
      if (mag > 1e100 || (mag < 1e-100 && mag > 0.0)) {
        prev /= mag;
        cur /= mag;
        log_scale += std::log(mag);
      }
    }
    const double m2 = std::norm(cur);
    return m2 == 0.0 ? -std::numeric_limits<double>::infinity() : log_pre + std::log(m2) + 2.0 * log_scale;
  };
  return build(params, closed_form_moments(params), policy, next_term);
}

}  // namespace

CountMoments closed_form_moments(const StateParams& params) {
  validate(params);
  double mean = 0.0, var = 0.0;
  if (auto* t = std::get_if<Thermal>(&params)) {
    mean = t->mean_photons;
    var = mean + mean * mean;
  } else if (auto* c = std::get_if<Coherent>(&params)) {
    mean = var = c->amplitude * c->amplitude;
  } else if (auto* s = std::get_if<SqueezedVacuum>(&params)) {
    const double sh = std::sinh(s->squeezing), ch = std::cosh(s->squeezing);
    mean = sh * sh;
    var = 2.0 * sh * sh * ch * ch;
  } else if (auto* d = std::get_if<DisplacedSqueezed>(&params)) {
    const double a2 = d->amplitude * d->amplitude, r = d->squeezing;
    const double sh = std::sinh(r), ch = std::cosh(r);
    mean = a2 + sh * sh;
    var = a2 * (std::cosh(2.0 * r) - std::sinh(2.0 * r) * std::cos(d->angle - 2.0 * d->phase)) + 2.0 * sh * sh * ch * ch;
  }
  CountMoments m{mean, var, 0.0};
  m.mandel_q = mean > 0.0 ? (var - mean) / mean : 0.0;
  return m;
}

PhotonDistribution pmf(const StateParams& params, CutoffPolicy policy) {
  validate(params);
  if (policy.kind == CutoffPolicy::Kind::Fixed && policy.max_n < 0) throw std::invalid_argument("cutoff must be >= 0");
  const CountMoments cf = closed_form_moments(params);
  if (std::holds_alternative<Vacuum>(params) || cf.mean == 0.0) {
    if (policy.kind == CutoffPolicy::Kind::Fixed) {
      PhotonDistribution d = delta_zero(params);
      d.probs.resize(static_cast<std::size_t>(policy.max_n) + 1, 0.0);
      d.cutoff = policy.max_n;
      return d;
    }
    return delta_zero(params);
  }
  if (auto* t = std::get_if<Thermal>(&params)) {
    const double nb = t->mean_photons, lr = std::log(nb / (1.0 + nb)), l0 = -std::log1p(nb);
    return build(params, cf, policy, [&](int n) { return l0 + n * lr; });
  }
  if (auto* c = std::get_if<Coherent>(&params)) {
    const double nb = c->amplitude * c->amplitude, ln = std::log(nb);
    return build(params, cf, policy, [&](int n) { return n * ln - nb - std::lgamma(n + 1.0); });
  }
  if (auto* s = std::get_if<SqueezedVacuum>(&params)) {
    const double r = s->squeezing, lt = std::log(std::tanh(r)), lc = log_cosh(r), l2 = std::log(2.0);
    return build(params, cf, policy, [&](int n) {
      if (n % 2 != 0) return -std::numeric_limits<double>::infinity();
      const int m = n / 2;
      return std::lgamma(n + 1.0) + n * (lt - l2) - 2.0 * std::lgamma(m + 1.0) - lc;
    });
  }
  return dsv_pmf(std::get<DisplacedSqueezed>(params), params, policy);
}

CountMoments moments(const PhotonDistribution& dist) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int n = 0; n <= dist.cutoff; ++n) {
    const double p = dist.probs[static_cast<std::size_t>(n)];
    s0 += p;
    s1 += p * n;
    s2 += p * static_cast<double>(n) * n;
  }
  CountMoments m;
  m.mean = s1 / s0;
  m.variance = std::max(0.0, s2 / s0 - m.mean * m.mean);
  m.mandel_q = m.mean > 0.0 ? (m.variance - m.mean) / m.mean : 0.0;
  return m;
}

std::vector<int> sample_counts(const PhotonDistribution& dist, std::size_t n_samples, std::uint64_t seed,
                               std::uint64_t stream) {
  std::vector<double> cdf(dist.probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = (acc += dist.probs[i]);
  StreamRng rng(seed, stream);
  std::vector<int> out(n_samples);
  for (auto& v : out) {
    const double u = rng.uniform();
    v = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
  return out;
}

double thermal_mean_from_temperature(double kelvin, double omega) {
  if (!(kelvin > 0.0) || !(omega > 0.0)) throw std::invalid_argument("temperature and frequency must be positive");
  return 1.0 / std::expm1(kHbar * omega / (kBoltzmann * kelvin));
}

double temperature_from_thermal_mean(double mean_photons, double omega) {
  if (!(mean_photons > 0.0) || !(omega > 0.0)) throw std::invalid_argument("mean photon number and frequency must be positive");
  return kHbar * omega / (kBoltzmann * std::log1p(1.0 / mean_photons));
}

double tmsv_effective_temperature(double r, double omega) {
  if (!(r > 0.0)) throw std::invalid_argument(fmt::format("squeezing must be positive, got {}", r));
  if (!(omega > 0.0)) throw std::invalid_argument("frequency must be positive");
  // ln coth r = 2 atanh(e^{-2r}), finite and positive for all r > 0 until underflow.
  const double lc = 2.0 * std::atanh(std::exp(-2.0 * r));
  return kHbar * omega / (2.0 * kBoltzmann * lc);
}

}  // namespace qpb
