#include "qpb/source_id.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "qpb/parallel.hpp"
#include "qpb/photon_stats.hpp"
#include "qpb/rng.hpp"

namespace qpb {
namespace {

constexpr int kSubsets = 10;

PhotonDistribution source_pmf(LightSource s, double nbar) {
  if (s == LightSource::Coherent) return pmf(Coherent{std::sqrt(nbar), 0.0});
  if (s == LightSource::Thermal) return pmf(Thermal{nbar});
  throw std::invalid_argument("source must be coherent or thermal");
}

double safe_log(double p) { return p > 0.0 ? std::log(p) : std::log(std::numeric_limits<double>::min()); }

}  // namespace

std::string_view to_string(LightSource s) {
  switch (s) {
    case LightSource::Coherent: return "coherent";
    case LightSource::Thermal: return "thermal";
    default: return "unknown";
  }
}

CountSequence generate_counts(LightSource source, double nbar, std::size_t k, std::uint64_t seed, std::uint64_t stream) {
  if (!(nbar > 0.0)) throw std::invalid_argument(fmt::format("mean photon number must be positive, got {}", nbar));
  if (k < 1) throw std::invalid_argument("sequence length must be >= 1");
  return {sample_counts(source_pmf(source, nbar), k, seed, stream), source, nbar};
}

NaiveBayes::NaiveBayes(double nbar, double prior_c, double prior_t)
    : mean_(nbar), log_prior_c_(std::log(prior_c)), log_prior_t_(std::log(prior_t)) {
  if (!(nbar > 0.0)) throw std::invalid_argument(fmt::format("mean photon number must be positive, got {}", nbar));
  if (!(prior_c > 0.0) || !(prior_t > 0.0)) throw std::invalid_argument("priors must be positive");
  const auto c = source_pmf(LightSource::Coherent, nbar);
  const auto t = source_pmf(LightSource::Thermal, nbar);
  for (double p : c.probs) log_c_.push_back(safe_log(p));
  for (double p : t.probs) log_t_.push_back(safe_log(p));
  log_tail_c_ = safe_log(c.tail_mass);
  log_tail_t_ = safe_log(t.tail_mass);
}

double NaiveBayes::log_prob(LightSource source, int count) const {
  if (count < 0) throw std::invalid_argument("photon counts must be >= 0");
  const auto& table = source == LightSource::Coherent ? log_c_ : log_t_;
  if (static_cast<std::size_t>(count) < table.size()) return table[static_cast<std::size_t>(count)];
  return source == LightSource::Coherent ? log_tail_c_ : log_tail_t_;
}

Classification NaiveBayes::classify(std::span<const int> counts) const {
  Classification c;
  c.log_likelihood_coherent = log_prior_c_;
  c.log_likelihood_thermal = log_prior_t_;
  for (int x : counts) {
    c.log_likelihood_coherent += log_prob(LightSource::Coherent, x);
    c.log_likelihood_thermal += log_prob(LightSource::Thermal, x);
  }
  c.label = c.log_likelihood_thermal > c.log_likelihood_coherent ? LightSource::Thermal : LightSource::Coherent;
  return c;
}

Classification nb_classify(const CountSequence& seq, double nbar) { return NaiveBayes(nbar).classify(seq.counts); }

AccuracyCurve accuracy_curve(double nbar, std::span<const int> sizes, int trials, std::uint64_t seed) {
  if (trials < kSubsets) throw std::invalid_argument(fmt::format("need at least {} trials per size", kSubsets));
  for (int k : sizes)
    if (k < 1) throw std::invalid_argument("sample sizes must be >= 1");
  const NaiveBayes nb(nbar);
  const auto pc = source_pmf(LightSource::Coherent, nbar);
  const auto pt = source_pmf(LightSource::Thermal, nbar);

  AccuracyCurve curve;
  curve.mean_photons = nbar;
  curve.sample_sizes.assign(sizes.begin(), sizes.end());
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const auto k = static_cast<std::size_t>(sizes[si]);
    // correct[2 * t + c]: trial t of class c was classified correctly.
    std::vector<char> correct(2 * static_cast<std::size_t>(trials));
    parallel_for(correct.size(), [&](std::size_t j) {
      const std::size_t t = j / 2;
      const auto truth = j % 2 == 0 ? LightSource::Coherent : LightSource::Thermal;
      const std::uint64_t stream = substream(substream(si, j % 2), t);
      const auto counts = sample_counts(truth == LightSource::Coherent ? pc : pt, k, seed, stream);
      correct[j] = nb.classify(counts).label == truth;
    });
    std::array<std::array<long, 2>, 2> conf{};
    std::array<long, kSubsets> hits{}, seen{};
    for (std::size_t j = 0; j < correct.size(); ++j) {
      const int c = static_cast<int>(j % 2);
      const bool ok = correct[j] != 0;
      conf[static_cast<std::size_t>(c)][static_cast<std::size_t>(ok ? c : 1 - c)]++;
      const std::size_t sub = (j / 2) % kSubsets;
      hits[sub] += ok;
      seen[sub]++;
    }
    const double acc = static_cast<double>(conf[0][0] + conf[1][1]) / static_cast<double>(correct.size());
    double m = 0.0, s2 = 0.0;
    for (int b = 0; b < kSubsets; ++b) m += static_cast<double>(hits[b]) / seen[b];
    m /= kSubsets;
    for (int b = 0; b < kSubsets; ++b) s2 += std::pow(static_cast<double>(hits[b]) / seen[b] - m, 2);
    curve.accuracy.push_back(acc);
    curve.errbar.push_back(std::sqrt(s2 / (kSubsets - 1)));
    curve.confusion.push_back(conf);
  }
  return curve;
}

}  // namespace qpb
