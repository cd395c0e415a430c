#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace qpb {

enum class LightSource { Coherent, Thermal, Unknown };
std::string_view to_string(LightSource s);

struct CountSequence {
  std::vector<int> counts;
  LightSource truth = LightSource::Unknown;
  double mean_photons = 0.0;
};

CountSequence generate_counts(LightSource source, double mean_photons, std::size_t k, std::uint64_t seed,
                              std::uint64_t stream);

struct Classification {
  LightSource label = LightSource::Coherent;
  double log_likelihood_coherent = 0.0;
  double log_likelihood_thermal = 0.0;

  // Positive favours thermal.
  double gap() const { return log_likelihood_thermal - log_likelihood_coherent; }
};

// Naive Bayes with Poisson and Bose-Einstein likelihoods at a known mean.
// Counts above the tabulated range use the tail mass of the respective pmf.
class NaiveBayes {
 public:
  explicit NaiveBayes(double mean_photons, double prior_coherent = 0.5, double prior_thermal = 0.5);

  Classification classify(std::span<const int> counts) const;
  double log_prob(LightSource source, int count) const;

 private:
  double mean_;
  double log_prior_c_, log_prior_t_;
  std::vector<double> log_c_, log_t_;
  double log_tail_c_, log_tail_t_;
};

Classification nb_classify(const CountSequence& seq, double mean_photons);

struct AccuracyCurve {
  double mean_photons = 0.0;
  std::vector<int> sample_sizes;
  std::vector<double> accuracy;
  std::vector<double> errbar;
  // confusion[i] = {{C->C, C->T}, {T->C, T->T}} at sample_sizes[i]
  std::vector<std::array<std::array<long, 2>, 2>> confusion;
};

// trials_per_size sequences of each class per size; errbar is the standard
// deviation of accuracy over 10 disjoint trial subsets.
AccuracyCurve accuracy_curve(double mean_photons, std::span<const int> sample_sizes, int trials_per_size,
                             std::uint64_t seed);

}  // namespace qpb
