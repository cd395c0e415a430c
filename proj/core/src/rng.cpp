#include "qpb/rng.hpp"

namespace qpb {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL))) {}

StreamRng::result_type StreamRng::operator()() {
  // Two rounds keep consecutive counters decorrelated even for nearby keys.
  return splitmix64(splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_) ^ key_);
}

double StreamRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::uint64_t substream(std::uint64_t stream, std::uint64_t index) {
  return splitmix64(stream ^ splitmix64(index + 0x2545f4914f6cdd1dULL));
}

}  // namespace qpb
