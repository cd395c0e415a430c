#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace qpb {

// Worker count: QPB_THREADS if set and positive, otherwise hardware concurrency.
int thread_count();

// Runs body(i) for i in [0, n). Each index writes only its own output slot,
// so results do not depend on the number of threads. The exception thrown by
// the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

}  // namespace qpb
