#ifndef TREEDG_PARALLEL_HPP
#define TREEDG_PARALLEL_HPP

#include <exception>
#include <thread>
#include <vector>

namespace treedg {

// Chunked parallel loop over [0, n). Each worker owns a contiguous index
// range, so a kernel that writes only to slot i is deterministic for any
// thread count. Exceptions are captured and the first one is rethrown on
// the calling thread.
template <class Fn>
void parallel_for(int n, int n_threads, Fn&& fn) {
  if (n <= 0) return;
  if (n_threads <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = std::min(n_threads, n);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(n, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        for (int i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace treedg

#endif
