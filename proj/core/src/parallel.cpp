#include "glosskit/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace glosskit {

void parallel_for(size_t n, int workers,
                  const std::function<void(size_t, size_t)>& fn) {
  if (n == 0) return;
  size_t nthreads = workers <= 1 ? 1 : std::min<size_t>(workers, n);
  if (nthreads == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  size_t chunk = (n + nthreads - 1) / nthreads;
  std::vector<std::exception_ptr> errors(nthreads);
  for (size_t t = 0; t < nthreads; ++t) {
    size_t begin = t * chunk;
    size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, &error = errors[t], begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& error : errors)
    if (error) std::rethrow_exception(error);
}

}  // namespace glosskit
