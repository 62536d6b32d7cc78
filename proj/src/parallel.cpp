#include "talbot/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>
#include <vector>

namespace talbot {

namespace {
std::atomic<unsigned> workers{1};
}

void set_worker_count(unsigned n) {
  if (n == 0) throw std::invalid_argument("worker count must be at least 1");
  workers = n;
}

unsigned worker_count() { return workers; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t w = std::min<std::size_t>(workers, n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += w) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace talbot
