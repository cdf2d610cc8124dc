#include "srlproj/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace srlproj {

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void parallel_for(std::size_t chunks, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
  if (workers <= 1) {
    for (std::size_t k = 0; k < chunks; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < chunks; k = next++) {
          try {
            fn(k);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace srlproj
