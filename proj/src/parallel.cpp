#include "kisim/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace kisim {

int thread_count() {
  const char* env = std::getenv("KISIM_THREADS");
  long requested = 0;
  if (env != nullptr && *env != '\0') {
    requested = std::strtol(env, nullptr, 10);
  }
  if (requested <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
  return static_cast<int>(requested);
}

void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (grain == 0) grain = 1;
  const std::size_t workers = static_cast<std::size_t>(thread_count());
  const std::size_t n_grains = (n + grain - 1) / grain;
  if (workers <= 1 || n_grains <= 1) {
    fn(0, n);
    return;
  }
  const std::size_t n_ranges = std::min(workers, n_grains);
  const std::size_t grains_per_range = (n_grains + n_ranges - 1) / n_ranges;
  std::vector<std::thread> pool;
  pool.reserve(n_ranges - 1);
  std::size_t begin = 0;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  while (begin < n) {
    std::size_t end = std::min(n, begin + grains_per_range * grain);
    ranges.emplace_back(begin, end);
    begin = end;
  }
  for (std::size_t r = 1; r < ranges.size(); ++r) {
    pool.emplace_back([&fn, range = ranges[r]] { fn(range.first, range.second); });
  }
  fn(ranges[0].first, ranges[0].second);
  for (auto& t : pool) t.join();
}

void parallel_for_index(std::size_t count, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t workers = std::min(static_cast<std::size_t>(thread_count()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace kisim
