// Slab-parallel loops with a fixed partition.
//
// Work is split into a caller-chosen number of slabs (usually one per k1
// plane). Workers take contiguous slab ranges, and reductions combine
// per-slab partials in slab order, so a result never depends on how many
// workers ran.
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace nskv {

/// Number of worker threads used by data-parallel kernels (>= 1).
int worker_count();
void set_worker_count(int n);

/// Calls fn(slab) for slab in [0, slabs), spread across workers.
void for_each_slab(std::size_t slabs, const std::function<void(std::size_t)>& fn);

/// Ordered sum of per-slab partials.
template <class T, class F>
T reduce_slabs(std::size_t slabs, T init, F&& partial) {
  std::vector<T> parts(slabs, init);
  for_each_slab(slabs, [&](std::size_t s) { parts[s] = partial(s); });
  T acc = init;
  for (const T& p : parts) acc += p;
  return acc;
}

/// Ordered max of per-slab partials.
template <class T, class F>
T max_slabs(std::size_t slabs, T init, F&& partial) {
  std::vector<T> parts(slabs, init);
  for_each_slab(slabs, [&](std::size_t s) { parts[s] = partial(s); });
  T acc = init;
  for (const T& p : parts) acc = p > acc ? p : acc;
  return acc;
}

}  // namespace nskv
