#pragma once

#include <cstddef>

namespace adev {

// Execution policy for the data-parallel kernels. Both policies produce
// bit-identical results: per-item work is written to its own slot and any
// reduction runs afterwards in index order.
enum class Exec { serial, parallel };

void set_num_threads(int n);
int num_threads();

template <class Fn>
void for_each_index(Exec exec, std::size_t count, Fn&& fn) {
  if (exec == Exec::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) fn(static_cast<std::size_t>(i));
}

}  // namespace adev
