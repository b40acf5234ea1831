#include "adev/parallel.hpp"

#include <omp.h>

#include "adev/errors.hpp"

namespace adev {

void set_num_threads(int n) {
  require_arg(n >= 1, "thread count must be >= 1");
  omp_set_num_threads(n);
}

int num_threads() { return omp_get_max_threads(); }

}  // namespace adev
