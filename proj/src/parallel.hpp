// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <exception>

namespace feast::detail {

// OpenMP loop that forwards the first exception out of the parallel region.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  std::exception_ptr error;
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(feast_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace feast::detail
