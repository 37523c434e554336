#pragma once

#include <cstddef>
#include <functional>

namespace mapgeom {

// Worker cap for per-sample work. Defaults to the MAPGEOM_THREADS
// environment variable, else the hardware concurrency.
void set_thread_cap(unsigned threads);
unsigned thread_cap();

// Runs fn(i) for i in [0, n). If any call throws, the exception from the
// lowest failing index is rethrown after all workers finish, so failures
// are reported deterministically.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mapgeom
