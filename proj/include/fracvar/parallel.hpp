#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace fracvar {

/// Worker cap for the OpenMP kernels: FRACVAR_THREADS when it holds a
/// positive integer, otherwise the OpenMP default. Read once per process.
int thread_limit();

/// Overrides the cap for the rest of the process (0 restores the default).
void set_thread_limit(int threads);

namespace detail {

/// Runs body(i) for i in [0, count) across OpenMP workers. The first
/// exception thrown by any iteration is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
    std::exception_ptr failure;
    std::mutex guard;
    const long long total = static_cast<long long>(count);
    const int workers = thread_limit();
#pragma omp parallel for schedule(dynamic, 8) num_threads(workers)
    for (long long i = 0; i < total; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(guard);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail
}  // namespace fracvar
