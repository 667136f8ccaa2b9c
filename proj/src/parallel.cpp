#include "fracvar/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fracvar {

namespace {

int default_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

int from_environment() {
    if (const char* raw = std::getenv("FRACVAR_THREADS")) {
        try {
            std::size_t used = 0;
            const int value = std::stoi(raw, &used);
            if (used == std::string(raw).size() && value > 0) return value;
        } catch (const std::exception&) {
        }
    }
    return default_threads();
}

std::atomic<int> override_threads{0};

}  // namespace

int thread_limit() {
    const int forced = override_threads.load(std::memory_order_relaxed);
    if (forced > 0) return forced;
    static const int env = from_environment();
    return env;
}

void set_thread_limit(int threads) {
    override_threads.store(threads > 0 ? threads : 0, std::memory_order_relaxed);
}

}  // namespace fracvar
