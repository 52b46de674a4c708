#include "fput/parallel.hpp"

#include <atomic>
#include <mutex>
#include <cstdlib>

namespace fput {

int default_threads() {
    if (const char* env = std::getenv("FPUT_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(long n, const std::function<void(long)>& fn, int nthreads) {
    if (nthreads <= 0) nthreads = default_threads();
    if (n <= 0) return;
    if (nthreads == 1 || n == 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    // work stealing via shared counter; per-index work can be very uneven
    // (e.g. chaotic vs regular SALI cells), so static blocks would idle a core
    std::atomic<long> next{0};
    std::exception_ptr err;
    std::mutex err_mtx;
    auto worker = [&]() {
        try {
            for (;;) {
                long i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) break;
                fn(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mtx);
            if (!err) err = std::current_exception();
            next.store(n, std::memory_order_relaxed);  // drain remaining work
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads - 1);
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace fput
