#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace idd::detail {

/// Run fn(0..n-1) on a small work-stealing pool. Exceptions from workers are
/// rethrown on the caller. Index order of side effects is up to the caller;
/// all library uses write to disjoint per-index slots.
template <typename Fn>
void parallel_for(long n, Fn&& fn, int threads = 0) {
    long n_threads = threads > 0 ? threads : static_cast<long>(std::thread::hardware_concurrency());
    if (n_threads > n) n_threads = n;
    if (n_threads <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (long w = 0; w < n_threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace idd::detail
