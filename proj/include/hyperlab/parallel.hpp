#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hyperlab {

namespace detail {
inline std::atomic<unsigned>& max_threads_slot()
{
    static std::atomic<unsigned> slot{0};
    return slot;
}
} // namespace detail

/// Caps the worker count used by parallel_for. 0 restores the hardware default.
inline void set_max_threads(unsigned n) { detail::max_threads_slot() = n; }

inline unsigned max_threads()
{
    unsigned cap = detail::max_threads_slot();
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return cap == 0 ? hw : std::min(cap, hw);
}

/// Runs body(i) for i in [0, n). Work is handed out by index, so any result
/// written to slot i is independent of scheduling. The first exception thrown
/// by a worker is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, Body&& body)
{
    const std::size_t workers = std::min<std::size_t>(max_threads(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(worker);
    worker();
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}

/// Ordered parallel map: out[i] = fn(i).
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn)
{
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

} // namespace hyperlab
