#pragma once

// Static-chunk parallel loop. Work item i always writes slot i of the caller's
// output, so results do not depend on the thread count or scheduling.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace toruslab {

/// Thread count used by parallel_for; 0 means hardware_concurrency.
inline unsigned& parallel_thread_limit() {
    static unsigned limit = 0;
    return limit;
}

/// Calls body(i) for i in [0, count). The first exception (lowest index) is
/// rethrown after all workers finish.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    unsigned threads = parallel_thread_limit();
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace toruslab
