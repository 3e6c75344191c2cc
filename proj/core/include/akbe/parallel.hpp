#pragma once
// Indexed parallel loop. Each index writes only its own output slot, so the
// result is a pure function of the inputs regardless of the thread count.

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace akbe {

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t t_count =
        std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += t_count) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace akbe
