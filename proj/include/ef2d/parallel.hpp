#pragma once

// Thin fork-join helper used by assembly.  Work is split into fixed blocks
// whose contents never depend on the thread count; workers claim blocks from
// an atomic counter, and any serial reduction over block results happens in
// block order afterwards, so results are bit-identical for any thread count.

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace ef2d {

inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Run body(block_index) for block_index in [0, num_blocks).
template <class Body>
inline void parallel_blocks(std::int64_t num_blocks, int threads, Body&& body) {
    threads = resolve_thread_count(threads);
    if (threads <= 1 || num_blocks <= 1) {
        for (std::int64_t b = 0; b < num_blocks; ++b) body(b);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::int64_t b = next.fetch_add(1);
            if (b >= num_blocks || failed.load()) break;
            try {
                body(b);
            } catch (...) {
                if (!failed.exchange(true)) err = std::current_exception();
                break;
            }
        }
    };
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load() && err) std::rethrow_exception(err);
}

}  // namespace ef2d
