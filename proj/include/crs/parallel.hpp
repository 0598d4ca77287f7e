#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace crs {

inline constexpr std::int64_t kTrialBlock = 4096;

inline std::int64_t block_count(std::int64_t trials) { return (trials + kTrialBlock - 1) / kTrialBlock; }

// Runs body(block, first_trial, end_trial) for every fixed-size block of trials
// on up to `jobs` threads. Block boundaries do not depend on `jobs`, so
// callers that reduce per-block results in block order get identical output
// for any worker count.
template <class Body>
void for_each_block(std::int64_t trials, int jobs, Body&& body) {
    const std::int64_t blocks = block_count(trials);
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            std::int64_t b = next.fetch_add(1);
            if (b >= blocks) return;
            try {
                body(b, b * kTrialBlock, std::min(trials, (b + 1) * kTrialBlock));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(blocks);
            }
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<std::int64_t>(1, blocks))));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace crs
