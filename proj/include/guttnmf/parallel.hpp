#ifndef GUTTNMF_PARALLEL_HPP
#define GUTTNMF_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace guttnmf {

/// Runs fn(0), ..., fn(count-1) on up to `jobs` worker threads. Each index is
/// processed exactly once; callers keep determinism by writing results into
/// per-index slots and folding in index order afterwards. The first exception
/// thrown by any fn is rethrown on the calling thread after all workers join.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
    if (count == 0) return;
    if (jobs == 0) jobs = 1;
    if (jobs > count) jobs = count;
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) workers.emplace_back(worker);
    for (std::thread& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// Default worker count for CLI --jobs.
inline std::size_t default_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace guttnmf

#endif
