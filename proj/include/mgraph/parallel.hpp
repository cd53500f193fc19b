#ifndef MGRAPH_PARALLEL_HPP
#define MGRAPH_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mgraph {

// Runs fn(i) for i in [0,n) on up to `workers` threads. Results must be
// written to slot i by fn so aggregation order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn)
{
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n ? n : 1)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < workers; ++k)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(m);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace mgraph

#endif
