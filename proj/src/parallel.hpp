#ifndef DFANO_SRC_PARALLEL_HPP
#define DFANO_SRC_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dfano::detail
{
// Runs fn(i) for i in [0, n) on contiguous blocks, one block per worker.
// Results must be written to per-index slots; the exception of the lowest
// failing block is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned max_workers = 0)
{
    unsigned workers = max_workers ? max_workers : std::thread::hardware_concurrency();
    workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t block = (n + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                const std::size_t lo = w * block;
                const std::size_t hi = std::min(n, lo + block);
                try {
                    for (std::size_t i = lo; i < hi; ++i)
                        fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace dfano::detail

#endif
