#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stochsep {

/// Number of worker threads to use; 0 selects the hardware concurrency.
inline std::size_t resolve_threads(std::size_t requested)
{
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn)
{
    threads = std::min(resolve_threads(threads), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += threads) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

/// Pairwise tree sum of `values` in index order.
template <typename T>
T tree_sum(std::vector<T> values)
{
    if (values.empty()) return T(0);
    for (std::size_t stride = 1; stride < values.size(); stride *= 2) {
        for (std::size_t i = 0; i + stride < values.size(); i += 2 * stride) values[i] += values[i + stride];
    }
    return values[0];
}

/// Sums fn(i) for i in [0, count). Items are split into fixed blocks that do
/// not depend on the thread count, each block is summed in order, and block
/// sums are combined by a pairwise tree, so the result is reproducible.
template <typename T, typename Fn>
T parallel_sum(std::size_t count, std::size_t threads, Fn&& fn, std::size_t block_size = 64)
{
    if (count == 0) return T(0);
    const std::size_t blocks = (count + block_size - 1) / block_size;
    std::vector<T> partial(blocks, T(0));
    auto run_block = [&](std::size_t b) {
        T acc = T(0);
        const std::size_t end = std::min(count, (b + 1) * block_size);
        for (std::size_t i = b * block_size; i < end; ++i) acc += fn(i);
        partial[b] = acc;
    };
    threads = std::min(resolve_threads(threads), blocks);
    if (threads <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr error;
        std::mutex error_mutex;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t b = t; b < blocks; b += threads) run_block(b);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (error) std::rethrow_exception(error);
    }
    for (std::size_t stride = 1; stride < blocks; stride *= 2) {
        for (std::size_t i = 0; i + stride < blocks; i += 2 * stride) partial[i] += partial[i + stride];
    }
    return partial[0];
}

}  // namespace stochsep
