#pragma once

#include <cstddef>
#include <cstdint>
#include <type_traits>
#include <vector>

namespace stochsep {

/// Calls fn(indices) for every increasing k-subset of {0..n-1}, in lexicographic order.
/// Stops early if fn returns false.
template <typename Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn)
{
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        if constexpr (std::is_same_v<decltype(fn(idx)), bool>) {
            if (!fn(idx)) return;
        } else {
            fn(idx);
        }
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(r);
}

/// Number of k-subsets of r reds and b blues containing both colors.
inline std::uint64_t bichromatic_count(std::uint64_t reds, std::uint64_t blues, std::uint64_t k)
{
    return binomial(reds + blues, k) - binomial(reds, k) - binomial(blues, k);
}

}  // namespace stochsep
