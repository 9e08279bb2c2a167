#ifndef FSMPC_SAMPLING_HPP
#define FSMPC_SAMPLING_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "fsmpc/model.hpp"

namespace fsmpc {

/// Stable per-block seed derivation (splitmix64 step), so batch results are
/// a function of (seed, block index) only and never of thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Random state with log-uniform radius in [r_min, r_max] and uniform
/// direction on the unit sphere in R^5.
State5 random_state(std::mt19937_64& rng, double r_min, double r_max);

/// Splits [0, total) into consecutive blocks of `block_size` indices and
/// folds the per-block results together in block order. Blocks run on a
/// small worker pool when the hardware offers more than one thread.
///
/// PerBlock: Report(std::size_t begin, std::size_t end, std::uint64_t seed)
/// Merge:    void(Report& accumulator, Report&& block_result)
template <typename Report, typename PerBlock, typename Merge>
Report run_blocks(std::size_t total, std::size_t block_size, std::uint64_t seed, PerBlock per_block,
                  Merge merge) {
    const std::size_t nblocks = block_size == 0 ? 0 : (total + block_size - 1) / block_size;
    std::vector<Report> results(nblocks);
    auto run_one = [&](std::size_t b) {
        const std::size_t begin = b * block_size;
        const std::size_t end = std::min(total, begin + block_size);
        results[b] = per_block(begin, end, derive_seed(seed, b));
    };

    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, nblocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) run_one(b);
    } else {
        std::atomic<std::size_t> next{0};
        auto drain = [&] {
            for (;;) {
                const std::size_t b = next.fetch_add(1);
                if (b >= nblocks) return;
                run_one(b);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(drain);
        drain();
        for (auto& th : pool) th.join();
    }

    Report merged{};
    for (auto& r : results) merge(merged, std::move(r));
    return merged;
}

}  // namespace fsmpc

#endif  // FSMPC_SAMPLING_HPP
