#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace fuzzyclust {

/// Columns per reduction block. Reductions accumulate per-block partials and
/// combine them in ascending block order, so results are bitwise identical
/// for any worker count. Changing this constant changes the rounding of
/// reduced sums and therefore the golden traces.
inline constexpr std::size_t kReductionBlock = 1024;

inline std::size_t block_count(std::size_t n) {
    return (n + kReductionBlock - 1) / kReductionBlock;
}

/// Worker count for parallel phases: explicit request > FUZZYCLUST_THREADS
/// env var > hardware concurrency. Always at least 1.
inline unsigned resolve_workers(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FUZZYCLUST_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Runs fn(block_index, begin, end) over [0, n) split into kReductionBlock
/// chunks. Workers pull blocks from a shared counter; the partition is fixed,
/// so any per-block outputs are independent of the worker count.
template <class Fn>
void parallel_for_blocks(std::size_t n, unsigned workers, Fn&& fn) {
    const std::size_t blocks = block_count(n);
    if (blocks == 0) return;

    auto run_block = [&](std::size_t b) {
        const std::size_t begin = b * kReductionBlock;
        const std::size_t end = std::min(begin + kReductionBlock, n);
        fn(b, begin, end);
    };

    if (workers <= 1 || blocks == 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
        return;
    }

    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= blocks) break;
            run_block(b);
        }
    };

    const unsigned spawn = static_cast<unsigned>(
        std::min<std::size_t>(workers, blocks) - 1);
    std::vector<std::thread> pool;
    pool.reserve(spawn);
    for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(drain);
    drain();
    for (auto& t : pool) t.join();
}

}  // namespace fuzzyclust
