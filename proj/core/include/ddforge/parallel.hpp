#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace ddforge {

// Worker count: DDFORGE_THREADS if set and positive, else the hardware
// concurrency (at least 1).
std::size_t worker_count();

// Runs body(chunk) for chunk in [0, n_chunks) on up to worker_count()
// threads. Chunks are independent; callers reduce results in chunk order so
// the outcome does not depend on scheduling.
void parallel_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& body);

// SplitMix64 mixing step; used to derive independent per-trajectory seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace ddforge
