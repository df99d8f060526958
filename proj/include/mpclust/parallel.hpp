#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace mpclust {

/// Number of worker threads to use for a requested count; 0 means all hardware threads.
int resolve_threads(int requested);

/// Runs task(0..count-1) on up to `threads` workers. Tasks must write only to
/// their own output slots; the first exception thrown is rethrown after all
/// workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

/// Counter-based seed derivation: the seed of a sub-stream depends only on
/// the master seed and the stream coordinates, never on execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace mpclust
