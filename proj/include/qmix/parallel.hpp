#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace qmix {

/// Worker cap used when a routine is not given an explicit thread count.
void set_default_threads(int threads);
int default_threads();

/// Runs body(0..n-1) on at most `threads` workers (0 means the default).
/// Exceptions thrown by the body are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads = 0);

/// Deterministic per-task seed derived from a user seed and a task index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace qmix
