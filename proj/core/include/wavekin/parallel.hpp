#pragma once

#include <cstddef>
#include <functional>

namespace wavekin {

// Global worker budget for the chunked loops below (set from --threads).
void set_thread_count(int n);
int thread_count();

// Deterministic parallel reduction helper: the index range [0,n) is split
// into a fixed number of chunks that does NOT depend on the worker count, the
// chunks are processed by a pool of threads, and the caller combines the
// per-chunk results in chunk order.  Same bits out for 1 thread or 64.
//
// body(chunk_index, begin, end) must write only chunk-local state.
void for_chunks(std::size_t n, std::size_t n_chunks,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

// Reasonable chunk count for an n-sized loop (fixed, hardware independent).
std::size_t default_chunks(std::size_t n);

}  // namespace wavekin
