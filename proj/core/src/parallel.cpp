#include "wavekin/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace wavekin {

namespace {
int g_threads = 0;  // 0 = auto
}

void set_thread_count(int n) { g_threads = n < 0 ? 0 : n; }

int thread_count() {
    if (g_threads > 0) return g_threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::size_t default_chunks(std::size_t n) {
    // fixed so that results are reproducible across machines; fine-grained
    // enough to load-balance typical pools
    if (n < 2048) return 1;
    return std::min<std::size_t>(256, n / 1024);
}

void for_chunks(std::size_t n, std::size_t n_chunks,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    n_chunks = std::max<std::size_t>(1, std::min(n_chunks, n));
    const int workers = std::min<int>(thread_count(), static_cast<int>(n_chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            std::size_t b = c * n / n_chunks, e = (c + 1) * n / n_chunks;
            body(c, b, e);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t c = next.fetch_add(1);
                if (c >= n_chunks) break;
                std::size_t b = c * n / n_chunks, e = (c + 1) * n / n_chunks;
                body(c, b, e);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace wavekin
