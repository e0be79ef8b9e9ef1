#include "balfield/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace balfield {

namespace {
int g_override = 0;

int env_workers() {
    const char* s = std::getenv("BALANCE_FIELD_WORKERS");
    if (!s) return 1;
    int n = std::atoi(s);
    return n >= 1 ? n : 1;
}
}  // namespace

int worker_count() {
    if (g_override >= 1) return g_override;
    static const int env = env_workers();
    return env;
}

void set_worker_count(int n) { g_override = n >= 1 ? n : 0; }

void parallel_for(int n, const std::function<void(int)>& fn) {
    int workers = worker_count();
    if (workers <= 1 || n <= 1) {
        for (int p = 0; p < n; ++p) fn(p);
        return;
    }
    if (workers > n) workers = n;
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                int p = next.fetch_add(1);
                if (p >= n) return;
                fn(p);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace balfield
