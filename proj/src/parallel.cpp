#include "drk/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace drk {

namespace {

std::atomic<int> g_budget{0};

int default_budget() {
    if (const char* env = std::getenv("DRK_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

int thread_budget() {
    int b = g_budget.load();
    if (b <= 0) {
        b = default_budget();
        g_budget.store(b);
    }
    return b;
}

void set_thread_budget(int n) { g_budget.store(n > 0 ? n : default_budget()); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t T = std::min<std::size_t>(static_cast<std::size_t>(thread_budget()), n);
    if (T <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < T; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace drk
