#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace conecalc {

/// Thread cap: min(hardware, CONECALC_MAX_THREADS). Unset or invalid env
/// means the hardware count; a value of 1 forces serial execution.
inline int max_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("CONECALC_MAX_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && static_cast<unsigned>(v) < hw) return static_cast<int>(v);
    }
    return static_cast<int>(hw);
}

/// Index-parallel loop with deterministic results: body(i) must write only
/// to slot i of preallocated storage. Falls back to a plain loop when one
/// thread is available or the range is small.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const int nt = max_threads();
    if (nt <= 1 || n < 4) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(nt, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace conecalc
