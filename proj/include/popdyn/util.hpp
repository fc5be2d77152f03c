#pragma once

#include <cstdio>
#include <functional>
#include <string>

namespace popdyn {

// Runs fn(i) for i in [0, n). Uses up to POPDYN_THREADS workers (default:
// hardware concurrency). Each index writes only its own output slot, so
// results are deterministic regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

int thread_budget();

// Shortest decimal form that round-trips a double (17 significant digits).
inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace popdyn
