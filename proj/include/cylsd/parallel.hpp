#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <thread>
#include <utility>
#include <vector>

namespace cylsd {

inline unsigned resolve_workers(unsigned workers) {
    if (workers != 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end, chunk) over contiguous chunks of [0, count) on up to
/// `workers` threads. Chunk boundaries depend only on count and workers.
template <class Body>
void parallel_chunks(std::size_t count, unsigned workers, Body&& body) {
    const std::size_t threads = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1));
    if (threads <= 1) {
        body(std::size_t{0}, count, std::size_t{0});
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = count * t / threads;
        const std::size_t end = count * (t + 1) / threads;
        pool.emplace_back([&, begin, end, t] {
            try {
                body(begin, end, t);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Maximum of score(k) over k in [0, count) and the smallest index attaining
/// it; NaN scores count as +infinity. Identical for any worker count.
template <class Score>
std::pair<double, std::size_t> parallel_argmax(std::size_t count, unsigned workers, Score&& score) {
    const std::size_t threads = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1));
    std::vector<std::pair<double, std::size_t>> partial(threads, {-std::numeric_limits<double>::infinity(), 0});
    parallel_chunks(count, static_cast<unsigned>(threads), [&](std::size_t begin, std::size_t end, std::size_t t) {
        auto& [best, where] = partial[t];
        where = begin;
        for (std::size_t k = begin; k < end; ++k) {
            double v = score(k);
            if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
            if (v > best) {
                best = v;
                where = k;
            }
        }
    });
    auto result = partial.front();
    for (std::size_t t = 1; t < partial.size(); ++t) {
        if (partial[t].first > result.first) result = partial[t];
    }
    return result;
}

}  // namespace cylsd
