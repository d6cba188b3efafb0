#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace msdi {

/// Runs f(0..trials-1) on a worker pool and returns the results in trial
/// order, so any ordered reduction over them is independent of `workers`.
/// workers = 0 uses the hardware concurrency.
template <class R, class F>
std::vector<R> parallel_trials(std::size_t trials, F f, std::size_t workers = 0) {
    std::vector<R> out(trials);
    if (workers == 0) {
        workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    workers = std::min(workers, std::max<std::size_t>(1, trials));
    if (workers == 1) {
        for (std::size_t t = 0; t < trials; t++) {
            out[t] = f(t);
        }
        return out;
    }
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; w++) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t t = w; t < trials; t += workers) {
                    out[t] = f(t);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) {
                    err = std::current_exception();
                }
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    if (err) {
        std::rethrow_exception(err);
    }
    return out;
}

}  // namespace msdi
