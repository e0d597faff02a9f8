#include "cdfts/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace cdfts {

namespace {

std::atomic<std::size_t> g_override{0};

std::size_t env_threads() {
    const char* raw = std::getenv("CDFTS_THREADS");
    if (raw == nullptr) {
        return 1;
    }
    try {
        const long value = std::stol(raw);
        return value > 0 ? static_cast<std::size_t>(value) : 1;
    } catch (const std::exception&) {
        return 1;
    }
}

} // namespace

std::size_t thread_count() {
    const std::size_t forced = g_override.load();
    return forced > 0 ? forced : env_threads();
}

void set_thread_count(std::size_t threads) { g_override.store(threads); }

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body) {
    if (end <= begin) {
        return;
    }
    const std::size_t total = end - begin;
    const std::size_t workers = std::min(thread_count(), total);
    if (workers <= 1) {
        for (std::size_t i = begin; i < end; ++i) {
            body(i);
        }
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (total + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        pool.emplace_back([&body, &errors, w, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) {
                    body(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    pool.clear();
    for (const auto& error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }
}

} // namespace cdfts
