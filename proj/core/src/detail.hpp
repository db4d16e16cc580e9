#pragma once

#include "msbm/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace msbm::detail {

/// Runs body(k) for k in [0, count) on up to `threads` workers.
template <typename Body>
void parallel_for(std::size_t count, int threads, Body&& body)
{
    const auto workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

/// Per-word sums of posterior rows, touching only the words that occur.
class WordAccumulator
{
public:
    WordAccumulator(std::size_t words, int blocks)
        : Q_{static_cast<std::size_t>(blocks)}, sums_(words * Q_, 0.0), seen_(words, 0)
    {
    }

    void add(Word w, std::span<const double> row)
    {
        if (!seen_[w]) {
            seen_[w] = 1;
            touched_.push_back(w);
        }
        double* dst = sums_.data() + w * Q_;
        for (std::size_t l = 0; l < Q_; ++l) dst[l] += row[l];
    }

    void clear()
    {
        for (auto w : touched_) {
            std::fill_n(sums_.data() + w * Q_, Q_, 0.0);
            seen_[w] = 0;
        }
        touched_.clear();
    }

    std::span<const Word> touched() const noexcept { return touched_; }
    const double* sums(Word w) const noexcept { return sums_.data() + w * Q_; }

private:
    std::size_t Q_;
    std::vector<double> sums_;
    std::vector<char> seen_;
    std::vector<Word> touched_;
};

} // namespace msbm::detail
