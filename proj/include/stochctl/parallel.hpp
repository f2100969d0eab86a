#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stochctl {

/// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
/// Results must be written to per-index slots by the caller; the first
/// exception thrown by any body is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, Body&& body, unsigned max_threads = 0) {
    unsigned threads = max_threads == 0 ? std::thread::hardware_concurrency() : max_threads;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(count, 1024))));
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

/// Streaming mean and co-moment matrix of a fixed-size real vector
/// (Welford update, Chan merge).
template <std::size_t N>
class MomentAccumulator {
  public:
    void add(const std::array<double, N>& x) {
        ++count_;
        std::array<double, N> delta;
        for (std::size_t i = 0; i < N; ++i) {
            delta[i] = x[i] - mean_[i];
            mean_[i] += delta[i] / static_cast<double>(count_);
        }
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = 0; j < N; ++j) comoment_[i][j] += delta[i] * (x[j] - mean_[j]);
        }
    }

    void merge(const MomentAccumulator& other) {
        if (other.count_ == 0) return;
        if (count_ == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(count_), nb = static_cast<double>(other.count_);
        const double n = na + nb;
        std::array<double, N> delta;
        for (std::size_t i = 0; i < N; ++i) delta[i] = other.mean_[i] - mean_[i];
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = 0; j < N; ++j) {
                comoment_[i][j] += other.comoment_[i][j] + delta[i] * delta[j] * na * nb / n;
            }
        }
        for (std::size_t i = 0; i < N; ++i) mean_[i] += delta[i] * nb / n;
        count_ += other.count_;
    }

    std::size_t count() const noexcept { return count_; }
    double mean(std::size_t i) const noexcept { return mean_[i]; }
    /// Unbiased sample covariance.
    double covariance(std::size_t i, std::size_t j) const noexcept {
        return count_ > 1 ? comoment_[i][j] / static_cast<double>(count_ - 1) : 0.0;
    }

  private:
    std::size_t count_ = 0;
    std::array<double, N> mean_{};
    std::array<std::array<double, N>, N> comoment_{};
};

} // namespace stochctl
