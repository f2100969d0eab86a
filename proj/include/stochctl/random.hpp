#pragma once

#include <cstdint>
#include <random>

namespace stochctl {

/// Derive the seed of substream `stream_index` from a master seed.
///
/// The mapping is a SplitMix64 finalizer applied to
/// `master + (stream_index + 1) * 0x9E3779B97F4A7C15`, iterated twice. It is
/// fixed so that ensemble member k always draws from the same substream no
/// matter how many members run or in which order they are scheduled.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_index) noexcept;

/// Seeded random source. All draws are built from raw 64-bit engine output
/// so sequences are identical across standard library implementations.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    /// Independent substream for ensemble member `index`.
    RandomStream split(std::uint64_t index) const { return RandomStream(derive_seed(seed_, index)); }

    std::uint64_t seed() const noexcept { return seed_; }

    /// Raw 64-bit engine output.
    std::uint64_t next_u64() noexcept { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;

    /// Standard normal deviate (Marsaglia polar method).
    double normal() noexcept;

  private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Gamma(shape, scale) sampler.
///
/// Marsaglia-Tsang squeeze/rejection for shape >= 1. For shape < 1 a
/// Gamma(shape + 1) draw is boosted by U^(1/shape); the product is formed in
/// log space and results below the smallest normal double are returned as
/// that value so draws stay strictly positive.
class GammaSampler {
  public:
    GammaSampler(double shape, double scale);

    double operator()(RandomStream& rng) const;

    double shape() const noexcept { return shape_; }
    double scale() const noexcept { return scale_; }

  private:
    double draw_unit(RandomStream& rng, double d, double c) const;

    double shape_;
    double scale_;
    double d_;
    double c_;
};

} // namespace stochctl
