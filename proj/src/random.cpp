#include "stochctl/random.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "stochctl/errors.hpp"

namespace stochctl {

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_index) noexcept {
    const std::uint64_t z = master + (stream_index + 1) * 0x9E3779B97F4A7C15ULL;
    return splitmix64(splitmix64(z));
}

double RandomStream::uniform() noexcept {
    // 53 random mantissa bits, offset by half an ulp so 0 and 1 never occur.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

GammaSampler::GammaSampler(double shape, double scale) : shape_(shape), scale_(scale) {
    if (!(shape > 0.0) || !std::isfinite(shape) || !(scale > 0.0) || !std::isfinite(scale)) {
        throw InvalidParameter("GammaSampler: shape and scale must be finite and positive (shape=" +
                               std::to_string(shape) + ", scale=" + std::to_string(scale) + ")");
    }
    const double boosted = shape_ < 1.0 ? shape_ + 1.0 : shape_;
    d_ = boosted - 1.0 / 3.0;
    c_ = 1.0 / std::sqrt(9.0 * d_);
}

double GammaSampler::draw_unit(RandomStream& rng, double d, double c) const {
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double GammaSampler::operator()(RandomStream& rng) const {
    const double g = draw_unit(rng, d_, c_);
    if (shape_ >= 1.0) return scale_ * g;
    const double log_value = std::log(g) + std::log(rng.uniform()) / shape_ + std::log(scale_);
    const double value = std::exp(log_value);
    return value < std::numeric_limits<double>::min() ? std::numeric_limits<double>::min() : value;
}

} // namespace stochctl
