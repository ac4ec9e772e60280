#include "ssmean/rng.hpp"

#include <cmath>

namespace ssmean {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x5eedu};
    return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : engine_(seeded_engine(seed, stream)) {}

double RngStream::uniform() {
    // 53 random mantissa bits, shifted by half an ulp so 0 is never returned.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

std::int64_t RngStream::poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(engine_);
}

RngStream rng_stream(std::uint64_t seed, std::uint64_t stream) { return RngStream(seed, stream); }

}  // namespace ssmean
