#pragma once

#include <cstdint>
#include <random>

namespace ssmean {

/// One reproducible random stream. Streams with the same seed but different
/// stream ids are seeded through std::seed_seq from the (seed, stream) words,
/// so replication k always sees the same numbers no matter which thread runs it.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    /// Uniform on the open interval (0, 1).
    double uniform();

    /// Standard normal (Marsaglia polar method).
    double normal();

    std::int64_t poisson(double mean);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

RngStream rng_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace ssmean
