#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace gafz {

// Reproducibility token: a user seed plus a stream index. Two streams with
// the same token produce bit-identical sequences on every platform.
struct StreamId {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    friend bool operator==(const StreamId&, const StreamId&) = default;
};

// Seeded random stream. The engine is std::mt19937_64 (fully specified by
// the standard); all variates are derived from raw 64-bit outputs here, so
// no implementation-defined std:: distribution is involved.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);
    explicit RandomStream(StreamId id) : RandomStream(id.seed, id.stream) {}

    StreamId id() const noexcept { return id_; }

    // Child stream, disjoint from this one for distinct `child` values.
    RandomStream derive(std::uint64_t child) const;

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();

    /// Exponential with mean 1.
    double exponential();

    /// Standard complex normal with E|a|^2 = 1: real and imaginary parts are
    /// independent N(0, 1/2).
    std::complex<double> complex_normal();

    /// Uniform phase e^{i theta}.
    std::complex<double> unit_phase();

  private:
    StreamId id_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gafz
