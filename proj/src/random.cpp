#include "gafzeros/random.hpp"

#include <cmath>
#include <numbers>

namespace gafz {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : id_{seed, stream}, engine_(make_engine(seed, stream)) {}

RandomStream RandomStream::derive(std::uint64_t child) const {
    return RandomStream(id_.seed, splitmix64(id_.stream ^ splitmix64(child + 1)));
}

double RandomStream::uniform() {
    constexpr double scale = 0x1.0p-53;
    return (static_cast<double>(engine_() >> 11) + 0.5) * scale;
}

double RandomStream::exponential() { return -std::log(uniform()); }

std::complex<double> RandomStream::unit_phase() {
    const double theta = 2.0 * std::numbers::pi * uniform();
    return {std::cos(theta), std::sin(theta)};
}

std::complex<double> RandomStream::complex_normal() {
    // |a|^2 ~ Exp(1) with an independent uniform phase is exactly the
    // circularly-symmetric complex normal with E|a|^2 = 1.
    const double modulus = std::sqrt(exponential());
    return modulus * unit_phase();
}

}  // namespace gafz
