#include "mixts/rng.hpp"

#include <array>

#include "mixts/normal.hpp"

namespace mixts {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t key) {
    std::array<std::uint32_t, 4> words = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                                          static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    std::seed_seq seq(words.begin(), words.end());
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

std::uint64_t stream_key(std::string_view name) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(mix(seed, 0)) {}

RngStream::RngStream(std::uint64_t seed, std::string_view name)
    : seed_(mix(seed, stream_key(name))), engine_(seed_) {}

RngStream RngStream::substream(std::string_view name) const { return RngStream(seed_, name); }

double RngStream::uniform() {
    // 52 random bits centred in their cell: (j + 1/2) 2^-52 is exact, so 0
    // and 1 are never returned.
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::normal() { return norm_quantile(uniform()); }

}  // namespace mixts
