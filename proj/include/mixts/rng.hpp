#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mixts {

/// Seeded generator with named sub-streams. A stream is a pure function of
/// (seed, name), so replications can be generated in any order or in
/// parallel. Uniform and normal draws are computed here rather than through
/// <random> distributions so output is identical across standard libraries.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);
    RngStream(std::uint64_t seed, std::string_view name);

    /// Independent child stream, e.g. substream("bootstrap:3").
    RngStream substream(std::string_view name) const;

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Standard normal by inversion.
    double normal();

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// FNV-1a hash used to key sub-streams by name.
std::uint64_t stream_key(std::string_view name);

}  // namespace mixts
