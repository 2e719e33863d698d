#pragma once

// Counter-based random streams keyed by (seed, path_index, role label).
// Every stream is an independent SplitMix64 sequence; path generation is
// stateless given the key, so paths can be produced in parallel and in
// any order with identical results.

#include <cstdint>
#include <string_view>

namespace spdelab {

/// 64-bit mix with full avalanche (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Stream id = hash(seed, path_index, label).
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t path_index, std::string_view label);

class Rng {
public:
    explicit Rng(std::uint64_t key) : state_(key) {}
    Rng(std::uint64_t seed, std::uint64_t path_index, std::string_view label)
        : state_(stream_key(seed, path_index, label)) {}

    std::uint64_t next_u64();

    /// Uniform on (0, 1).
    double uniform();

    /// Standard normal via Box-Muller (deterministic across platforms).
    double normal();

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace spdelab
