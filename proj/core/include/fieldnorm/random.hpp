#pragma once

#include <cstdint>
#include <string_view>

#include <boost/random/mersenne_twister.hpp>

namespace fieldnorm {

// Every random stream in the toolkit is a boost::random::mt19937_64 seeded
// with a SplitMix64-mixed key derived from (seed, label, index). Boost's
// engines and distributions are specified by source rather than by the
// standard library vendor, so draws are identical across platforms.
using Engine = boost::random::mt19937_64;

inline constexpr std::string_view kGeneratorId = "mt19937_64+splitmix64/boost-random";

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// FNV-1a over the label, folded into the seed.
constexpr std::uint64_t label_hash(std::string_view label) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

constexpr std::uint64_t substream_key(std::uint64_t seed, std::string_view label,
                                      std::uint64_t index = 0) noexcept {
    return splitmix64(splitmix64(seed ^ label_hash(label)) + index);
}

inline Engine make_engine(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) {
    return Engine(substream_key(seed, label, index));
}

}  // namespace fieldnorm
