#pragma once

#include <cstdint>
#include <string_view>

namespace driftlab {

// Deterministic seed derivation. One canonical definition so independent
// implementations can reproduce the exact episode streams:
//
//   splitmix64(x): x += 0x9E3779B97F4A7C15
//                  z = x; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//                  z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//                  return z ^ (z >> 31)
//
//   mix_seed(a, b)                       = splitmix64(splitmix64(a) ^ b)
//   derive_seed(master, condition, ep)   = mix_seed(mix_seed(master, condition), ep)

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ b);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t condition,
                                    std::uint64_t episode) {
    return mix_seed(mix_seed(master, condition), episode);
}

/// FNV-1a over bytes; used to fold string ids (task ids, config text) into seeds.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace driftlab
