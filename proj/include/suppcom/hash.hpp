#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace suppcom {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

// SHA-256 of a file's bytes; empty string when the file cannot be read.
std::string sha256_file(const std::string& path);

// 64-bit FNV-1a. Stable across processes and platforms.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// splitmix64 finalizer, used to decorrelate FNV outputs.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace suppcom
