#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace taoquant {

/// FNV-1a 64-bit. Used for cache keys and artifact manifests; stable across
/// platforms and good enough for change detection (not cryptographic).
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v);

/// FNV-1a of a whole file's bytes. Throws DataError if unreadable.
std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace taoquant
