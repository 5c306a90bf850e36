#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "ltrank/errors.hpp"

// Little-endian binary encoding helpers shared by the index snapshot and the
// neighbor cache. All multi-byte values are written least significant byte
// first regardless of host order.

namespace ltrank::binio {

inline void write_bytes(std::ostream& out, const void* data, std::size_t n) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    write_bytes(out, b, 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    write_bytes(out, b, 8);
}

inline void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    write_u64(out, bits);
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    write_bytes(out, s.data(), s.size());
}

inline void read_bytes(std::istream& in, void* data, std::size_t n, const char* what) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw Error(errc::format,
                    std::string("truncated input while reading ") + what + " at byte offset " +
                        std::to_string(static_cast<long long>(in.tellg())));
    }
}

inline std::uint32_t read_u32(std::istream& in, const char* what) {
    unsigned char b[4];
    read_bytes(in, b, 4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline std::uint64_t read_u64(std::istream& in, const char* what) {
    unsigned char b[8];
    read_bytes(in, b, 8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline double read_f64(std::istream& in, const char* what) {
    std::uint64_t bits = read_u64(in, what);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

inline std::string read_string(std::istream& in, const char* what, std::uint32_t max_len = 1u << 20) {
    std::uint32_t n = read_u32(in, what);
    if (n > max_len) {
        throw Error(errc::format, std::string("implausible string length while reading ") + what);
    }
    std::string s(n, '\0');
    if (n > 0) read_bytes(in, s.data(), n, what);
    return s;
}

/// FNV-1a 64-bit hash, used to key the neighbor cache.
inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace ltrank::binio
