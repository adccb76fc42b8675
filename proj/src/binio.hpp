#pragma once

// Little-endian binary file helpers shared by the index persistence code.
// Readers throw ParseError on truncated or oversized fields so corrupt
// files surface as descriptive errors instead of garbage state.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "kbound/errors.hpp"

namespace kbound::binio {

inline void write_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ofstream& out, std::uint64_t v) {
    write_u32(out, static_cast<std::uint32_t>(v));
    write_u32(out, static_cast<std::uint32_t>(v >> 32));
}

inline void write_string(std::ofstream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void write_f32(std::ofstream& out, float v) {
    std::uint32_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    write_u32(out, bits);
}

class Reader {
public:
    Reader(std::ifstream& in, std::string path)
        : in_(in), path_(std::move(path)) {}

    std::uint32_t u32() {
        unsigned char b[4];
        take(b, 4);
        return static_cast<std::uint32_t>(b[0]) |
               (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) |
               (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::uint64_t u64() {
        std::uint64_t lo = u32();
        std::uint64_t hi = u32();
        return lo | (hi << 32);
    }

    float f32() {
        std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    std::string string(std::uint64_t max_len = (1ull << 32)) {
        std::uint64_t n = u64();
        if (n > max_len) {
            throw ParseError("corrupt file (oversized field): " + path_);
        }
        std::string s(n, '\0');
        take(s.data(), n);
        return s;
    }

private:
    void take(void* dst, std::uint64_t n) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::uint64_t>(in_.gcount()) != n) {
            throw ParseError("corrupt file (truncated): " + path_);
        }
    }

    std::ifstream& in_;
    std::string path_;
};

}  // namespace kbound::binio
