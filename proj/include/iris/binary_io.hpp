#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

namespace iris::binary_io {

// Little-endian fixed-width helpers shared by the template and model formats.

inline void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

inline void write_f64(std::ostream& out, double v) {
    write_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline bool read_u64(std::istream& in, std::uint64_t& v) {
    unsigned char buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8)) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return true;
}

inline bool read_f64(std::istream& in, double& v) {
    std::uint64_t bits = 0;
    if (!read_u64(in, bits)) return false;
    v = std::bit_cast<double>(bits);
    return true;
}

}  // namespace iris::binary_io
