#pragma once

// Little-endian primitives shared by the descriptor and matrix containers.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "uerc/error.hpp"

namespace uerc::binary {

template <typename UInt>
void put_uint(std::ostream& out, UInt v) {
    char buf[sizeof(UInt)];
    for (std::size_t i = 0; i < sizeof(UInt); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(buf, sizeof buf);
}

template <typename UInt>
UInt get_uint(std::istream& in, const char* what) {
    unsigned char buf[sizeof(UInt)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof buf)) {
        throw FormatError(std::string("truncated input while reading ") + what);
    }
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(buf[i]) << (8 * i);
    return v;
}

inline void put_float(std::ostream& out, float f) { put_uint(out, std::bit_cast<std::uint32_t>(f)); }

inline float get_float(std::istream& in, const char* what) {
    return std::bit_cast<float>(get_uint<std::uint32_t>(in, what));
}

inline void expect_magic(std::istream& in, const std::string& magic) {
    std::string got(magic.size(), '\0');
    if (!in.read(got.data(), static_cast<std::streamsize>(got.size())) || got != magic) {
        throw FormatError("bad magic: expected " + magic);
    }
}

}  // namespace uerc::binary
