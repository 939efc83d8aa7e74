#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flametomo/error.hpp"

namespace flametomo::detail {

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

// Little-endian byte sink.
class ByteWriter {
public:
    void put_bytes(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
    void put_u8(std::uint8_t v) { bytes_.push_back(v); }
    void put_u32(std::uint32_t v) { put_le(v); }
    void put_i32(std::int32_t v) { put_le(static_cast<std::uint32_t>(v)); }
    void put_u64(std::uint64_t v) { put_le(v); }
    void put_f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }
    void put_f64s(std::span<const double> vs) {
        for (double v : vs) put_f64(v);
    }
    // Appends the CRC-32 of everything written so far.
    void seal() { put_u32(crc32(bytes_)); }

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    template <typename U>
    void put_le(U v) {
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    std::vector<std::uint8_t> bytes_;
};

// Little-endian byte source. Running past the end raises MalformedFileError.
class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, std::string what)
        : bytes_(bytes), what_(std::move(what)) {}

    std::string get_bytes(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    std::uint8_t get_u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint32_t get_u32() { return get_le<std::uint32_t>(); }
    std::int32_t get_i32() { return static_cast<std::int32_t>(get_le<std::uint32_t>()); }
    std::uint64_t get_u64() { return get_le<std::uint64_t>(); }
    double get_f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }
    void get_f64s(std::span<double> out) {
        need(out.size() * 8);
        for (double& v : out) v = get_f64();
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw MalformedFileError(what_ + ": unexpected end of data");
    }
    template <typename U>
    U get_le() {
        need(sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            v |= static_cast<U>(bytes_[pos_ + i]) << (8 * i);
        }
        pos_ += sizeof(U);
        return v;
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::string what_;
};

// Checks magic, version, and trailing CRC of a sealed container. Returns the
// payload between the version field and the CRC.
std::span<const std::uint8_t> open_sealed(std::span<const std::uint8_t> bytes,
                                          std::string_view magic, std::uint32_t version,
                                          const std::string& what);

}  // namespace flametomo::detail
