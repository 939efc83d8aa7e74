#include "flametomo/detail/binary_io.hpp"

#include <zlib.h>

namespace flametomo::detail {

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed large buffers in pieces.
    std::size_t offset = 0;
    while (offset < bytes.size()) {
        const std::size_t n = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
        crc = ::crc32(crc, bytes.data() + offset, static_cast<uInt>(n));
        offset += n;
    }
    return static_cast<std::uint32_t>(crc);
}

std::span<const std::uint8_t> open_sealed(std::span<const std::uint8_t> bytes,
                                          std::string_view magic, std::uint32_t version,
                                          const std::string& what) {
    const std::size_t header = magic.size() + 4;
    if (bytes.size() < header + 4) throw MalformedFileError(what + ": file too short");
    if (std::string_view(reinterpret_cast<const char*>(bytes.data()), magic.size()) != magic) {
        throw MalformedFileError(what + ": bad magic bytes");
    }
    ByteReader head(bytes.subspan(magic.size(), 4), what);
    const std::uint32_t found = head.get_u32();
    if (found != version) {
        throw VersionMismatchError(what + ": format version " + std::to_string(found) +
                                   ", expected " + std::to_string(version));
    }
    const std::size_t body_end = bytes.size() - 4;
    ByteReader tail(bytes.subspan(body_end), what);
    const std::uint32_t stored = tail.get_u32();
    if (crc32(bytes.first(body_end)) != stored) {
        throw ChecksumError(what + ": CRC mismatch (file truncated or corrupted)");
    }
    return bytes.subspan(header, body_end - header);
}

}  // namespace flametomo::detail
