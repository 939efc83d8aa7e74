#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flametomo {

// Portable graymap (Netpbm PGM). 8-bit (maxval <= 255) or 16-bit
// (maxval <= 65535, samples big-endian per the Netpbm definition).
struct GrayImage {
    int width = 0;
    int height = 0;
    int maxval = 255;
    std::vector<std::uint16_t> pixels;  // row-major
    std::vector<std::string> comments;

    std::uint16_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

// Accepts binary (P5) and plain (P2) graymaps.
GrayImage parse_pgm(const std::string& bytes, const std::string& what = "graymap");
GrayImage read_pgm(const std::string& path);

// Always writes binary P5.
std::string encode_pgm(const GrayImage& img);
void write_pgm(const GrayImage& img, const std::string& path);

}  // namespace flametomo
