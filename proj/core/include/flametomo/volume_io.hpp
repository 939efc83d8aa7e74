#pragma once

#include <optional>
#include <string>

#include "flametomo/graymap.hpp"
#include "flametomo/volume.hpp"

namespace flametomo {

// Volume on disk: `<path>` holds raw 64-bit little-endian floats, x fastest;
// `<path>.json` is the sidecar with the grid (origin and spacing in world
// units), units ("K"), layout, and the CRC-32 of the raw bytes.
void write_volume(const VoxelGrid& grid, const std::string& path);
VoxelGrid read_volume(const std::string& path);

std::string volume_sidecar_path(const std::string& path);

// Linear value -> gray mapping for 16-bit graymaps:
//   gray = round(65535 * (v - lo) / (hi - lo)), clamped to [0, 65535];
//   if hi == lo every pixel is 0.
struct GrayMapping {
    double lo = 0.0;
    double hi = 1.0;
};

GrayImage slice_to_graymap(const SliceImage& slice, const GrayMapping& mapping);
GrayMapping auto_mapping(const SliceImage& slice);

// Writes `<prefix>.pgm` (16-bit graymap, mapping recorded in header comments),
// `<prefix>.f64` (raw little-endian floats, row-major) and `<prefix>.json`
// (axis, requested and snapped coordinate, plane index, dims, mapping, kind,
// CRC-32 of the raw floats).
void write_slice(const SliceImage& slice, const std::string& prefix,
                 std::optional<GrayMapping> mapping = std::nullopt);
SliceImage read_slice(const std::string& prefix);

}  // namespace flametomo
