#pragma once

#include <string>
#include <vector>

#include "flametomo/camera.hpp"
#include "flametomo/projection.hpp"

namespace flametomo {

// Projections plus the geometry and quadrature that produced them.
//
// File layout (all integers and floats little-endian):
//   "FTPROJ\r\n"            8-byte magic
//   u32 version             currently 1
//   u32 sample_count, f64 near, f64 far      projector quadrature
//   u32 camera_count
//   per camera: i32 id, u32 width, u32 height, f64 fx fy cx cy,
//               f64 rotation[9] (row-major), f64 translation[3]
//   per camera: i32 camera_id, u32 width, u32 height, u8 noise kind,
//               f64 noise intensity, f64 values[width*height] (row-major)
//   u32 CRC-32 of all preceding bytes
struct Dataset {
    std::vector<CameraModel> cameras;
    std::vector<ProjectionImage> images;
    int sample_count = 45;
    double near = 37.5;
    double far = 82.5;

    void validate() const;
};

inline constexpr std::uint32_t kDatasetVersion = 1;

void write_dataset(const Dataset& dataset, const std::string& path);
Dataset read_dataset(const std::string& path);

std::vector<std::uint8_t> encode_dataset(const Dataset& dataset);
Dataset decode_dataset(std::span<const std::uint8_t> bytes, const std::string& what = "dataset");

}  // namespace flametomo
