#pragma once

#include <span>

#include "flametomo/types.hpp"

namespace flametomo {

// Frequency encoding of a 3D point. Coordinates are first mapped affinely so
// that the target cube [center - half_extent, center + half_extent]^3 becomes
// [-1, 1]^3, then each normalised coordinate s expands to
// sin(2^k pi s), cos(2^k pi s) for k = 0..levels-1.
//
// Output layout: [x, y, z] (when include_raw), then for x, y, z in turn the
// interleaved sin/cos pairs in increasing frequency.
struct EncodingConfig {
    int levels = 5;
    bool include_raw = true;
    Vec3 domain_center = Vec3::Zero();
    double domain_half_extent = 22.5;

    int output_dim() const { return (include_raw ? 3 : 0) + 3 * 2 * levels; }
    void validate() const;

    bool operator==(const EncodingConfig&) const = default;
};

VectorX<double> positional_encode(const Vec3& point, const EncodingConfig& cfg);

// Encodes points column by column into `out` (output_dim x points.size()).
template <typename Scalar>
void encode_batch(std::span<const Vec3> points, const EncodingConfig& cfg,
                  MatrixX<Scalar>& out);

}  // namespace flametomo
