#include "flametomo/encoding.hpp"

#include <cmath>
#include <numbers>

#include "flametomo/error.hpp"

namespace flametomo {

void EncodingConfig::validate() const {
    if (levels < 1) throw ValidationError("encoding levels must be >= 1");
    if (levels > 30) throw ValidationError("encoding levels must be <= 30");
    if (!(domain_half_extent > 0.0) || !std::isfinite(domain_half_extent) ||
        !domain_center.allFinite()) {
        throw ValidationError("encoding domain must be finite with positive half extent");
    }
}

namespace {

template <typename Out>
void encode_into(const Vec3& point, const EncodingConfig& cfg, Out&& out) {
    int row = 0;
    const Vec3 s = (point - cfg.domain_center) / cfg.domain_half_extent;
    if (cfg.include_raw) {
        for (int d = 0; d < 3; ++d) out(row++) = s[d];
    }
    for (int d = 0; d < 3; ++d) {
        double freq = std::numbers::pi;
        for (int k = 0; k < cfg.levels; ++k) {
            out(row++) = std::sin(freq * s[d]);
            out(row++) = std::cos(freq * s[d]);
            freq *= 2.0;
        }
    }
}

}  // namespace

VectorX<double> positional_encode(const Vec3& point, const EncodingConfig& cfg) {
    VectorX<double> out(cfg.output_dim());
    encode_into(point, cfg, [&out](int i) -> double& { return out(i); });
    return out;
}

template <typename Scalar>
void encode_batch(std::span<const Vec3> points, const EncodingConfig& cfg,
                  MatrixX<Scalar>& out) {
    out.resize(cfg.output_dim(), static_cast<Eigen::Index>(points.size()));
    for (std::size_t j = 0; j < points.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        encode_into(points[j], cfg, [&out, col](int i) -> Scalar& { return out(i, col); });
    }
}

template void encode_batch<double>(std::span<const Vec3>, const EncodingConfig&,
                                   MatrixX<double>&);
template void encode_batch<float>(std::span<const Vec3>, const EncodingConfig&,
                                  MatrixX<float>&);

}  // namespace flametomo
