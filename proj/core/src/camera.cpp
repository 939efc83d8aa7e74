#include "flametomo/camera.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

#include "flametomo/error.hpp"

namespace flametomo {

void CameraModel::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) {
        throw ValidationError("camera " + std::to_string(id) + ": focal lengths must be positive");
    }
    if (width < 1 || height < 1) {
        throw ValidationError("camera " + std::to_string(id) + ": image size must be positive");
    }
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
        throw ValidationError("camera " + std::to_string(id) + ": principal point outside image");
    }
    const Mat3 gram = rotation.transpose() * rotation - Mat3::Identity();
    if (!rotation.allFinite() || gram.cwiseAbs().maxCoeff() >= 1e-9 ||
        std::abs(rotation.determinant() - 1.0) >= 1e-9) {
        throw ValidationError("camera " + std::to_string(id) + ": rotation is not a proper rotation");
    }
    if (!translation.allFinite()) {
        throw ValidationError("camera " + std::to_string(id) + ": translation is not finite");
    }
}

std::optional<PixelProjection> project_world_to_pixel(const Vec3& point,
                                                       const CameraModel& camera) {
    if (!point.allFinite()) return std::nullopt;
    const Vec3 p = camera.rotation * point + camera.translation;
    if (!(p.z() > 0.0)) return std::nullopt;
    return PixelProjection{camera.fx * p.x() / p.z() + camera.cx,
                           camera.fy * p.y() / p.z() + camera.cy, p.z()};
}

void SamplingConfig::validate() const {
    if (count < 1) throw ValidationError("sampling count must be >= 1");
    if (!std::isfinite(near) || !std::isfinite(far) || near < 0.0) {
        throw ValidationError("sampling near/far must be finite with near >= 0");
    }
    if (!(far > near) || !(step() > 0.0)) {
        throw ValidationError("sampling far must exceed near");
    }
}

const char* to_string(SamplingMode mode) {
    switch (mode) {
        case SamplingMode::StratifiedRandom: return "stratified-random";
        case SamplingMode::DeterministicMidpoint: return "deterministic-midpoint";
    }
    return "unknown";
}

SamplingMode sampling_mode_from_string(const std::string& name) {
    if (name == "stratified-random") return SamplingMode::StratifiedRandom;
    if (name == "deterministic-midpoint") return SamplingMode::DeterministicMidpoint;
    throw ValidationError("unknown sampling mode '" + name + "'");
}

Ray generate_ray(const CameraModel& camera, double u, double v,
                 const SamplingConfig& sampling) {
    if (!(u >= 0.0 && u < camera.width && v >= 0.0 && v < camera.height)) {
        throw ValidationError("pixel (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") outside image of camera " + std::to_string(camera.id));
    }
    const Vec3 dir_cam((u - camera.cx) / camera.fx, (v - camera.cy) / camera.fy, 1.0);
    Ray ray;
    ray.origin = camera.center();
    ray.direction = (camera.rotation.transpose() * dir_cam).normalized();
    ray.near = sampling.near;
    ray.far = sampling.far;
    ray.u = u;
    ray.v = v;
    return ray;
}

std::vector<double> sample_distances(const SamplingConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    const double span = cfg.far - cfg.near;
    const double n = static_cast<double>(cfg.count);
    std::vector<double> s(static_cast<std::size_t>(cfg.count));
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    for (int i = 0; i < cfg.count; ++i) {
        const double offset =
            cfg.mode == SamplingMode::DeterministicMidpoint ? 0.5 : jitter(rng);
        s[static_cast<std::size_t>(i)] = cfg.near + (i + offset) / n * span;
    }
    return s;
}

std::vector<double> sample_distances(const SamplingConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    return sample_distances(cfg, rng);
}

namespace {

std::vector<Vec3> positions_along(const Ray& ray, const std::vector<double>& s) {
    std::vector<Vec3> out;
    out.reserve(s.size());
    for (double t : s) out.push_back(ray.at(t));
    return out;
}

}  // namespace

std::vector<Vec3> sample_ray(const Ray& ray, const SamplingConfig& cfg, std::mt19937_64& rng) {
    return positions_along(ray, sample_distances(cfg, rng));
}

std::vector<Vec3> sample_ray(const Ray& ray, const SamplingConfig& cfg) {
    return positions_along(ray, sample_distances(cfg));
}

void RigConfig::validate() const {
    if (camera_count < 1) throw ValidationError("rig camera_count must be >= 1");
    if (!(radius > 0.0)) throw ValidationError("rig radius must be positive");
    if (!std::isfinite(angular_spacing_deg) || !std::isfinite(start_angle_deg) ||
        !std::isfinite(height)) {
        throw ValidationError("rig angles and height must be finite");
    }
    CameraModel probe;
    probe.fx = fx;
    probe.fy = fy;
    probe.cx = cx;
    probe.cy = cy;
    probe.width = width;
    probe.height = image_height;
    probe.validate();
}

CameraModel look_at(const Vec3& eye, const Vec3& target, const CameraModel& intrinsics) {
    const Vec3 z = (target - eye).normalized();
    Vec3 up = Vec3::UnitZ();
    if (std::abs(z.dot(up)) > 1.0 - 1e-12) up = Vec3::UnitY();
    // Image y points down, so the camera y axis is the negated up vector
    // made orthogonal to the viewing direction.
    const Vec3 y = (z * z.dot(up) - up).normalized();
    const Vec3 x = y.cross(z);
    CameraModel cam = intrinsics;
    cam.rotation.row(0) = x.transpose();
    cam.rotation.row(1) = y.transpose();
    cam.rotation.row(2) = z.transpose();
    cam.translation = -cam.rotation * eye;
    return cam;
}

std::vector<CameraModel> build_rig(const RigConfig& rig) {
    rig.validate();
    CameraModel intrinsics;
    intrinsics.fx = rig.fx;
    intrinsics.fy = rig.fy;
    intrinsics.cx = rig.cx;
    intrinsics.cy = rig.cy;
    intrinsics.width = rig.width;
    intrinsics.height = rig.image_height;

    std::vector<CameraModel> cams;
    cams.reserve(static_cast<std::size_t>(rig.camera_count));
    const Vec3 target(0.0, 0.0, rig.height);
    for (int k = 0; k < rig.camera_count; ++k) {
        const double angle =
            (rig.start_angle_deg + k * rig.angular_spacing_deg) * std::numbers::pi / 180.0;
        const Vec3 eye(rig.radius * std::cos(angle), rig.radius * std::sin(angle), rig.height);
        CameraModel cam = look_at(eye, target, intrinsics);
        cam.id = k;
        cams.push_back(cam);
    }
    return cams;
}

SamplingConfig default_sampling_for(const RigConfig& rig, double depth_extent) {
    SamplingConfig cfg;
    cfg.count = 45;
    cfg.near = rig.radius - depth_extent / 2.0;
    cfg.far = cfg.near + depth_extent;
    return cfg;
}

}  // namespace flametomo
