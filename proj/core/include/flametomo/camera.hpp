#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flametomo/types.hpp"

namespace flametomo {

// Pinhole camera. `rotation` and `translation` map world to camera
// coordinates: p_cam = rotation * p_world + translation. The camera looks
// along +z of its own frame, x to the right, y down the image.
struct CameraModel {
    double fx = 64.0;
    double fy = 64.0;
    double cx = 32.0;
    double cy = 32.0;
    int width = 64;
    int height = 64;
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    int id = 0;

    // Camera viewpoint in world coordinates, -R^T T.
    Vec3 center() const { return -rotation.transpose() * translation; }
    // Optical axis in world coordinates.
    Vec3 forward() const { return rotation.row(2).transpose(); }

    // Throws ValidationError when intrinsics or the rotation are invalid.
    void validate() const;
};

struct PixelProjection {
    double u;
    double v;
    double depth;  // z in the camera frame
};

// Projects a world point through the pinhole model. Returns nullopt when the
// point is not in front of the camera (depth <= 0) or is not finite.
std::optional<PixelProjection> project_world_to_pixel(const Vec3& point,
                                                       const CameraModel& camera);

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();  // unit length
    double near = 0.0;
    double far = 1.0;
    double u = 0.0;
    double v = 0.0;

    Vec3 at(double t) const { return origin + t * direction; }
};

enum class SamplingMode { StratifiedRandom, DeterministicMidpoint };

struct SamplingConfig {
    int count = 45;
    double near = 37.5;
    double far = 82.5;
    SamplingMode mode = SamplingMode::StratifiedRandom;
    std::uint64_t seed = 0;

    double step() const { return (far - near) / count; }
    void validate() const;
};

const char* to_string(SamplingMode mode);
SamplingMode sampling_mode_from_string(const std::string& name);

// Ray through pixel (u, v); near/far are taken from `sampling`. Throws
// ValidationError when the pixel lies outside the image.
Ray generate_ray(const CameraModel& camera, double u, double v,
                 const SamplingConfig& sampling);

// Distances s_1 < ... < s_N along the ray, one per stratum of
// [near, far]. In stratified mode the jitter is drawn from `rng`.
std::vector<double> sample_distances(const SamplingConfig& cfg, std::mt19937_64& rng);
// Same, with an RNG seeded from cfg.seed.
std::vector<double> sample_distances(const SamplingConfig& cfg);

// World positions origin + s_i * direction for the distances above.
std::vector<Vec3> sample_ray(const Ray& ray, const SamplingConfig& cfg,
                             std::mt19937_64& rng);
std::vector<Vec3> sample_ray(const Ray& ray, const SamplingConfig& cfg);

// Ring of cameras at a common height, all looking at the rig center.
struct RigConfig {
    int camera_count = 12;
    double radius = 60.0;
    double angular_spacing_deg = 30.0;
    double start_angle_deg = 0.0;
    double height = 0.0;
    int width = 64;
    int image_height = 64;
    double fx = 64.0;
    double fy = 64.0;
    double cx = 32.0;
    double cy = 32.0;

    void validate() const;
};

// World z is up. Camera k sits at angle start + k * spacing on the circle.
std::vector<CameraModel> build_rig(const RigConfig& rig);

// Camera at `eye` looking at `target`, with world +z as the up hint.
CameraModel look_at(const Vec3& eye, const Vec3& target, const CameraModel& intrinsics);

// Default near/far for a rig: a 45-unit segment centred on the rig center.
SamplingConfig default_sampling_for(const RigConfig& rig, double depth_extent = 45.0);

}  // namespace flametomo
