#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flametomo/camera.hpp"
#include "flametomo/phantom.hpp"

namespace flametomo {

enum class NoiseKind : std::uint8_t { Clean = 0, Gaussian = 1, SaltPepper = 2 };

struct Provenance {
    NoiseKind kind = NoiseKind::Clean;
    double intensity = 0.0;

    bool operator==(const Provenance&) const = default;
};

std::string describe(const Provenance& p);

// One camera's projected temperatures (K * world unit), row-major, v rows
// of u columns.
struct ProjectionImage {
    int camera_id = 0;
    int width = 0;
    int height = 0;
    std::vector<double> values;
    Provenance provenance;

    double& at(int u, int v) { return values[static_cast<std::size_t>(v) * width + u]; }
    double at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u]; }
    double max_value() const;
};

// Quadrature shared by the projector and the renderer: sum of samples * step,
// accumulated in sample order.
double ray_quadrature(std::span<const double> samples, double step);

using ScalarField = std::function<double(const Vec3&)>;

// Integrates an arbitrary field through every pixel of `camera`. Stratified
// jitter, if any, comes from an RNG seeded with cfg.seed and the camera id.
ProjectionImage project_field(const ScalarField& field, const CameraModel& camera,
                              const SamplingConfig& cfg);

// Line integral of the phantom through one ray using the shared quadrature.
double integrate_ray(const ScalarField& field, const Ray& ray, const SamplingConfig& cfg,
                     std::mt19937_64& rng);

ProjectionImage forward_project(const PhantomSpec& spec, const CameraModel& camera,
                                const SamplingConfig& cfg);

// Largest value over a set of images; the noise reference level.
double dataset_max(std::span<const ProjectionImage> images);

// v += N(0, (intensity * reference_max)^2) per pixel.
ProjectionImage add_gaussian_noise(const ProjectionImage& img, double intensity,
                                   double reference_max, std::uint64_t seed);
// Each pixel is corrupted with probability `intensity`, becoming 0 or
// reference_max with equal odds.
ProjectionImage add_salt_pepper_noise(const ProjectionImage& img, double intensity,
                                      double reference_max, std::uint64_t seed);

// Dataset-level helpers: reference is the max over `images`, and every image
// gets its own stream derived from `seed` and its camera id.
std::vector<ProjectionImage> add_gaussian_noise(std::span<const ProjectionImage> images,
                                                double intensity, std::uint64_t seed);
std::vector<ProjectionImage> add_salt_pepper_noise(std::span<const ProjectionImage> images,
                                                   double intensity, std::uint64_t seed);

// Per-image RNG seed derived from a run seed and a stream index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace flametomo
