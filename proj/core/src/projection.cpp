#include "flametomo/projection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flametomo/error.hpp"

namespace flametomo {

std::string describe(const Provenance& p) {
    std::ostringstream os;
    switch (p.kind) {
        case NoiseKind::Clean: return "clean";
        case NoiseKind::Gaussian: os << "gaussian-noise(" << p.intensity << ")"; break;
        case NoiseKind::SaltPepper: os << "salt-pepper-noise(" << p.intensity << ")"; break;
    }
    return os.str();
}

double ProjectionImage::max_value() const {
    if (values.empty()) return 0.0;
    return *std::max_element(values.begin(), values.end());
}

double ray_quadrature(std::span<const double> samples, double step) {
    double sum = 0.0;
    for (double s : samples) sum += s;
    return sum * step;
}

double integrate_ray(const ScalarField& field, const Ray& ray, const SamplingConfig& cfg,
                     std::mt19937_64& rng) {
    const std::vector<double> s = sample_distances(cfg, rng);
    std::vector<double> values(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) values[i] = field(ray.at(s[i]));
    return ray_quadrature(values, cfg.step());
}

ProjectionImage project_field(const ScalarField& field, const CameraModel& camera,
                              const SamplingConfig& cfg) {
    cfg.validate();
    ProjectionImage img;
    img.camera_id = camera.id;
    img.width = camera.width;
    img.height = camera.height;
    img.values.resize(static_cast<std::size_t>(camera.width) * camera.height);
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(camera.id)));
    for (int v = 0; v < camera.height; ++v) {
        for (int u = 0; u < camera.width; ++u) {
            const Ray ray = generate_ray(camera, u, v, cfg);
            img.at(u, v) = integrate_ray(field, ray, cfg, rng);
        }
    }
    return img;
}

ProjectionImage forward_project(const PhantomSpec& spec, const CameraModel& camera,
                                const SamplingConfig& cfg) {
    spec.validate();
    return project_field([&spec](const Vec3& p) { return phantom_temperature(spec, p); },
                         camera, cfg);
}

double dataset_max(std::span<const ProjectionImage> images) {
    double m = 0.0;
    for (const auto& img : images) m = std::max(m, img.max_value());
    return m;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser over the combined value
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

void check_intensity(double intensity) {
    if (!(intensity >= 0.0 && intensity <= 1.0)) {
        throw ValidationError("noise intensity must lie in [0, 1]");
    }
}

}  // namespace

ProjectionImage add_gaussian_noise(const ProjectionImage& img, double intensity,
                                   double reference_max, std::uint64_t seed) {
    check_intensity(intensity);
    ProjectionImage out = img;
    out.provenance = {NoiseKind::Gaussian, intensity};
    if (intensity == 0.0) return out;
    const double sigma = intensity * reference_max;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (double& v : out.values) v += sigma * noise(rng);
    return out;
}

ProjectionImage add_salt_pepper_noise(const ProjectionImage& img, double intensity,
                                      double reference_max, std::uint64_t seed) {
    check_intensity(intensity);
    ProjectionImage out = img;
    out.provenance = {NoiseKind::SaltPepper, intensity};
    if (intensity == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (double& v : out.values) {
        const bool corrupt = coin(rng) < intensity;
        const bool salt = coin(rng) < 0.5;
        if (corrupt) v = salt ? reference_max : 0.0;
    }
    return out;
}

std::vector<ProjectionImage> add_gaussian_noise(std::span<const ProjectionImage> images,
                                                double intensity, std::uint64_t seed) {
    const double ref = dataset_max(images);
    std::vector<ProjectionImage> out;
    out.reserve(images.size());
    for (const auto& img : images) {
        out.push_back(add_gaussian_noise(
            img, intensity, ref, derive_seed(seed, static_cast<std::uint64_t>(img.camera_id))));
    }
    return out;
}

std::vector<ProjectionImage> add_salt_pepper_noise(std::span<const ProjectionImage> images,
                                                   double intensity, std::uint64_t seed) {
    const double ref = dataset_max(images);
    std::vector<ProjectionImage> out;
    out.reserve(images.size());
    for (const auto& img : images) {
        out.push_back(add_salt_pepper_noise(
            img, intensity, ref, derive_seed(seed, static_cast<std::uint64_t>(img.camera_id))));
    }
    return out;
}

}  // namespace flametomo
