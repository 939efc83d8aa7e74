#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "flametomo/camera.hpp"
#include "flametomo/types.hpp"

namespace flametomo {

// Spherical Gaussian temperature blob: t_max * exp(-|p - center|^2 / radius^2).
struct Fireball {
    Vec3 center = Vec3::Zero();
    double radius = 8.0;
    double t_max = 1000.0;

    double temperature(const Vec3& p) const;
};

// Ground-truth field made of one or more fireballs, combined by pointwise max.
struct PhantomSpec {
    std::vector<Fireball> fireballs;

    void validate() const;
};

double phantom_temperature(const PhantomSpec& spec, const Vec3& point);

// Exact integral of a fireball along the infinite line carrying `ray`:
// t_max * sqrt(pi) * R * exp(-rho^2 / R^2), rho the ray-to-center distance.
double analytic_line_integral(const Fireball& fireball, const Ray& ray);

// Built-in phantoms: "single", "double", "triple".
PhantomSpec preset_phantom(const std::string& name);
std::vector<std::string> preset_phantom_names();

nlohmann::json to_json(const PhantomSpec& spec);
PhantomSpec phantom_from_json(const nlohmann::json& j);
PhantomSpec load_phantom(const std::string& path);
void save_phantom(const PhantomSpec& spec, const std::string& path);

}  // namespace flametomo
