#include "flametomo/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "flametomo/atomic_file.hpp"
#include "flametomo/error.hpp"

namespace flametomo {

double Fireball::temperature(const Vec3& p) const {
    const double k = (p - center).squaredNorm() / (radius * radius);
    return t_max * std::exp(-k);
}

void PhantomSpec::validate() const {
    if (fireballs.empty()) throw ValidationError("phantom needs at least one fireball");
    for (std::size_t i = 0; i < fireballs.size(); ++i) {
        const Fireball& f = fireballs[i];
        if (!f.center.allFinite()) {
            throw ValidationError("fireball " + std::to_string(i) + ": center is not finite");
        }
        if (!(f.radius > 0.0) || !std::isfinite(f.radius)) {
            throw ValidationError("fireball " + std::to_string(i) + ": radius must be > 0");
        }
        if (!(f.t_max >= 0.0) || !std::isfinite(f.t_max)) {
            throw ValidationError("fireball " + std::to_string(i) + ": t_max must be >= 0");
        }
    }
}

double phantom_temperature(const PhantomSpec& spec, const Vec3& point) {
    double t = 0.0;
    for (const Fireball& f : spec.fireballs) t = std::max(t, f.temperature(point));
    return t;
}

double analytic_line_integral(const Fireball& fireball, const Ray& ray) {
    const Vec3 to_center = fireball.center - ray.origin;
    const double along = to_center.dot(ray.direction);
    const double rho2 = std::max(0.0, to_center.squaredNorm() - along * along);
    const double r = fireball.radius;
    return fireball.t_max * std::sqrt(std::numbers::pi) * r * std::exp(-rho2 / (r * r));
}

PhantomSpec preset_phantom(const std::string& name) {
    PhantomSpec spec;
    if (name == "single") {
        spec.fireballs = {{Vec3(0.0, 0.0, 0.0), 8.0, 1000.0}};
    } else if (name == "double") {
        spec.fireballs = {{Vec3(-5.0, -3.0, -6.0), 8.0, 1000.0},
                          {Vec3(5.0, 4.0, 8.0), 7.0, 1000.0}};
    } else if (name == "triple") {
        spec.fireballs = {{Vec3(-7.0, -4.0, -8.0), 7.0, 1000.0},
                          {Vec3(7.0, -3.0, 2.0), 6.0, 1000.0},
                          {Vec3(0.0, 6.0, 12.0), 6.0, 1000.0}};
    } else {
        throw ValidationError("unknown phantom preset '" + name + "'");
    }
    return spec;
}

std::vector<std::string> preset_phantom_names() { return {"single", "double", "triple"}; }

nlohmann::json to_json(const PhantomSpec& spec) {
    nlohmann::json balls = nlohmann::json::array();
    for (const Fireball& f : spec.fireballs) {
        balls.push_back({{"center", {f.center.x(), f.center.y(), f.center.z()}},
                         {"radius", f.radius},
                         {"t_max", f.t_max}});
    }
    return {{"fireballs", balls}};
}

PhantomSpec phantom_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("phantom: expected an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "fireballs") throw ConfigError("phantom: unknown key '" + key + "'");
    }
    if (!j.contains("fireballs") || !j.at("fireballs").is_array()) {
        throw ConfigError("phantom: 'fireballs' must be an array");
    }
    PhantomSpec spec;
    for (const auto& b : j.at("fireballs")) {
        if (!b.is_object()) throw ConfigError("phantom: fireball entries must be objects");
        Fireball f;
        for (const auto& [key, value] : b.items()) {
            if (key == "center") {
                if (!value.is_array() || value.size() != 3) {
                    throw ConfigError("phantom: 'center' must have three numbers");
                }
                f.center = Vec3(value[0].get<double>(), value[1].get<double>(),
                                value[2].get<double>());
            } else if (key == "radius") {
                f.radius = value.get<double>();
            } else if (key == "t_max") {
                f.t_max = value.get<double>();
            } else {
                throw ConfigError("phantom: unknown fireball key '" + key + "'");
            }
        }
        spec.fireballs.push_back(f);
    }
    spec.validate();
    return spec;
}

PhantomSpec load_phantom(const std::string& path) {
    const std::string text = read_file_text(path);
    try {
        return phantom_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void save_phantom(const PhantomSpec& spec, const std::string& path) {
    spec.validate();
    write_file_atomic(path, to_json(spec).dump(2) + "\n");
}

}  // namespace flametomo
