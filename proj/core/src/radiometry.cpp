#include "flametomo/radiometry.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "flametomo/atomic_file.hpp"
#include "flametomo/error.hpp"

namespace flametomo {

double planck_radiance(double wavelength_m, double temperature_k, double emissivity) {
    if (!(wavelength_m > 0.0) || !std::isfinite(wavelength_m)) {
        throw ValidationError("wavelength must be positive");
    }
    if (!(temperature_k > 0.0) || !std::isfinite(temperature_k)) {
        throw ValidationError("temperature must be positive");
    }
    if (!(emissivity >= 0.0 && emissivity <= 1.0)) {
        throw ValidationError("emissivity must lie in [0, 1]");
    }
    using C = PhysicalConstants;
    const double x = C::planck * C::light_speed / (wavelength_m * C::boltzmann * temperature_k);
    const double numerator = 2.0 * std::numbers::pi * C::planck * C::light_speed * C::light_speed;
    return emissivity * numerator / (std::pow(wavelength_m, 5) * std::expm1(x));
}

double linear_gray_to_temp(double gray, double a, double b) { return a * gray + b; }

double butane_curve(double gray) {
    return -16387.7 * std::exp(-gray / 1.63) - 257.9 * std::exp(-gray / 12.57) -
           261.7 * std::exp(-gray / 137.06) + 1326.4;
}

CalibrationCurve CalibrationCurve::linear(double a, double b, double gray_min, double gray_max) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw ValidationError("linear curve: A, B must be finite");
    CalibrationCurve c;
    c.variant_ = Variant::Linear;
    c.a_ = a;
    c.b_ = b;
    c.gray_min_ = gray_min;
    c.gray_max_ = gray_max;
    c.check_monotonic();
    return c;
}

CalibrationCurve CalibrationCurve::exponential_fit(std::vector<double> amplitudes,
                                                   std::vector<double> scales, double offset,
                                                   double gray_min, double gray_max) {
    if (amplitudes.empty() || amplitudes.size() != scales.size()) {
        throw ValidationError("exponential curve: amplitudes and scales must pair up");
    }
    for (double s : scales) {
        if (!(s > 0.0)) throw ValidationError("exponential curve: scales must be positive");
    }
    CalibrationCurve c;
    c.variant_ = Variant::ExponentialFit;
    c.amplitudes_ = std::move(amplitudes);
    c.scales_ = std::move(scales);
    c.offset_ = offset;
    c.gray_min_ = gray_min;
    c.gray_max_ = gray_max;
    c.check_monotonic();
    return c;
}

CalibrationCurve CalibrationCurve::butane(double min_temperature, double gray_max) {
    const std::vector<double> amps{-16387.7, -257.9, -261.7};
    const std::vector<double> scales{1.63, 12.57, 137.06};
    const double offset = 1326.4;
    if (!(min_temperature < offset)) {
        throw ValidationError("butane curve: minimum temperature must be below 1326.4 K");
    }
    // T(G) increases monotonically; bisect for T(G) = min_temperature.
    double lo = 0.0;
    double hi = gray_max;
    if (butane_curve(hi) < min_temperature) {
        throw ValidationError("butane curve: gray_max too small for the requested range");
    }
    if (butane_curve(lo) >= min_temperature) {
        hi = lo;
    } else {
        for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            (butane_curve(mid) < min_temperature ? lo : hi) = mid;
        }
    }
    return exponential_fit(amps, scales, offset, hi, gray_max);
}

double CalibrationCurve::evaluate(double gray) const {
    if (variant_ == Variant::Linear) return linear_gray_to_temp(gray, a_, b_);
    double t = offset_;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        t += amplitudes_[i] * std::exp(-gray / scales_[i]);
    }
    return t;
}

double CalibrationCurve::temperature(double gray) const {
    if (!(gray >= gray_min_ && gray <= gray_max_)) {
        throw OutOfCalibrationError("gray value " + std::to_string(gray) +
                                    " outside calibrated range [" + std::to_string(gray_min_) +
                                    ", " + std::to_string(gray_max_) + "]");
    }
    return evaluate(gray);
}

void CalibrationCurve::check_monotonic() const {
    if (!std::isfinite(gray_min_) || !std::isfinite(gray_max_) || !(gray_max_ >= gray_min_)) {
        throw ValidationError("calibration curve: invalid gray range");
    }
    constexpr int kSamples = 10000;
    double prev = evaluate(gray_min_);
    for (int i = 1; i <= kSamples; ++i) {
        const double g = gray_min_ + (gray_max_ - gray_min_) * i / kSamples;
        const double t = evaluate(g);
        if (!std::isfinite(t) || t < prev) {
            throw ValidationError("calibration curve is not monotonically non-decreasing on [" +
                                  std::to_string(gray_min_) + ", " + std::to_string(gray_max_) +
                                  "]");
        }
        prev = t;
    }
}

double butane_gray_to_temp(double gray) {
    static const CalibrationCurve curve = CalibrationCurve::butane();
    return curve.temperature(gray);
}

nlohmann::json to_json(const CalibrationCurve& curve) {
    if (curve.variant() == CalibrationCurve::Variant::Linear) {
        return {{"variant", "linear"},
                {"A", curve.slope()},
                {"B", curve.intercept()},
                {"gray_min", curve.gray_min()},
                {"gray_max", curve.gray_max()}};
    }
    return {{"variant", "butane-fit"},
            {"amplitudes", curve.amplitudes()},
            {"scales", curve.scales()},
            {"offset", curve.offset()},
            {"gray_min", curve.gray_min()},
            {"gray_max", curve.gray_max()}};
}

CalibrationCurve calibration_from_json(const nlohmann::json& j) {
    try {
        const std::string variant = j.at("variant").get<std::string>();
        auto check_keys = [&j](std::initializer_list<const char*> allowed) {
            for (const auto& [key, _] : j.items()) {
                bool ok = false;
                for (const char* a : allowed) ok = ok || key == a;
                if (!ok) throw ConfigError("calibration: unknown key '" + key + "'");
            }
        };
        if (variant == "linear") {
            check_keys({"variant", "A", "B", "gray_min", "gray_max"});
            return CalibrationCurve::linear(j.at("A").get<double>(), j.at("B").get<double>(),
                                            j.value("gray_min", 0.0), j.value("gray_max", 65535.0));
        }
        if (variant == "butane") {
            check_keys({"variant", "min_temperature", "gray_max"});
            return CalibrationCurve::butane(j.value("min_temperature", 600.0),
                                            j.value("gray_max", 65535.0));
        }
        if (variant == "butane-fit") {
            check_keys({"variant", "amplitudes", "scales", "offset", "gray_min", "gray_max"});
            return CalibrationCurve::exponential_fit(
                j.at("amplitudes").get<std::vector<double>>(),
                j.at("scales").get<std::vector<double>>(), j.at("offset").get<double>(),
                j.at("gray_min").get<double>(), j.at("gray_max").get<double>());
        }
        throw ConfigError("calibration: unknown variant '" + variant + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("calibration: ") + e.what());
    }
}

CalibrationCurve load_calibration(const std::string& path) {
    try {
        return calibration_from_json(nlohmann::json::parse(read_file_text(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void save_calibration(const CalibrationCurve& curve, const std::string& path) {
    write_file_atomic(path, to_json(curve).dump(2) + "\n");
}

TemperatureImage image_to_temperature(const GrayImage& gray, const CalibrationCurve& curve) {
    TemperatureImage out;
    out.width = gray.width;
    out.height = gray.height;
    out.values.resize(gray.pixels.size());
    const double t_top = curve.evaluate(curve.gray_max());
    for (std::size_t i = 0; i < gray.pixels.size(); ++i) {
        const double g = gray.pixels[i];
        if (g < curve.gray_min()) {
            out.values[i] = 0.0;
            ++out.report.below_range;
        } else if (g > curve.gray_max()) {
            out.values[i] = t_top;
            ++out.report.above_range;
        } else {
            out.values[i] = curve.evaluate(g);
            ++out.report.converted;
        }
    }
    const std::size_t bad = out.report.below_range + out.report.above_range;
    if (2 * bad > out.report.total()) {
        throw OutOfCalibrationError("image rejected as miscalibrated: " + std::to_string(bad) +
                                    " of " + std::to_string(out.report.total()) +
                                    " pixels outside the calibrated gray range");
    }
    return out;
}

ProjectionImage to_projection(const TemperatureImage& img, int camera_id) {
    ProjectionImage p;
    p.camera_id = camera_id;
    p.width = img.width;
    p.height = img.height;
    p.values = img.values;
    return p;
}

}  // namespace flametomo
