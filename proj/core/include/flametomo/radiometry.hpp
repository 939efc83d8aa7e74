#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "flametomo/graymap.hpp"
#include "flametomo/projection.hpp"

namespace flametomo {

// SI values fixed by the 2019 redefinition (exact).
struct PhysicalConstants {
    static constexpr double planck = 6.62607015e-34;      // J s
    static constexpr double light_speed = 299792458.0;    // m / s
    static constexpr double boltzmann = 1.380649e-23;     // J / K
};

// Single-wavelength thermal emission
//   I = emissivity * 2 pi h c^2 / (lambda^5 (exp(h c / (lambda k T)) - 1)),
// lambda in metres, T in kelvin. Throws ValidationError for lambda <= 0,
// T <= 0 or emissivity outside [0, 1].
double planck_radiance(double wavelength_m, double temperature_k, double emissivity = 1.0);

// T = A * G + B.
double linear_gray_to_temp(double gray, double a, double b);

// Butane flame calibration at 768 nm:
//   T = -16387.7 e^(-G/1.63) - 257.9 e^(-G/12.57) - 261.7 e^(-G/137.06) + 1326.4
// Unchecked evaluation; see CalibrationCurve for the range-checked form.
double butane_curve(double gray);

// Gray -> temperature relation with a declared valid gray range. Construction
// verifies on 10^4 evenly spaced gray levels that T(G) never decreases.
class CalibrationCurve {
public:
    enum class Variant { Linear, ExponentialFit };

    static CalibrationCurve linear(double a, double b, double gray_min = 0.0,
                                   double gray_max = 65535.0);
    // sum_i amplitude_i * exp(-G / scale_i) + offset.
    static CalibrationCurve exponential_fit(std::vector<double> amplitudes,
                                            std::vector<double> scales, double offset,
                                            double gray_min, double gray_max);
    // The butane fit, valid where it yields T in [min_temperature, 1326.4).
    static CalibrationCurve butane(double min_temperature = 600.0, double gray_max = 65535.0);

    Variant variant() const { return variant_; }
    double gray_min() const { return gray_min_; }
    double gray_max() const { return gray_max_; }
    double slope() const { return a_; }
    double intercept() const { return b_; }
    const std::vector<double>& amplitudes() const { return amplitudes_; }
    const std::vector<double>& scales() const { return scales_; }
    double offset() const { return offset_; }

    // Unchecked evaluation of the curve formula.
    double evaluate(double gray) const;
    // Range-checked; throws OutOfCalibrationError outside [gray_min, gray_max].
    double temperature(double gray) const;

private:
    CalibrationCurve() = default;
    void check_monotonic() const;

    Variant variant_ = Variant::Linear;
    double a_ = 1.0;
    double b_ = 0.0;
    std::vector<double> amplitudes_;
    std::vector<double> scales_;
    double offset_ = 0.0;
    double gray_min_ = 0.0;
    double gray_max_ = 65535.0;
};

// Range-checked butane conversion (valid range from CalibrationCurve::butane()).
double butane_gray_to_temp(double gray);

nlohmann::json to_json(const CalibrationCurve& curve);
CalibrationCurve calibration_from_json(const nlohmann::json& j);
CalibrationCurve load_calibration(const std::string& path);
void save_calibration(const CalibrationCurve& curve, const std::string& path);

struct ConversionReport {
    std::size_t converted = 0;
    std::size_t below_range = 0;  // mapped to 0 K
    std::size_t above_range = 0;  // clamped to T(gray_max)
    std::size_t total() const { return converted + below_range + above_range; }
};

struct TemperatureImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // kelvin, row-major
    ConversionReport report;
};

// Applies the curve pixel by pixel. Throws OutOfCalibrationError when more
// than half of the pixels fall outside the valid range.
TemperatureImage image_to_temperature(const GrayImage& gray, const CalibrationCurve& curve);

// Wraps a converted image as a projection for a given camera.
ProjectionImage to_projection(const TemperatureImage& img, int camera_id);

}  // namespace flametomo
